#pragma once

#include <Eigen/Dense>

namespace amgd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace amgd
