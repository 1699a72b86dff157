#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace amgd {

// Library error carrying a stable machine-readable kind tag ("Reducible",
// "HorizonTooSmall", ...). The CLI prints the tag on its error line; tests
// match on it.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace amgd
