#pragma once

#include <functional>
#include <string>

#include "amgd/error.hpp"

// Runs fn and reports the kind() of the amgd::Error it throws, or "" if it
// completes without throwing.
inline std::string thrown_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const amgd::Error& e) {
    return e.kind();
  }
  return "";
}
