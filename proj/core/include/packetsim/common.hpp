#pragma once

#include <stdexcept>
#include <string>

#define PACKETSIM_VERSION "0.1.0"

namespace packetsim {

// Bad or inconsistent user input (config files, CLI values, malformed tables).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called with arguments outside its documented domain.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// A running computation left its validity envelope (trace drift, negativity, ...).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace packetsim
