#pragma once

#include <stdexcept>
#include <string>

namespace kernellab {

// Input outside the mathematical domain of an operation (non-finite
// arguments, points outside the kernel domain, sigma <= 0, ...).
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A truncated series could not be certified to the requested tolerance
// within the configured budget.  Carries the bound that was achieved.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double achieved_bound)
      : std::runtime_error(what), achieved_bound_(achieved_bound) {}
  double achieved_bound() const { return achieved_bound_; }

 private:
  double achieved_bound_;
};

// Malformed specification objects (rules, JSON payloads, flag combinations).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A request whose hypotheses are not met or not certifiable by this build.
class unsupported_error : public std::runtime_error {
 public:
  explicit unsupported_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace kernellab
