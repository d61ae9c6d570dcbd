#pragma once

#include <stdexcept>
#include <string>

namespace g2 {

/// Numerical blow-up of a time integration. Carries the ensemble sample
/// index when raised inside a Monte Carlo run (-1 otherwise).
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(const std::string& what, long sample = -1)
      : std::runtime_error(what), sample_(sample) {}
  [[nodiscard]] long sample() const { return sample_; }

private:
  long sample_;
};

/// Invalid configuration or command-line usage.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace g2
