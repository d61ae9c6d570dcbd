#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2/grid.hpp"

namespace g2 {

struct IdentityCheck {
  std::string name;
  double worst = 0.0;  // largest normalized defect over the sampled fields
  double tol = 0.0;
  [[nodiscard]] bool pass() const { return worst <= tol; }
};

/// Operator identities of the spectral core on `n_fields` random fields:
/// orthogonality and antisymmetry of Bhat, b(u,v,v) = 0, the curl identity,
/// Leray idempotency and self-adjointness, the W/V eigenvalue relation and
/// the Poincare sandwich.
std::vector<IdentityCheck> operator_identity_suite(const SpectralGrid& grid, int n_fields, std::uint64_t seed);

}  // namespace g2
