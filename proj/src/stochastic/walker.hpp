#pragma once

// Shared inner loop of the projected Euler scheme. Not part of the public
// interface: callers pass an observer instead of storing the path.

#include <cmath>
#include <cstdint>

#include "kappa/domain.hpp"
#include "kappa/rng.hpp"

namespace kappa::detail {

/// Stream and sign of a path, honouring the antithetic pairing.
struct PathStream {
  std::uint64_t index;
  double sign;
};

inline PathStream path_stream(std::uint64_t path_index, bool antithetic) {
  if (!antithetic) return {path_index, 1.0};
  return {path_index / 2, (path_index % 2) ? -1.0 : 1.0};
}

/// Runs `steps` projected Euler steps from x. For each step calls
/// obs(i, before, after, dW, push) where dW is the pre-push increment.
template <class Observer>
Point walk(const Domain& domain, Point x, size_t steps, double h, PathRng& rng, double sign, Observer&& obs) {
  const double sh = std::sqrt(h) * sign;
  const int n = x.dim();
  Vec dW(n);
  for (size_t i = 0; i < steps; ++i) {
    for (int c = 0; c < n; ++c) dW[c] = sh * rng.normal();
    const Reflection r = domain.reflect_into(x + dW);
    obs(i, x, r.point, dW, r.push);
    x = r.point;
  }
  return x;
}

}  // namespace kappa::detail
