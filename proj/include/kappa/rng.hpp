#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace kappa {

/// Master seed of a run. Every random stream is derived from it by a fixed
/// rule, so a path depends only on (seed, stream, path index).
struct RngSpec {
  std::uint64_t seed = 42;

  /// Derived spec for an independent sub-experiment (a check, a start point).
  RngSpec derive(std::uint64_t stream) const;
};

/// Normal generator for one path: mt19937_64 seeded with a mix of
/// (seed, stream, index); ziggurat normals.
class PathRng {
 public:
  PathRng(const RngSpec& spec, std::uint64_t path_index, std::uint64_t stream = 0);
  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

/// 64-bit mixing function used for stream derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace kappa
