#include "kappa/rng.hpp"

namespace kappa {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSpec RngSpec::derive(std::uint64_t stream) const { return RngSpec{mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))}; }

PathRng::PathRng(const RngSpec& spec, std::uint64_t path_index, std::uint64_t stream)
    : engine_(mix64(spec.seed ^ mix64(stream ^ mix64(path_index ^ 0xd1b54a32d192ed03ULL)))) {}

}  // namespace kappa
