#pragma once

#include <cstdint>
#include <limits>

namespace eigenmc {

// Seed derivation and the per-path random engine.
//
// Seeds are drawn from splitmix64 streams: stream position k maps to
// finalize(state + (k+1) * 0x9e3779b97f4a7c15). Distinct salts keep the
// per-path, per-replication and per-sweep-cell streams disjoint, so results
// do not depend on how work is split across workers.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t path_seed(std::uint64_t master, std::int64_t path_index) noexcept {
  return mix64(master + kGoldenGamma * (static_cast<std::uint64_t>(path_index) + 1));
}

constexpr std::uint64_t replication_seed(std::uint64_t master, int replication) noexcept {
  return mix64((master ^ 0x52455053414c54ull) +
               kGoldenGamma * (static_cast<std::uint64_t>(replication) + 1));
}

constexpr std::uint64_t sweep_cell_seed(std::uint64_t master, int cell) noexcept {
  return mix64((master ^ 0x53574545503533ull) +
               kGoldenGamma * (static_cast<std::uint64_t>(cell) + 1));
}

// Minimal splitmix64 engine, usable with <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  std::uint64_t state_;
};

}  // namespace eigenmc
