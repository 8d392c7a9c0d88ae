#pragma once

#include <cstdint>

namespace infoflow {

/// Deterministic counter-style generator used for every random draw in the
/// library (SplitMix64 sequence with the standard finalizer).
///
/// Stream derivation, stable across versions:
///   substream(master, index) = mix64(master + (index + 1) * 0x9E3779B97F4A7C15)
/// where mix64 is the SplitMix64 finalizer. Ensemble path j draws from
/// substream(master_seed, j); within a path, the scenario draw uses
/// substream(path_seed, 0) and the bridge draws substream(path_seed, 1).
/// Identical seeds therefore give bit-identical output regardless of thread
/// count or call order across paths.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform draw in (0, 1].
  double next_uniform();

  /// Standard normal via Box-Muller (two uniforms per draw, cosine branch).
  double next_gaussian();

  static std::uint64_t substream(std::uint64_t master_seed, std::uint64_t index);

 private:
  std::uint64_t state_;
};

}  // namespace infoflow
