#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hdod {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds a root seed and a list of tags (replicate index, rotation index,
/// scenario hash, ...) into an independent stream seed. Order of tags matters.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept;

/// Random source used everywhere in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so the
/// uniform and normal transforms are done here: uniforms take the top 53
/// bits, normals use the Marsaglia polar method (caching the second draw).
/// Results are therefore identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  double normal();

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hdod
