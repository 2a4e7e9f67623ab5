#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace slagfib {

/// Seeded generator used for every random quantity in the library. The
/// engine is std::mt19937_64; the real and normal conversions are written out
/// here so streams are identical across standard library implementations.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64/portable-v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace slagfib
