#ifndef HARDY_RNG_HPP
#define HARDY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace hardy {

/// splitmix64 step; used to derive independent per-stratum seeds from one
/// user seed so that results do not depend on how work is partitioned.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream.  mt19937_64 is fully specified by the
/// standard; the uniform/normal transforms are written out here because the
/// std distributions are implementation-defined and would break the
/// byte-identical reproducibility contract across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Marsaglia polar method
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  /// Uniform direction on the unit sphere of R^dim.
  std::vector<double> unit_vector(int dim) {
    std::vector<double> g(static_cast<std::size_t>(dim));
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& gi : g) {
        gi = normal();
        norm2 += gi * gi;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& gi : g) gi *= inv;
    return g;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hardy

#endif
