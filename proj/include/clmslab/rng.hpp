#ifndef CLMSLAB_RNG_HPP
#define CLMSLAB_RNG_HPP

#include <complex>
#include <cmath>
#include <cstdint>
#include <random>

namespace clmslab {

/// Deterministic random stream. Substreams are keyed by (seed, stream index)
/// through a splitmix64 mix, so ensemble trials can draw independently of
/// execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed, stream));
  }

  /// Uniform on (0, 1]; the open lower end keeps log() finite.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }

  /// Standard real Gaussian, Box-Muller (both outputs used).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform()));
    double t = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  /// Standard circular complex Gaussian: E[g] = 0, E|g|^2 = 1.
  std::complex<double> cgaussian() {
    double r = std::sqrt(-std::log(uniform()));
    double t = 2.0 * M_PI * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace clmslab

#endif
