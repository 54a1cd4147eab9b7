#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace catapult {

// Seeded Gaussian generator with an explicit Box-Muller transform.
// std::normal_distribution is allowed to differ between standard library
// implementations, which would break bit-identical reproducibility across
// toolchains; mt19937_64 plus our own transform is pinned everywhere.
class GaussianRng {
public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  // Standard normal draw. Pairs are produced by one Box-Muller evaluation;
  // the second member is cached so successive calls consume a fixed number
  // of engine words regardless of call pattern.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Map 64-bit words into (0,1]: (x >> 11) gives 53 uniform bits, and the
    // +1 keeps u1 strictly positive so log(u1) is finite.
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform in [0, n): used for dataset shuffling/generation only.
  std::uint64_t uniform_index(std::uint64_t n) { return engine_() % n; }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

  std::vector<double> normal_vector(std::size_t count, double stddev) {
    std::vector<double> v(count);
    for (auto& x : v) x = stddev * normal();
    return v;
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace catapult
