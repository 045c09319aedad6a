#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace calabi {

inline constexpr int kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                        37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                                        83, 89, 97, 101, 103, 107, 109, 113, 127, 131,
                                        137, 139, 149, 157, 163, 167, 173, 179};

inline double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

// Point of the n-dimensional Halton sequence in [0,1)^n. Index 0 is the
// origin, so callers normally start at index 1.
inline std::vector<double> halton_point(std::uint64_t index, int dims) {
  std::vector<double> p(static_cast<std::size_t>(dims));
  for (int d = 0; d < dims; ++d) {
    p[static_cast<std::size_t>(d)] = radical_inverse(index, kHaltonPrimes[d]);
  }
  return p;
}

// Unit vector derived from Halton points through Box-Muller pairs.
inline std::vector<double> halton_sphere_point(std::uint64_t index, int dims) {
  const int pairs = (dims + 1) / 2;
  std::vector<double> g(static_cast<std::size_t>(2 * pairs));
  for (int k = 0; k < pairs; ++k) {
    const double u1 = radical_inverse(index, kHaltonPrimes[2 * k]);
    const double u2 = radical_inverse(index, kHaltonPrimes[2 * k + 1]);
    const double r = std::sqrt(-2.0 * std::log(u1 > 0.0 ? u1 : 0.5));
    g[static_cast<std::size_t>(2 * k)] = r * std::cos(2.0 * M_PI * u2);
    g[static_cast<std::size_t>(2 * k + 1)] = r * std::sin(2.0 * M_PI * u2);
  }
  g.resize(static_cast<std::size_t>(dims));
  double nrm = 0.0;
  for (double v : g) nrm += v * v;
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) {
    g.assign(static_cast<std::size_t>(dims), 0.0);
    g[0] = 1.0;
    return g;
  }
  for (double& v : g) v /= nrm;
  return g;
}

// Small deterministic generator for test sweeps and seeded restarts.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() {  // in [0,1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    const double u1 = std::max(uniform(), 1e-16);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

private:
  std::uint64_t state_;
};

}  // namespace calabi
