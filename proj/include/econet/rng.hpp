#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "econet/errors.hpp"

namespace econet {

// splitmix64 finalizer; used to derive independent substream seeds so that
// parallel cells produce the same draws regardless of scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix64(mix64(mix64(base ^ mix64(a)) ^ mix64(b)) ^ mix64(c));
}

// FNV-1a, for keying substreams off opaque string ids.
inline std::uint64_t hash_id(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic generator: mt19937_64 engine (bit-exact across platforms by
// the standard) with hand-rolled variate transforms, since the std
// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // (0, 1)
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // uniform on {0, ..., n-1}
  int uniform_int(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n)) % n;
  }

  double normal() {
    // Box-Muller, one value per call (the pair's second half is dropped to
    // keep the draw sequence easy to reason about)
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape) {
    if (shape <= 0.0) throw ValidationError("gamma shape must be positive");
    if (shape < 1.0) {
      double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  void dirichlet(std::span<const double> concentration, std::span<double> out) {
    double total = 0.0;
    for (std::size_t k = 0; k < concentration.size(); ++k) {
      out[k] = gamma(concentration[k]);
      total += out[k];
    }
    if (total <= 0.0) throw NumericError("dirichlet draw underflowed to zero");
    for (std::size_t k = 0; k < concentration.size(); ++k) out[k] /= total;
  }

  // index ~ weights / sum(weights); linear scan
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw NumericError("categorical weights sum to zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
      acc += weights[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // cdf must be nondecreasing with cdf.back() == total mass
  int categorical_cdf(std::span<const double> cdf) {
    double u = uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<int>(it - cdf.begin());
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform() * static_cast<double>(i));
      if (j >= i) j = i - 1;
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace econet
