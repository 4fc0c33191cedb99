#pragma once

#include "oplab/scalar.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace oplab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent stream seed for work item `index` under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= index * 0xD1B54A32D192ED03ULL;
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  std::mt19937_64& engine() { return engine_; }

  /// dim x dim matrix with iid entries of variance 1/dim (complex: split
  /// evenly between real and imaginary parts).
  template <class Scalar>
  Dense<Scalar> gaussian(int dim) {
    Dense<Scalar> g(dim, dim);
    const double s = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if constexpr (is_complex_v<Scalar>) {
          const double re = normal();
          const double im = normal();
          g(i, j) = Scalar(re, im) * (s / std::sqrt(2.0));
        } else {
          g(i, j) = normal() * s;
        }
      }
    return g;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace oplab
