#pragma once

#include "oplab/spectral.hpp"

#include <cmath>
#include <random>

namespace testutil {

inline oplab::Dense<double> random_dense(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  oplab::Dense<double> g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = nd(rng);
  return g;
}

inline oplab::RealMatrix random_symmetric(int dim, std::mt19937_64& rng) {
  const auto g = random_dense(dim, rng);
  return oplab::RealMatrix::trusted(g + g.transpose());
}

/// G^T G + shift I.
inline oplab::RealMatrix random_spd(int dim, std::mt19937_64& rng, double shift = 0.1) {
  const auto g = random_dense(dim, rng);
  return oplab::RealMatrix::trusted(g.transpose() * g + shift * oplab::Dense<double>::Identity(dim, dim));
}

/// Eigenvalues of [[a, b], [b, c]] in closed form, ascending.
inline std::pair<double, double> eig2(double a, double b, double c) {
  const double m = 0.5 * (a + c);
  const double d = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return {m - d, m + d};
}

/// Largest |eigenvalue| by power iteration on H^2.
inline double power_iteration_norm(const oplab::Dense<double>& h, int iters = 5000) {
  oplab::Dense<double> h2 = h * h;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(h.rows()) + Eigen::VectorXd::LinSpaced(h.rows(), 0.0, 0.37);
  double lambda = 0;
  for (int i = 0; i < iters; ++i) {
    Eigen::VectorXd w = h2 * v;
    lambda = w.norm() / v.norm();
    v = w / w.norm();
  }
  return std::sqrt(lambda);
}

}  // namespace testutil
