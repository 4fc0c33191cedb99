#pragma once

#include "oplab/errors.hpp"
#include "oplab/scalar.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace oplab {

template <class Real>
struct JacobiResult {
  Vec<Real> eigenvalues;    // ascending
  Dense<Real> eigenvectors; // orthonormal columns
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for real symmetric matrices, generic in the
/// arithmetic type. A rotation is skipped once |a_pq| <= eps * sqrt(|a_pp a_qq|),
/// which yields eigenvalues with small relative error on graded positive
/// definite input.
template <class Real>
JacobiResult<Real> jacobi_eigen(Dense<Real> a, int max_sweeps = 100) {
  using std::abs;
  using std::sqrt;
  const int n = static_cast<int>(a.rows());
  Dense<Real> v = Dense<Real>::Identity(n, n);
  const Real eps = unit_roundoff<Real>();
  const Real tiny = std::numeric_limits<Real>::min();
  const Real huge_theta = Real(1) / eps;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Real apq = a(p, q);
        const Real mag = abs(apq);
        if (mag <= tiny) continue;
        if (mag <= eps * sqrt(abs(a(p, p) * a(q, q)))) continue;
        rotated = true;
        const Real theta = (a(q, q) - a(p, p)) / (2 * apq);
        Real t;
        if (abs(theta) > huge_theta) {
          t = Real(1) / (2 * theta);
        } else {
          t = Real(1) / (abs(theta) + sqrt(theta * theta + 1));
          if (theta < 0) t = -t;
        }
        const Real c = Real(1) / sqrt(t * t + 1);
        const Real s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0;
        a(q, p) = 0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const Real arp = a(r, p);
            const Real arq = a(r, q);
            a(r, p) = c * arp - s * arq;
            a(p, r) = a(r, p);
            a(r, q) = s * arp + c * arq;
            a(q, r) = a(r, q);
          }
          const Real vrp = v(r, p);
          const Real vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
    if (!rotated) break;
  }
  if (sweep == max_sweeps) {
    double lo = 0, hi = 0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(to_double(a(i, i)));
      hi = std::max(hi, d);
      lo = (i == 0) ? d : std::min(lo, d);
    }
    throw DecompositionFailure(n, lo > 0 ? hi / lo : std::numeric_limits<double>::infinity());
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
  JacobiResult<Real> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace oplab
