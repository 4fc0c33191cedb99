#pragma once

#include "oplab/errors.hpp"
#include "oplab/jacobi.hpp"
#include "oplab/relation.hpp"
#include "oplab/scalar.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace oplab {

/// Tolerances shared by every order decision.
///
/// Loewner comparisons use tol = tol_rel * max(1, ||P||, ||Q||); negative and
/// fractional powers require lambda_min > eps_pd_rel * max(eps_pd_floor, ||H||).
struct TolerancePolicy {
  double tol_rel = 1e-9;
  double eps_pd_rel = 1e-10;
  double eps_pd_floor = 1.0;
  double hermitian_rel = 1e-12;
};

struct Verdict {
  Relation relation = Relation::INCOMPARABLE;
  double margin = 0.0;
  double tol = 0.0;

  bool ge() const { return relation == Relation::GE || relation == Relation::EQ; }
  bool le() const { return relation == Relation::LE || relation == Relation::EQ; }
};

/// Dense self-adjoint matrix. Construction checks Hermiticity and stores the
/// exactly symmetrized entries.
template <class Scalar>
class HermitianMatrix {
 public:
  using scalar_type = Scalar;
  using Real = real_t<Scalar>;

  HermitianMatrix() = default;

  explicit HermitianMatrix(Dense<Scalar> entries, double hermitian_rel = TolerancePolicy{}.hermitian_rel) {
    if (entries.rows() < 1) throw RangeError("HermitianMatrix: dim must be >= 1");
    if (entries.rows() != entries.cols())
      throw DimensionMismatch(static_cast<int>(entries.rows()), static_cast<int>(entries.cols()),
                              "HermitianMatrix");
    const double frob = to_double(entries.norm());
    const double residual = to_double((entries - entries.adjoint()).norm());
    const double bound = hermitian_rel * frob;
    if (!(residual <= bound)) throw NotHermitian(residual, bound);
    m_ = symmetrize(entries);
  }

  /// Wraps a matrix that is Hermitian by construction (e.g. U diag U*),
  /// removing rounding asymmetry without a check.
  static HermitianMatrix trusted(const Dense<Scalar>& entries) {
    HermitianMatrix h;
    h.m_ = symmetrize(entries);
    return h;
  }

  static HermitianMatrix identity(int dim) { return trusted(Dense<Scalar>::Identity(dim, dim)); }

  static HermitianMatrix diagonal(const std::vector<double>& values) {
    Dense<Scalar> d = Dense<Scalar>::Zero(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d(i, i) = Scalar(values[i]);
    return trusted(d);
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Dense<Scalar>& dense() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_same_dim(a, b, "operator+");
    return trusted(a.m_ + b.m_);
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_same_dim(a, b, "operator-");
    return trusted(a.m_ - b.m_);
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) { return trusted(Scalar(s) * a.m_); }

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) { return a.m_ == b.m_; }

  static void check_same_dim(const HermitianMatrix& a, const HermitianMatrix& b, const char* where) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim(), where);
  }

 private:
  static Dense<Scalar> symmetrize(const Dense<Scalar>& m) {
    Dense<Scalar> s = (m + m.adjoint()) * Scalar(0.5);
    return s;
  }

  Dense<Scalar> m_;
};

using RealMatrix = HermitianMatrix<double>;
using ComplexMatrix = HermitianMatrix<std::complex<double>>;

template <class Scalar>
struct SpectralDecomposition {
  Vec<real_t<Scalar>> eigenvalues;   // ascending
  Dense<Scalar> eigenvectors;        // orthonormal columns

  Dense<Scalar> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<Scalar>().asDiagonal() * eigenvectors.adjoint();
  }
};

namespace detail {

template <class Scalar>
SpectralDecomposition<Scalar> decompose_dense(const Dense<Scalar>& h) {
  SpectralDecomposition<Scalar> out;
  if constexpr (is_complex_v<Scalar>) {
    Eigen::SelfAdjointEigenSolver<Dense<Scalar>> solver(h);
    if (solver.info() != Eigen::Success) {
      const auto& ev = solver.eigenvalues();
      const double hi = ev.size() ? std::abs(ev(ev.size() - 1)) : 0.0;
      const double lo = ev.size() ? std::abs(ev(0)) : 0.0;
      throw DecompositionFailure(static_cast<int>(h.rows()), lo > 0 ? hi / lo : INFINITY);
    }
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
  } else {
    auto res = jacobi_eigen<Scalar>(h);
    out.eigenvalues = std::move(res.eigenvalues);
    out.eigenvectors = std::move(res.eigenvectors);
  }
  return out;
}

template <class Real>
bool is_integer_exponent(const Real& alpha) {
  using std::round;
  return alpha == round(alpha);
}

/// U diag(f(lambda)) U*.
template <class Scalar, class F>
Dense<Scalar> apply_function(const SpectralDecomposition<Scalar>& d, F&& f) {
  const Eigen::Index n = d.eigenvalues.size();
  Dense<Scalar> scaled = d.eigenvectors;
  for (Eigen::Index k = 0; k < n; ++k) scaled.col(k) *= Scalar(f(d.eigenvalues(k)));
  return scaled * d.eigenvectors.adjoint();
}

}  // namespace detail

template <class Scalar>
SpectralDecomposition<Scalar> spectral_decompose(const HermitianMatrix<Scalar>& h) {
  return detail::decompose_dense<Scalar>(h.dense());
}

template <class Scalar>
double positivity_margin(const HermitianMatrix<Scalar>& h) {
  return to_double(spectral_decompose(h).eigenvalues(0));
}

template <class Scalar>
double operator_norm(const HermitianMatrix<Scalar>& h) {
  const auto ev = spectral_decompose(h).eigenvalues;
  return std::max(std::abs(to_double(ev(0))), std::abs(to_double(ev(ev.size() - 1))));
}

inline double eps_pd(double norm, const TolerancePolicy& policy = {}) {
  return policy.eps_pd_rel * std::max(policy.eps_pd_floor, norm);
}

template <class Scalar>
HermitianMatrix<Scalar> matrix_power(const HermitianMatrix<Scalar>& h, double alpha,
                                     const TolerancePolicy& policy = {}) {
  if (alpha == 0.0) return HermitianMatrix<Scalar>::identity(h.dim());
  if (alpha == 1.0) return h;
  const auto d = spectral_decompose(h);
  const double lo = to_double(d.eigenvalues(0));
  const double hi = to_double(d.eigenvalues(d.eigenvalues.size() - 1));
  const bool integer = detail::is_integer_exponent(alpha);
  if (alpha < 0 || !integer) {
    const double gate = eps_pd(std::max(std::abs(lo), std::abs(hi)), policy);
    if (!(lo > gate)) throw NearSingular(lo, gate);
  }
  using Real = real_t<Scalar>;
  return HermitianMatrix<Scalar>::trusted(
      detail::apply_function(d, [alpha](const Real& x) { using std::pow; return pow(x, Real(alpha)); }));
}

/// X* H X.
template <class Scalar>
HermitianMatrix<Scalar> congruence(const Dense<Scalar>& x, const HermitianMatrix<Scalar>& h) {
  if (x.rows() != x.cols()) throw DimensionMismatch(static_cast<int>(x.rows()), static_cast<int>(x.cols()), "congruence");
  if (x.rows() != h.dim()) throw DimensionMismatch(static_cast<int>(x.rows()), h.dim(), "congruence");
  return HermitianMatrix<Scalar>::trusted(x.adjoint() * h.dense() * x);
}

template <class Scalar>
HermitianMatrix<Scalar> congruence(const HermitianMatrix<Scalar>& x, const HermitianMatrix<Scalar>& h) {
  return congruence<Scalar>(x.dense(), h);
}

/// Smallest eigenvalue of P - Q.
template <class Scalar>
double min_eigen_difference(const HermitianMatrix<Scalar>& p, const HermitianMatrix<Scalar>& q) {
  HermitianMatrix<Scalar>::check_same_dim(p, q, "loewner_compare");
  return positivity_margin(p - q);
}

inline double comparison_scale(double norm_p, double norm_q) { return std::max({1.0, norm_p, norm_q}); }

template <class Scalar>
Verdict loewner_compare(const HermitianMatrix<Scalar>& p, const HermitianMatrix<Scalar>& q, double tol_rel) {
  HermitianMatrix<Scalar>::check_same_dim(p, q, "loewner_compare");
  const double tol = tol_rel * comparison_scale(operator_norm(p), operator_norm(q));
  const auto d = spectral_decompose(p - q);
  const double pq = to_double(d.eigenvalues(0));                              // lambda_min(P - Q)
  const double qp = -to_double(d.eigenvalues(d.eigenvalues.size() - 1));     // lambda_min(Q - P)
  Verdict v;
  v.tol = tol;
  const bool ge = pq >= -tol;
  const bool le = qp >= -tol;
  if (ge && le) {
    v.relation = Relation::EQ;
    v.margin = std::min(pq, qp);
  } else if (ge) {
    v.relation = Relation::GE;
    v.margin = pq;
  } else if (le) {
    v.relation = Relation::LE;
    v.margin = qp;
  } else {
    v.relation = Relation::INCOMPARABLE;
    v.margin = std::max(pq, qp);
  }
  return v;
}

template <class Scalar>
Verdict loewner_compare(const HermitianMatrix<Scalar>& p, const HermitianMatrix<Scalar>& q,
                        const TolerancePolicy& policy = {}) {
  return loewner_compare(p, q, policy.tol_rel);
}

}  // namespace oplab
