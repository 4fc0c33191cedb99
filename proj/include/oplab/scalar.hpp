#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

namespace oplab {

/// Fixed-precision MPFR reals used when a word is too ill-conditioned for
/// double. Stack storage keeps the hot loops free of heap traffic.
template <unsigned Digits10>
using MpReal = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<Digits10, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
struct real_of {
  using type = T;
};
template <class T>
struct real_of<std::complex<T>> {
  using type = T;
};
template <class T>
using real_t = typename real_of<T>::type;

template <class Scalar>
using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
int decimal_digits() {
  return std::numeric_limits<Real>::digits10;
}

template <class Real>
Real unit_roundoff() {
  return std::numeric_limits<Real>::epsilon();
}

template <class Real>
double to_double(const Real& x) {
  return static_cast<double>(x);
}

template <class Scalar>
Scalar conj_of(const Scalar& x) {
  if constexpr (is_complex_v<Scalar>) {
    return std::conj(x);
  } else {
    return x;
  }
}

template <class Scalar>
real_t<Scalar> real_part(const Scalar& x) {
  if constexpr (is_complex_v<Scalar>) {
    return x.real();
  } else {
    return x;
  }
}

template <class Scalar>
double abs_double(const Scalar& x) {
  using std::abs;
  return static_cast<double>(abs(x));
}

/// Embeds an n x n complex Hermitian matrix X + iY into the 2n x 2n real
/// symmetric matrix [[X, -Y], [Y, X]]. The map is a *-homomorphism, so
/// products, functional calculus and the Loewner order all commute with it.
template <class Real>
Dense<Real> realify(const Dense<std::complex<double>>& h) {
  const Eigen::Index n = h.rows();
  Dense<Real> out(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Real re = Real(h(i, j).real());
      const Real im = Real(h(i, j).imag());
      out(i, j) = re;
      out(i + n, j + n) = re;
      out(i, j + n) = -im;
      out(i + n, j) = im;
    }
  }
  return out;
}

template <class Real>
Dense<std::complex<double>> derealify(const Dense<Real>& m) {
  const Eigen::Index n = m.rows() / 2;
  Dense<std::complex<double>> out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = 0.5 * (to_double(m(i, j)) + to_double(m(i + n, j + n)));
      const double im = 0.5 * (to_double(m(i + n, j)) - to_double(m(i, j + n)));
      out(i, j) = {re, im};
    }
  }
  return out;
}

template <class To, class From>
Dense<To> cast_dense(const Dense<From>& m) {
  if constexpr (std::is_same_v<To, From>) {
    return m;
  } else if constexpr (std::is_same_v<To, double>) {
    Dense<double> out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = static_cast<double>(m(i, j));
    return out;
  } else {
    Dense<To> out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = To(m(i, j));
    return out;
  }
}

}  // namespace oplab
