#pragma once

#include "oplab/errors.hpp"
#include "oplab/evaluate.hpp"
#include "oplab/spectral.hpp"
#include "oplab/verifier/random.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oplab {

/// A_1..A_k, all strictly positive and of one dimension, with their
/// smallest eigenvalues cached.
template <class Scalar>
class OperatorTuple {
 public:
  using Matrix = HermitianMatrix<Scalar>;

  OperatorTuple() = default;

  explicit OperatorTuple(std::vector<Matrix> matrices, const TolerancePolicy& policy = {})
      : matrices_(std::move(matrices)) {
    if (matrices_.size() < 2) throw RangeError("OperatorTuple: k must be >= 2");
    for (const auto& m : matrices_) {
      if (m.dim() != matrices_.front().dim()) throw DimensionMismatch(matrices_.front().dim(), m.dim(), "OperatorTuple");
      const auto ev = spectral_decompose(m).eigenvalues;
      const double lo = to_double(ev(0));
      const double hi = to_double(ev(ev.size() - 1));
      const double gate = eps_pd(std::max(std::abs(lo), std::abs(hi)), policy);
      if (!(lo > gate)) throw NearSingular(lo, gate);
      lambda_min_.push_back(lo);
      norm_.push_back(std::max(std::abs(lo), std::abs(hi)));
    }
  }

  /// Tuple of scalar multiples of the identity.
  static OperatorTuple scalars(const std::vector<double>& values, int dim = 1) {
    std::vector<Matrix> ms;
    for (double v : values) ms.push_back(v * Matrix::identity(dim));
    return OperatorTuple(std::move(ms));
  }

  int k() const { return static_cast<int>(matrices_.size()); }
  int dim() const { return matrices_.front().dim(); }
  /// 1-based, as in A_i.
  const Matrix& operator[](int i) const { return matrices_.at(static_cast<std::size_t>(i - 1)); }
  const std::vector<Matrix>& matrices() const { return matrices_; }
  double lambda_min(int i) const { return lambda_min_.at(static_cast<std::size_t>(i - 1)); }
  double norm(int i) const { return norm_.at(static_cast<std::size_t>(i - 1)); }
  /// delta_i with A_i >= (1/delta_i) I.
  double delta(int i) const { return 1.0 / lambda_min(i); }

  Environment<Scalar> environment(std::map<std::string, double> scalars = {}) const {
    return Environment<Scalar>::from_sequence(matrices_, std::move(scalars));
  }

  /// Same tuple scaled so that ||A_k|| = target.
  OperatorTuple normalized(double target) const {
    const double s = target / norm(k());
    std::vector<Matrix> ms;
    for (const auto& m : matrices_) ms.push_back(s * m);
    return OperatorTuple(std::move(ms));
  }

 private:
  std::vector<Matrix> matrices_;
  std::vector<double> lambda_min_;
  std::vector<double> norm_;
};

struct OrderedOptions {
  double gap = 0.0;
  /// Multiplier on the random increments H^* H; 0 gives k equal matrices.
  double increment_scale = 1.0;
};

/// A_1 = G^* G + 0.1 I and A_{i+1} = A_i + H_i^* H_i + gap I, so the tuple
/// is ordered by construction.
template <class Scalar = double>
OperatorTuple<Scalar> gen_ordered_tuple(int k, int dim, std::uint64_t seed, OrderedOptions options = {}) {
  if (k < 2) throw RangeError("gen_ordered_tuple: k must be >= 2");
  if (dim < 1) throw RangeError("gen_ordered_tuple: dim must be >= 1");
  if (options.gap < 0) throw RangeError("gen_ordered_tuple: gap must be >= 0");
  Rng rng(seed);
  const Dense<Scalar> id = Dense<Scalar>::Identity(dim, dim);
  Dense<Scalar> g = rng.gaussian<Scalar>(dim);
  Dense<Scalar> a = g.adjoint() * g + Scalar(0.1) * id;
  std::vector<HermitianMatrix<Scalar>> ms{HermitianMatrix<Scalar>::trusted(a)};
  for (int i = 1; i < k; ++i) {
    const Dense<Scalar> h = rng.gaussian<Scalar>(dim);
    a = a + Scalar(options.increment_scale) * (h.adjoint() * h) + Scalar(options.gap) * id;
    ms.push_back(HermitianMatrix<Scalar>::trusted(a));
  }
  return OperatorTuple<Scalar>(std::move(ms));
}

/// Adjacent Loewner comparisons A_{i+1} vs A_i, i = 1..k-1.
template <class Scalar>
std::vector<Verdict> check_conclusion(const OperatorTuple<Scalar>& tuple, double tol_rel = TolerancePolicy{}.tol_rel) {
  std::vector<Verdict> out;
  for (int i = 1; i < tuple.k(); ++i) out.push_back(loewner_compare(tuple[i + 1], tuple[i], tol_rel));
  return out;
}

template <class Scalar>
bool conclusion_holds(const OperatorTuple<Scalar>& tuple, double tol_rel = TolerancePolicy{}.tol_rel) {
  for (const auto& v : check_conclusion(tuple, tol_rel))
    if (!v.ge()) return false;
  return true;
}

/// Independent A_i = G_i^* G_i + 0.1 I, redrawn until some adjacent pair is
/// not ordered.
template <class Scalar = double>
OperatorTuple<Scalar> gen_unordered_tuple(int k, int dim, std::uint64_t seed, int max_attempts = 1000) {
  if (k < 2) throw RangeError("gen_unordered_tuple: k must be >= 2");
  if (dim < 1) throw RangeError("gen_unordered_tuple: dim must be >= 1");
  Rng rng(seed);
  const Dense<Scalar> id = Dense<Scalar>::Identity(dim, dim);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<HermitianMatrix<Scalar>> ms;
    for (int i = 0; i < k; ++i) {
      const Dense<Scalar> g = rng.gaussian<Scalar>(dim);
      ms.push_back(HermitianMatrix<Scalar>::trusted(g.adjoint() * g + Scalar(0.1) * id));
    }
    OperatorTuple<Scalar> t(std::move(ms));
    if (!conclusion_holds(t)) return t;
  }
  throw BudgetExhausted("gen_unordered_tuple: no unordered tuple within " + std::to_string(max_attempts) + " attempts");
}

/// First i with A_{i+1} not >= A_i, or 0 if ordered.
template <class Scalar>
int first_unordered_pair(const OperatorTuple<Scalar>& tuple, double tol_rel = TolerancePolicy{}.tol_rel) {
  const auto vs = check_conclusion(tuple, tol_rel);
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (!vs[i].ge()) return static_cast<int>(i) + 1;
  return 0;
}

}  // namespace oplab
