#pragma once

#include "oplab/dsl.hpp"
#include "oplab/errors.hpp"
#include "oplab/operator_word.hpp"
#include "oplab/scalar.hpp"
#include "oplab/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oplab {

/// Scalar bindings plus symbol-indexed matrices sharing one dimension.
/// Immutable; with_scalars() shares the matrix table.
template <class Scalar>
class Environment {
 public:
  using Matrix = HermitianMatrix<Scalar>;

  Environment(std::map<int, Matrix> matrices, std::map<std::string, double> scalars)
      : matrices_(std::make_shared<const std::map<int, Matrix>>(std::move(matrices))), scalars_(std::move(scalars)) {
    for (const auto& [index, m] : *matrices_) {
      if (index < 1) throw RangeError("Environment: matrix index must be >= 1");
      if (dim_ == 0) dim_ = m.dim();
      if (m.dim() != dim_) throw DimensionMismatch(dim_, m.dim(), "Environment");
    }
  }

  /// A_1..A_k from a sequence.
  static Environment from_sequence(const std::vector<Matrix>& ms, std::map<std::string, double> scalars) {
    std::map<int, Matrix> table;
    for (std::size_t i = 0; i < ms.size(); ++i) table.emplace(static_cast<int>(i) + 1, ms[i]);
    return Environment(std::move(table), std::move(scalars));
  }

  Environment with_scalars(std::map<std::string, double> scalars) const {
    Environment e = *this;
    e.scalars_ = std::move(scalars);
    return e;
  }

  const Matrix& matrix(int index) const {
    auto it = matrices_->find(index);
    if (it == matrices_->end()) throw UnboundName("A" + std::to_string(index));
    return it->second;
  }

  double scalar(const std::string& name) const {
    auto it = scalars_.find(name);
    if (it == scalars_.end()) throw UnboundName(name);
    return it->second;
  }

  const std::map<std::string, double>& scalars() const { return scalars_; }
  int dim() const { return dim_; }
  const void* matrix_table_id() const { return matrices_.get(); }

 private:
  std::shared_ptr<const std::map<int, Matrix>> matrices_;
  std::map<std::string, double> scalars_;
  int dim_ = 0;
};

struct EvalOptions {
  /// Residual bound (relative to the Frobenius norm) for treating an
  /// intermediate or final product as Hermitian.
  double hermitian_rel = 1e-8;
  /// A power node is accepted at a precision tier with D decimal digits only
  /// when min|lambda| / max|lambda| > 10^-(D - guard_digits).
  int guard_digits = 7;
  /// Tiers tried, inclusive; 0 is double. Raising min_tier forces extra
  /// precision, which is how the tier choice itself is cross-checked.
  int min_tier = 0;
  int max_tier = 8;
  TolerancePolicy policy{};
};

/// Working precisions tried in order: double, then MPFR with the listed
/// decimal digits.
using PrecisionTiers = std::tuple<double, MpReal<40>, MpReal<80>, MpReal<160>, MpReal<320>, MpReal<640>, MpReal<1280>,
                                  MpReal<2560>, MpReal<5120>>;
inline constexpr int kTierCount = static_cast<int>(std::tuple_size_v<PrecisionTiers>);

namespace detail {

struct Escalate {};

/// Word with every exponent resolved to a number; `key` identifies the
/// subword value for caching across evaluations.
struct ResolvedNode {
  enum Kind { SymbolNode, ProductNode, PowerNode } kind;
  int index = 0;
  double exponent = 0.0;
  std::vector<ResolvedNode> children;
  std::string key;
};

template <class Scalar>
ResolvedNode resolve(const OperatorWord& w, const Environment<Scalar>& env) {
  auto lookup = [&](const std::string& n) { return env.scalar(n); };
  ResolvedNode node;
  if (w.is_symbol()) {
    const auto& s = w.as_symbol();
    node.kind = ResolvedNode::SymbolNode;
    node.index = s.index;
    node.exponent = s.exponent.resolve(lookup);
    env.matrix(s.index);
    node.key = "A" + std::to_string(s.index) + "^" + format_number(node.exponent);
  } else if (w.is_power()) {
    const auto& p = w.as_power();
    node.kind = ResolvedNode::PowerNode;
    node.exponent = p.exponent.resolve(lookup);
    node.children.push_back(resolve(*p.base, env));
    node.key = "(" + node.children[0].key + ")^" + format_number(node.exponent);
  } else {
    node.kind = ResolvedNode::ProductNode;
    node.key = "[";
    for (const auto& f : w.as_product().factors) {
      node.children.push_back(resolve(f, env));
      node.key += node.children.back().key + " ";
    }
    node.key += "]";
  }
  return node;
}

template <class Real>
bool all_finite(const Dense<Real>& m) {
  if constexpr (std::is_same_v<Real, double>) {
    return m.allFinite();
  } else {
    return true;
  }
}

}  // namespace detail

/// Evaluates operator words against an environment. Each word is first tried
/// in double precision; if any power node is too ill-conditioned for the
/// working precision, the whole word is re-evaluated at the next tier.
/// Subword values are cached per tier, so repeated evaluation over parameter
/// grids reuses shared prefixes. Not thread-safe; use one per worker.
template <class Scalar>
class WordEvaluator {
 public:
  explicit WordEvaluator(EvalOptions options = {}) : options_(options) {}

  /// General (possibly non-Hermitian) value of the word.
  Dense<Scalar> evaluate_dense(const OperatorWord& word, const Environment<Scalar>& env) {
    bind(env);
    const detail::ResolvedNode root = detail::resolve(word, env);
    for (int tier = std::max(0, options_.min_tier); tier <= std::min(options_.max_tier, kTierCount - 1); ++tier) {
      try {
        Dense<Scalar> out;
        with_tier(tier, [&]<class Real>(std::type_identity<Real>) {
          const Dense<Real> m = eval_node<Real>(root, env, tier);
          out = to_scalar(m);
        });
        last_tier_ = tier;
        return out;
      } catch (const detail::Escalate&) {
        continue;
      }
    }
    throw Error("evaluate: precision tiers exhausted");
  }

  HermitianMatrix<Scalar> evaluate(const OperatorWord& word, const Environment<Scalar>& env) {
    const Dense<Scalar> m = evaluate_dense(word, env);
    const double residual = to_double((m - m.adjoint()).norm());
    const double bound = options_.hermitian_rel * std::max(1.0, to_double(m.norm()));
    if (!(residual <= bound)) {
      if (word.is_palindromic())
        throw ConsistencyError("evaluate: palindromic word produced a non-Hermitian value (residual " +
                               std::to_string(residual) + ")");
      throw NotHermitian(residual, bound);
    }
    return HermitianMatrix<Scalar>::trusted(m);
  }

  /// Tier used by the most recent successful evaluation (0 = double).
  int last_tier() const { return last_tier_; }

  void clear() {
    std::apply([](auto&... caches) { (caches.clear(), ...); }, caches_);
    failed_.clear();
    entries_ = 0;
  }

 private:
  template <class Real>
  using Cache = std::unordered_map<std::string, Dense<Real>>;

  template <class F, std::size_t... I>
  static void with_tier_impl(int tier, F&& f, std::index_sequence<I...>) {
    ((tier == static_cast<int>(I) ? (f(std::type_identity<std::tuple_element_t<I, PrecisionTiers>>{}), 0) : 0), ...);
  }
  template <class F>
  static void with_tier(int tier, F&& f) {
    with_tier_impl(tier, std::forward<F>(f), std::make_index_sequence<kTierCount>{});
  }

  template <class Real>
  Cache<Real>& cache() {
    return std::get<Cache<Real>>(caches_);
  }

  void bind(const Environment<Scalar>& env) {
    if (env.matrix_table_id() != bound_table_) {
      clear();
      bound_table_ = env.matrix_table_id();
    }
    if (entries_ > kMaxEntries) clear();
  }

  template <class Real>
  Dense<Scalar> to_scalar(const Dense<Real>& m) const {
    if constexpr (is_complex_v<Scalar>) {
      const auto out = derealify<Real>(m);
      if (!out.allFinite()) throw Error("evaluate: result not representable in double precision");
      return out;
    } else {
      const Dense<double> out = cast_dense<double>(m);
      if (!out.allFinite()) throw Error("evaluate: result not representable in double precision");
      return out;
    }
  }

  template <class Real>
  Dense<Real> input(const Environment<Scalar>& env, int index) const {
    const auto& a = env.matrix(index).dense();
    if constexpr (is_complex_v<Scalar>) {
      return realify<Real>(a);
    } else {
      return cast_dense<Real>(a);
    }
  }

  template <class Real>
  Dense<Real> eval_node(const detail::ResolvedNode& node, const Environment<Scalar>& env, int tier) {
    if (auto it = failed_.find(node.key); it != failed_.end() && it->second >= tier) throw detail::Escalate{};
    auto& c = cache<Real>();
    if (auto it = c.find(node.key); it != c.end()) return it->second;
    try {
      Dense<Real> value = compute<Real>(node, env, tier);
      if (!detail::all_finite(value)) throw detail::Escalate{};
      c.emplace(node.key, value);
      ++entries_;
      return value;
    } catch (const detail::Escalate&) {
      int& f = failed_[node.key];
      f = std::max(f, tier);
      throw;
    }
  }

  template <class Real>
  Dense<Real> compute(const detail::ResolvedNode& node, const Environment<Scalar>& env, int tier) {
    switch (node.kind) {
      case detail::ResolvedNode::SymbolNode: {
        const auto& a = env.matrix(node.index);
        if (node.exponent < 0 || !detail::is_integer_exponent(node.exponent)) {
          // Inputs must clear the ordinary positivity gate before any tier is tried.
          const auto ev = spectral_decompose(a).eigenvalues;
          const double lo = to_double(ev(0));
          const double gate = eps_pd(std::max(std::abs(lo), std::abs(to_double(ev(ev.size() - 1)))), options_.policy);
          if (!(lo > gate)) throw NearSingular(lo, gate);
        }
        return power<Real>(input<Real>(env, node.index), node.exponent, tier);
      }
      case detail::ResolvedNode::ProductNode: {
        Dense<Real> acc = eval_node<Real>(node.children[0], env, tier);
        for (std::size_t i = 1; i < node.children.size(); ++i) acc = acc * eval_node<Real>(node.children[i], env, tier);
        return acc;
      }
      case detail::ResolvedNode::PowerNode: {
        const Dense<Real> base = eval_node<Real>(node.children[0], env, tier);
        const Real scale = base.norm();
        const Real residual = (base - base.transpose()).norm();
        if (residual > Real(options_.hermitian_rel) * (scale > Real(1) ? scale : Real(1)))
          throw ConsistencyError("evaluate: power applied to a non-Hermitian subword " + node.children[0].key);
        return power<Real>(base, node.exponent, tier);
      }
    }
    throw Error("evaluate: unknown node");
  }

  template <class Real>
  Dense<Real> power(const Dense<Real>& h, double alpha, int tier) const {
    using std::abs;
    using std::pow;
    const Eigen::Index n = h.rows();
    if (alpha == 0.0) return Dense<Real>::Identity(n, n);
    const Dense<Real> sym = (h + h.transpose()) * Real(0.5);
    if (alpha == 1.0) return sym;
    const bool top = tier >= std::min(options_.max_tier, kTierCount - 1);
    const auto d = jacobi_eigen<Real>(sym);
    const Real lo = d.eigenvalues(0);
    const Real hi = d.eigenvalues(n - 1);
    Real max_abs = abs(lo) > abs(hi) ? abs(lo) : abs(hi);
    Real min_abs = max_abs;
    for (Eigen::Index i = 0; i < n; ++i)
      if (abs(d.eigenvalues(i)) < min_abs) min_abs = abs(d.eigenvalues(i));
    const bool needs_positive = alpha < 0 || !detail::is_integer_exponent(alpha);
    const Real threshold = pow(Real(10), Real(-(decimal_digits<Real>() - options_.guard_digits)));
    const bool well_conditioned = max_abs > Real(0) && min_abs > threshold * max_abs;
    if (needs_positive && !(lo > Real(0) && well_conditioned)) {
      if (top) throw NearSingular(to_double(lo), to_double(threshold * max_abs));
      throw detail::Escalate{};
    }
    if (!well_conditioned && !top && max_abs > Real(0)) throw detail::Escalate{};
    const Real a(alpha);
    Dense<Real> scaled = d.eigenvectors;
    for (Eigen::Index k = 0; k < n; ++k) scaled.col(k) *= pow(d.eigenvalues(k), a);
    return scaled * d.eigenvectors.transpose();
  }

  template <class T>
  struct CacheTuple;
  template <class... T>
  struct CacheTuple<std::tuple<T...>> {
    using type = std::tuple<Cache<T>...>;
  };

  static constexpr std::size_t kMaxEntries = 50000;

  EvalOptions options_;
  typename CacheTuple<PrecisionTiers>::type caches_;
  std::unordered_map<std::string, int> failed_;
  const void* bound_table_ = nullptr;
  std::size_t entries_ = 0;
  int last_tier_ = 0;
};

/// One-shot evaluation of a word that denotes a Hermitian matrix.
template <class Scalar>
HermitianMatrix<Scalar> evaluate(const OperatorWord& word, const Environment<Scalar>& env, const EvalOptions& options = {}) {
  WordEvaluator<Scalar> ev(options);
  return ev.evaluate(word, env);
}

template <class Scalar>
Dense<Scalar> evaluate_dense(const OperatorWord& word, const Environment<Scalar>& env, const EvalOptions& options = {}) {
  WordEvaluator<Scalar> ev(options);
  return ev.evaluate_dense(word, env);
}

}  // namespace oplab
