#pragma once

#include "oplab/chain.hpp"
#include "oplab/evaluate.hpp"
#include "oplab/verifier/campaign.hpp"
#include "oplab/verifier/tuple.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oplab {

/// Pieces of the first ascending hypothesis used by the proof of the order
/// A_2 >= A_1. With Y_1 = A_2^{-t1/2} A_1^{p1} A_2^{-t1/2} and layers
/// Y_j = B_j^{e_j} Y_{j-1}^{p_j} B_j^{e_j}:
///   inner  W   = Y_{2n-1}^{p_2n}, the word between the A_k^{r/2} factors;
///   bound  Z_1 from Z_{2n-1} = I, Z_j = (B^{-e} Z_{j+1} B^{-e})^{1/p_{j+1}};
///   scalar c_1 from c_{2n-1} = 1, c_j = (c_{j+1} ||B^{-2e}||)^{1/p_{j+1}}.
struct ProofWords {
  OperatorWord inner;
  OperatorWord left;
  OperatorWord bound;   // Z_1; the identity word A_1^{0} when n = 1
};

inline ProofWords proof_words(int k) {
  const int n = chain_n(k);
  const ChainInequality first = build_chain(Family::ASCENDING, 1, k);
  const OperatorWord inner = first.rhs.as_power().base->as_product().factors.at(1);
  const OperatorWord left =
      OperatorWord::sandwich(OperatorWord::symbol(ascending_index(1, 1, k), layer_exponent(1, n)),
                             OperatorWord::symbol(ascending_index(1, 0, k), ScalarExpr::name("p1")));
  if (n == 1) return {inner, left, OperatorWord::symbol(1, ScalarExpr::literal(0))};

  // Z_{2n-2} = A^{t_n} ^ (1/p_{2n-1}) with A = B_{2n-1}; then wrap outward.
  std::optional<OperatorWord> z;
  for (int j = 2 * n - 2; j >= 1; --j) {
    const int layer = j + 1;
    const int b = ascending_index(1, layer, k);
    const int i = (layer + 1) / 2;
    const bool odd = layer % 2 == 1;
    // B^{-e}: odd layers carry e = -t_i/2, even layers +t_i/2.
    const auto neg_e = ScalarExpr::name(indexed_name('t', i), !odd, 2.0);
    OperatorWord inner_z = z ? OperatorWord::sandwich(OperatorWord::symbol(b, neg_e), *z)
                             : OperatorWord::symbol(b, ScalarExpr::name(indexed_name('t', i)));
    // Evaluated under reciprocal_bindings, so p_{j+1} reads as 1/p_{j+1}.
    z = OperatorWord::power(std::move(inner_z), ScalarExpr::name(indexed_name('p', j + 1), false, std::nullopt));
  }
  return {inner, left, *z};
}

/// Binds p_j to 1/p_j so the bound word's exponents read as reciprocals.
inline std::map<std::string, double> reciprocal_bindings(const ParamSet& ps) {
  auto b = ps.bindings();
  for (int j = 1; j <= static_cast<int>(ps.p.size()); ++j) b[indexed_name('p', j)] = 1.0 / ps.p[j - 1];
  return b;
}

/// c_1 of the scalar bound, from operator norms and delta_i = 1/lambda_min.
template <class Scalar>
double scalar_bound(const OperatorTuple<Scalar>& tuple, const ParamSet& ps) {
  const int k = tuple.k();
  const int n = chain_n(k);
  double c = 1.0;
  for (int j = 2 * n - 2; j >= 1; --j) {
    const int layer = j + 1;
    const int b = ascending_index(1, layer, k);
    const double t = ps.t[(layer + 1) / 2 - 1];
    const double f = layer % 2 == 1 ? std::pow(tuple.norm(b), t) : std::pow(tuple.delta(b), t);
    c = std::pow(c * f, 1.0 / ps.p[j]);
  }
  return c;
}

struct ProofStepRow {
  std::vector<double> p;
  Outcome premise = Outcome::ERROR;   // the first ascending hypothesis itself
  double premise_margin = 0;
  Verdict inner_le_identity;          // (a) W <= I
  Verdict left_le_bound;              // (b) Y_1 <= Z_1
  Verdict left_le_scalar;             // (c) Y_1 <= c I
  Verdict bound_le_scalar;            //     Z_1 <= c I
  double c = 1;
  double worst_relative_margin = std::numeric_limits<double>::infinity();
  std::string error;

  bool all_hold() const {
    return inner_le_identity.le() && left_le_bound.le() && left_le_scalar.le() && bound_le_scalar.le();
  }
};

struct ProofReport {
  std::vector<ProofStepRow> rows;
  /// Rows whose premise held.
  std::size_t premise_rows() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.premise == Outcome::HOLDS;
    return n;
  }
  /// Sub-check failures on rows where the premise held.
  std::size_t red_flags() const {
    std::size_t n = 0;
    for (const auto& r : rows)
      if (r.premise == Outcome::HOLDS && !r.all_hold()) ++n;
    return n;
  }
  /// Smallest sub-check margin divided by its comparison scale.
  double worst_relative_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
      if (r.premise == Outcome::HOLDS) m = std::min(m, r.worst_relative_margin);
    return m;
  }
};

/// Replays the proof of A_2 >= A_1 from the first ascending hypothesis at
/// every p-vector: the hypothesis itself, then (a) W <= I, (b) Y_1 <= Z_1 and
/// (c) Y_1 <= c I.
template <class Scalar>
ProofReport replicate_proof_steps(const OperatorTuple<Scalar>& tuple, const ChainTemplate& chain,
                                  const std::vector<std::vector<double>>& points, const WeightPolicy& policy,
                                  const CheckOptions& options = {}) {
  chain.validate();
  if (chain.k != tuple.k()) throw RangeError("replicate_proof_steps: template k does not match the tuple");
  const ChainInequality first = build_chain(Family::ASCENDING, 1, chain.k);
  const ProofWords pw = proof_words(chain.k);
  WordEvaluator<Scalar> ev(options.eval);
  const auto base_env = tuple.environment();
  const auto id = HermitianMatrix<Scalar>::identity(tuple.dim());
  ProofReport rep;
  for (const auto& p : points) {
    const ParamSet ps = chain.with(p, policy);
    const auto env = base_env.with_scalars(ps.bindings());
    ProofStepRow row;
    row.p = p;
    const CampaignRow premise = evaluate_hypothesis(first, tuple, ps, ev, env, options);
    row.premise = premise.verdict;
    row.premise_margin = premise.margin;
    row.error = premise.error;
    if (premise.verdict == Outcome::HOLDS) {
      try {
        const auto w = ev.evaluate(pw.inner, env);
        const auto y = ev.evaluate(pw.left, env);
        const auto z = ev.evaluate(pw.bound, base_env.with_scalars(reciprocal_bindings(ps)));
        row.c = scalar_bound(tuple, ps);
        const auto c_id = row.c * id;
        // Each verdict carries the margin lambda_min(rhs - lhs) of its "<=" claim.
        auto le_check = [&](const HermitianMatrix<Scalar>& a, const HermitianMatrix<Scalar>& b) {
          Verdict v = loewner_compare(a, b, options.tol_rel);
          v.margin = min_eigen_difference(b, a);
          row.worst_relative_margin = std::min(row.worst_relative_margin, v.margin * options.tol_rel / v.tol);
          return v;
        };
        row.inner_le_identity = le_check(w, id);
        row.left_le_bound = le_check(y, z);
        row.left_le_scalar = le_check(y, c_id);
        row.bound_le_scalar = le_check(z, c_id);
      } catch (const Error& e) {
        row.error = e.what();
        row.premise = Outcome::ERROR;
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

struct LimitReport {
  std::vector<double> p2;
  std::vector<double> sequence;   // interior^{1/p2}
  double interior = 1;
  bool monotone_nonincreasing = true;
  double final_gap = 0;            // sequence.back() - 1
  double lambda_max = 0;           // of A_2^{-1/2} A_1 A_2^{-1/2}
  bool below_every_bound = true;   // lambda_max <= each sequence value (within tol)
  /// lambda_max <= 1 + 1e-6: the limit bound, i.e. A_2 >= A_1.
  bool declares_ordered = false;
};

inline std::vector<double> default_limit_p2() { return {1.0, 10.0, 100.0, 1000.0, 10000.0}; }

/// c^{1/p2} for each p2.
inline LimitReport limit_sequence(double interior, const std::vector<double>& p2s = default_limit_p2()) {
  if (!(interior > 0)) throw RangeError("limit_probe: bound must be positive");
  LimitReport rep;
  rep.interior = interior;
  rep.p2 = p2s;
  for (double p2 : p2s) {
    if (!(p2 >= 1)) throw RangeError("limit_probe: p2 must be >= 1");
    rep.sequence.push_back(std::pow(interior, 1.0 / p2));
  }
  for (std::size_t i = 1; i < rep.sequence.size(); ++i)
    if (rep.sequence[i] > rep.sequence[i - 1] * (1 + 1e-15)) rep.monotone_nonincreasing = false;
  rep.final_gap = rep.sequence.back() - 1.0;
  return rep;
}

/// The closing step of the proof: with t_1 = p_1 = 1 the scalar bound on
/// A_2^{-1/2} A_1 A_2^{-1/2} is interior^{1/p2} with an interior free of p2.
/// `chain` supplies t_2.., and `p_rest` supplies p_3..p_2n.
template <class Scalar>
LimitReport limit_probe(const OperatorTuple<Scalar>& tuple, const ChainTemplate& chain, const std::vector<double>& p_rest,
                        const std::vector<double>& p2s = default_limit_p2(), double tol_rel = TolerancePolicy{}.tol_rel) {
  const int n = chain_n(tuple.k());
  if (static_cast<int>(p_rest.size()) != 2 * n - 2) throw RangeError("limit_probe: expected 2n-2 values p_3..p_2n");
  ParamSet ps{n, tuple.k(), chain.t, {}, chain.r, std::vector<double>(tuple.k() - 1, 1.0)};
  ps.t.at(0) = 1.0;
  ps.p = {1.0, 1.0};
  ps.p.insert(ps.p.end(), p_rest.begin(), p_rest.end());
  // c_1 = (c_2 delta_3^{t_1})^{1/p_2}: evaluate with p_2 = 1 to get the interior.
  LimitReport rep = limit_sequence(scalar_bound(tuple, ps), p2s);
  const auto y = evaluate(OperatorWord::sandwich(OperatorWord::symbol(2, ScalarExpr::literal(-0.5)),
                                                 OperatorWord::symbol(1, ScalarExpr::literal(1))),
                          tuple.environment());
  const auto ev = spectral_decompose(y).eigenvalues;
  rep.lambda_max = to_double(ev(ev.size() - 1));
  for (double b : rep.sequence)
    if (rep.lambda_max > b + tol_rel * std::max(1.0, b)) rep.below_every_bound = false;
  rep.declares_ordered = rep.lambda_max <= 1.0 + 1e-6;
  return rep;
}

}  // namespace oplab
