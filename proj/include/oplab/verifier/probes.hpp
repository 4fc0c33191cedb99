#pragma once

#include "oplab/evaluate.hpp"
#include "oplab/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oplab {

struct AlphaVerdict {
  double alpha = 0;
  Verdict verdict;
};

struct LoewnerHeinzReport {
  bool precondition_ok = false;   // P >= Q >= 0
  std::string skipped_reason;
  std::vector<AlphaVerdict> rows;

  /// P^a >= Q^a at every probed alpha.
  bool all_ge() const {
    if (!precondition_ok) return false;
    for (const auto& r : rows)
      if (!r.verdict.ge()) return false;
    return true;
  }
};

/// Compares P^a against Q^a for each alpha after checking P >= Q >= 0.
/// Powers use plain spectral calculus, so Q may be singular for a >= 0.
template <class Scalar>
LoewnerHeinzReport probe_loewner_heinz(const HermitianMatrix<Scalar>& p, const HermitianMatrix<Scalar>& q,
                                       const std::vector<double>& alphas, double tol_rel = TolerancePolicy{}.tol_rel) {
  LoewnerHeinzReport rep;
  const double tol = tol_rel * comparison_scale(operator_norm(p), operator_norm(q));
  if (!loewner_compare(p, q, tol_rel).ge()) {
    rep.skipped_reason = "P >= Q does not hold";
    return rep;
  }
  if (positivity_margin(q) < -tol) {
    rep.skipped_reason = "Q >= 0 does not hold";
    return rep;
  }
  rep.precondition_ok = true;
  auto power = [](const HermitianMatrix<Scalar>& h, double a) {
    if (a == 0.0) return HermitianMatrix<Scalar>::identity(h.dim());
    using Real = real_t<Scalar>;
    // Clamp rounding-level negative eigenvalues of a PSD input to zero.
    return HermitianMatrix<Scalar>::trusted(detail::apply_function(spectral_decompose(h), [a](const Real& x) {
      return x > Real(0) ? std::pow(x, Real(a)) : Real(0);
    }));
  };
  for (double a : alphas) rep.rows.push_back({a, loewner_compare(power(p, a), power(q, a), tol_rel)});
  return rep;
}

enum class Theorem12Direction {
  UPPER,   // P^{r+d} >= (P^{r/2} Q^s P^{r/2})^w for all s > 1  =>  Q <= I
  LOWER,   // P^{r+d} <= (P^{r/2} Q^s P^{r/2})^w for all s > 1  =>  Q >= I
};

enum class ImplicationStatus {
  CONFIRMED,   // hypothesis held on every probed s and the conclusion holds
  VACUOUS,     // hypothesis failed at some s
  VIOLATED,    // hypothesis held throughout but the conclusion fails
};

inline std::string to_string(ImplicationStatus s) {
  switch (s) {
    case ImplicationStatus::CONFIRMED: return "confirmed";
    case ImplicationStatus::VACUOUS: return "vacuous";
    case ImplicationStatus::VIOLATED: return "violated";
  }
  return "?";
}

struct SVerdict {
  double s = 0;
  double margin = 0;   // signed, positive when the hypothesis holds at s
  bool holds = false;
};

struct Theorem12Report {
  std::vector<SVerdict> rows;
  std::optional<double> first_violation_s;
  double probed_up_to = 0;
  Verdict conclusion;          // Q vs I
  bool conclusion_holds = false;
  ImplicationStatus status = ImplicationStatus::VACUOUS;
  /// Some eigenvalue of Q lies beyond 1 (UPPER) or below 1 (LOWER) by more than 1e-6.
  bool spectrum_crosses_one = false;
};

struct Theorem12Options {
  double tol_rel = TolerancePolicy{}.tol_rel;
  double escalation_factor = 2.0;
  double cap = 64.0;
  Theorem12Direction direction = Theorem12Direction::UPPER;
  EvalOptions eval{};
};

/// Evaluates the hypothesis of the implication over the s-grid, widening it
/// geometrically up to cap while the hypothesis keeps holding.
template <class Scalar>
Theorem12Report probe_theorem_1_2(const HermitianMatrix<Scalar>& p, const HermitianMatrix<Scalar>& q, double r,
                                  double delta, double w, std::vector<double> s_grid,
                                  const Theorem12Options& options = {}) {
  if (!(r > 0)) throw RangeError("probe_theorem_1_2: r must be > 0");
  if (!(r + delta > 0)) throw RangeError("probe_theorem_1_2: r + delta must be > 0");
  if (!(w > 0 && w <= 1)) throw RangeError("probe_theorem_1_2: w must lie in (0, 1]; w = 0 is degenerate");
  if (s_grid.empty()) throw RangeError("probe_theorem_1_2: empty s-grid");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > 1)) throw RangeError("probe_theorem_1_2: every s must exceed 1");
    if (i && !(s_grid[i] > s_grid[i - 1])) throw RangeError("probe_theorem_1_2: s-grid must be ascending");
  }
  if (positivity_margin(p) <= 0 || positivity_margin(q) <= 0)
    throw RangeError("probe_theorem_1_2: P and Q must be strictly positive");

  const bool upper = options.direction == Theorem12Direction::UPPER;
  const auto env = Environment<Scalar>::from_sequence({p, q}, {});
  WordEvaluator<Scalar> ev(options.eval);
  const auto lhs = ev.evaluate(OperatorWord::symbol(1, ScalarExpr::literal(r + delta)), env);
  Theorem12Report rep;
  auto probe = [&](double s) {
    const auto half = OperatorWord::symbol(1, ScalarExpr::literal(r / 2));
    const auto word = OperatorWord::power(OperatorWord::sandwich(half, OperatorWord::symbol(2, ScalarExpr::literal(s))),
                                          ScalarExpr::literal(w));
    const auto rhs = ev.evaluate(word, env);
    const Verdict v = loewner_compare(lhs, rhs, options.tol_rel);
    const double margin = upper ? min_eigen_difference(lhs, rhs) : min_eigen_difference(rhs, lhs);
    const bool holds = upper ? v.ge() : v.le();
    rep.rows.push_back({s, margin, holds});
    rep.probed_up_to = s;
    if (!holds && !rep.first_violation_s) rep.first_violation_s = s;
    return holds;
  };
  bool all = true;
  for (double s : s_grid) all = probe(s) && all;
  for (double s = s_grid.back() * options.escalation_factor; all && s <= options.cap; s *= options.escalation_factor)
    all = probe(s);

  const auto id = HermitianMatrix<Scalar>::identity(q.dim());
  rep.conclusion = loewner_compare(q, id, options.tol_rel);
  rep.conclusion_holds = upper ? rep.conclusion.le() : rep.conclusion.ge();
  const auto ev_q = spectral_decompose(q).eigenvalues;
  rep.spectrum_crosses_one = upper ? to_double(ev_q(ev_q.size() - 1)) > 1 + 1e-6 : to_double(ev_q(0)) < 1 - 1e-6;
  if (rep.first_violation_s) {
    rep.status = ImplicationStatus::VACUOUS;
  } else {
    rep.status = rep.conclusion_holds ? ImplicationStatus::CONFIRMED : ImplicationStatus::VIOLATED;
  }
  return rep;
}

}  // namespace oplab
