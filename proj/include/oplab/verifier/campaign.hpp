#pragma once

#include "oplab/chain.hpp"
#include "oplab/evaluate.hpp"
#include "oplab/spectral.hpp"
#include "oplab/verifier/pgrid.hpp"
#include "oplab/verifier/tuple.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace oplab {

enum class WeightKind { FIXED, NECESSITY };

/// How w_1..w_{k-1} are chosen for each p-vector.
struct WeightPolicy {
  WeightKind kind = WeightKind::NECESSITY;
  std::vector<double> fixed;   // one value (broadcast) or k-1 values

  static WeightPolicy necessity() { return {}; }
  static WeightPolicy fixed_weights(std::vector<double> w) { return {WeightKind::FIXED, std::move(w)}; }

  /// "necessity" or "fixed:<csv>".
  static WeightPolicy parse(const std::string& text) {
    if (text == "necessity") return necessity();
    if (text.rfind("fixed:", 0) == 0) return fixed_weights(parse_csv_numbers(text.substr(6), "--weights"));
    throw RangeError("--weights: expected 'necessity' or 'fixed:<csv>', got '" + text + "'");
  }

  std::string to_string() const {
    if (kind == WeightKind::NECESSITY) return "necessity";
    std::string s = "fixed:";
    for (std::size_t i = 0; i < fixed.size(); ++i) s += (i ? "," : "") + format_number(fixed[i]);
    return s;
  }

  std::vector<double> weights(const ParamSet& partial) const {
    const int m = partial.k - 1;
    if (kind == WeightKind::NECESSITY) return std::vector<double>(m, necessity_weight(partial));
    if (fixed.size() == 1) return std::vector<double>(m, fixed.front());
    if (static_cast<int>(fixed.size()) != m)
      throw RangeError("fixed weights: expected 1 or " + std::to_string(m) + " values, got " + std::to_string(fixed.size()));
    return fixed;
  }
};

/// The p-independent part of a ParamSet.
struct ChainTemplate {
  int k = 3;
  std::vector<double> t;
  double r = 1.0;

  ParamSet with(const std::vector<double>& p, const WeightPolicy& policy) const {
    ParamSet ps{chain_n(k), k, t, p, r, std::vector<double>(k - 1, 1.0)};
    ps.w = policy.weights(ps);
    ps.validate();
    return ps;
  }

  void validate() const {
    ParamSet ps{chain_n(k), k, t, std::vector<double>(2 * chain_n(k), 1.0), r, std::vector<double>(k - 1, 1.0)};
    ps.validate();
  }

  /// t_i ~ U[0.05, 0.95], r = t_n + U(0.1, 2).
  static ChainTemplate sample(int k, Rng& rng) {
    ChainTemplate c;
    c.k = k;
    for (int i = 0; i < chain_n(k); ++i) c.t.push_back(rng.uniform(0.05, 0.95));
    c.r = c.t.back() + rng.uniform(0.1, 2.0);
    return c;
  }
};

enum class Outcome { HOLDS, FAILS, ERROR };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::HOLDS: return "holds";
    case Outcome::FAILS: return "fails";
    case Outcome::ERROR: return "error";
  }
  return "?";
}

struct CampaignRow {
  int instance_id = 0;
  int k = 0;
  int dim = 0;
  Family family = Family::ASCENDING;
  int member = 0;
  int ordinal = 0;
  std::vector<double> p;
  double w = 0;
  Relation relation = Relation::INCOMPARABLE;   // observed order between lhs and rhs
  /// lambda_min of (lhs - rhs) for ">=" rows and of (rhs - lhs) for "<=" rows;
  /// negative means the inequality fails.
  double margin = 0;
  double scale = 1;                              // max(1, ||lhs||, ||rhs||)
  Outcome verdict = Outcome::ERROR;
  std::string error;
  double seconds = 0;
  int precision_tier = 0;

  double relative_margin() const { return margin / scale; }
};

inline std::string join_numbers(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_number(v[i]);
  }
  return s;
}

struct CampaignSummary {
  std::size_t rows = 0;
  std::size_t holds = 0;
  std::size_t fails = 0;
  std::size_t errors = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_relative_margin = std::numeric_limits<double>::infinity();
};

struct CampaignReport {
  std::vector<CampaignRow> rows;

  CampaignSummary summary() const {
    CampaignSummary s;
    s.rows = rows.size();
    for (const auto& r : rows) {
      if (r.verdict == Outcome::HOLDS) ++s.holds;
      if (r.verdict == Outcome::FAILS) ++s.fails;
      if (r.verdict == Outcome::ERROR) ++s.errors;
      if (r.verdict != Outcome::ERROR) {
        s.worst_margin = std::min(s.worst_margin, r.margin);
        s.worst_relative_margin = std::min(s.worst_relative_margin, r.relative_margin());
      }
    }
    return s;
  }

  void append(const CampaignReport& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

  static constexpr const char* kHeader = "instance_id,k,dim,family,member,p_vector,w,relation,margin,verdict,seconds";

  void write_csv(std::ostream& out) const {
    out << kHeader << '\n';
    for (const auto& r : rows) {
      out << r.instance_id << ',' << r.k << ',' << r.dim << ',' << to_string(r.family) << ',' << r.member << ','
          << join_numbers(r.p, ';') << ',' << format_number(r.w) << ',' << to_string(r.relation) << ','
          << (r.verdict == Outcome::ERROR ? std::string("nan") : format_number(r.margin)) << ',' << to_string(r.verdict)
          << ',' << std::fixed << std::setprecision(6) << r.seconds << std::defaultfloat << '\n';
    }
  }

  nlohmann::json summary_json() const {
    const auto s = summary();
    nlohmann::json j{{"rows", s.rows}, {"holds", s.holds}, {"fails", s.fails}, {"errors", s.errors}};
    j["worst_margin"] = std::isfinite(s.worst_margin) ? nlohmann::json(s.worst_margin) : nlohmann::json(nullptr);
    j["worst_relative_margin"] =
        std::isfinite(s.worst_relative_margin) ? nlohmann::json(s.worst_relative_margin) : nlohmann::json(nullptr);
    return j;
  }
};

struct CheckOptions {
  double tol_rel = TolerancePolicy{}.tol_rel;
  /// Stop at the first failing or erroring row.
  bool stop_at_first_failure = false;
  int instance_id = 0;
  EvalOptions eval{};
};

/// Evaluates one hypothesis at one parameter point.
template <class Scalar>
CampaignRow evaluate_hypothesis(const ChainInequality& ci, const OperatorTuple<Scalar>& tuple, const ParamSet& ps,
                                WordEvaluator<Scalar>& ev, const Environment<Scalar>& env, const CheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CampaignRow row;
  row.instance_id = options.instance_id;
  row.k = tuple.k();
  row.dim = tuple.dim();
  row.family = ci.family;
  row.member = ci.member;
  row.ordinal = ci.ordinal;
  row.p = ps.p;
  row.w = ps.w.at(static_cast<std::size_t>(ci.ordinal - 1));
  try {
    const auto lhs = ev.evaluate(ci.lhs, env);
    const auto rhs = ev.evaluate(ci.rhs, env);
    row.precision_tier = ev.last_tier();
    const Verdict v = loewner_compare(lhs, rhs, options.tol_rel);
    row.relation = v.relation;
    row.scale = comparison_scale(operator_norm(lhs), operator_norm(rhs));
    row.margin = ci.relation == Relation::GE ? min_eigen_difference(lhs, rhs) : min_eigen_difference(rhs, lhs);
    const bool holds = ci.relation == Relation::GE ? v.ge() : v.le();
    row.verdict = holds ? Outcome::HOLDS : Outcome::FAILS;
  } catch (const Error& e) {
    row.verdict = Outcome::ERROR;
    row.error = e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

/// Every hypothesis for tuple.k() at every p-vector in `points` (taken in the
/// given order). Evaluation errors become ERROR rows.
template <class Scalar>
CampaignReport check_hypotheses(const OperatorTuple<Scalar>& tuple, const ChainTemplate& chain,
                                const std::vector<std::vector<double>>& points, const WeightPolicy& policy,
                                const CheckOptions& options, WordEvaluator<Scalar>& ev) {
  if (chain.k != tuple.k())
    throw RangeError("check_hypotheses: template k=" + std::to_string(chain.k) + " but tuple has " +
                     std::to_string(tuple.k()) + " operators");
  chain.validate();
  const auto hyps = hypothesis_set(chain.k);
  CampaignReport report;
  ev.clear();
  const auto base_env = tuple.environment();
  for (const auto& p : points) {
    const ParamSet ps = chain.with(p, policy);
    const auto env = base_env.with_scalars(ps.bindings());
    for (const auto& ci : hyps) {
      report.rows.push_back(evaluate_hypothesis(ci, tuple, ps, ev, env, options));
      if (options.stop_at_first_failure && report.rows.back().verdict != Outcome::HOLDS) return report;
    }
  }
  return report;
}

template <class Scalar>
CampaignReport check_hypotheses(const OperatorTuple<Scalar>& tuple, const ChainTemplate& chain, const PGrid& grid,
                                const WeightPolicy& policy, const CheckOptions& options = {}) {
  grid.validate();
  auto points = grid_points(grid.values, 2 * chain_n(chain.k), 10000, static_cast<std::uint64_t>(options.instance_id));
  sort_by_psi(points, chain.t);
  WordEvaluator<Scalar> ev(options.eval);
  return check_hypotheses(tuple, chain, points, policy, options, ev);
}

}  // namespace oplab
