#pragma once

#include "oplab/verifier/campaign.hpp"
#include "oplab/verifier/parallel.hpp"
#include "oplab/verifier/pgrid.hpp"
#include "oplab/verifier/random.hpp"
#include "oplab/verifier/tuple.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oplab {

struct SearchConfig {
  int k = 3;
  int dim_min = 2;
  int dim_max = 6;
  std::uint64_t seed = 42;
  int budget = 200;
  PGrid grid{};
  WeightPolicy weights = WeightPolicy::necessity();
  /// Draw ordered tuples instead of unordered ones (a control run).
  bool ordered = false;
  double tol_rel = TolerancePolicy{}.tol_rel;
  int jobs = 1;
  std::size_t max_points = 10000;
  /// Candidates that survive the grid are re-checked at stress points where
  /// one coordinate takes each of these values; a failure there marks the
  /// candidate as refuted off-grid.
  std::vector<double> stress_values{128.0, 512.0, 4096.0};
  bool verify = true;

  void validate() const {
    chain_n(k);
    if (dim_min < 1 || dim_max < dim_min) throw RangeError("search: invalid dimension range");
    if (budget < 0) throw RangeError("search: budget must be >= 0");
    if (jobs < 1) throw RangeError("search: jobs must be >= 1");
    grid.validate();
  }
};

enum class TupleFate {
  HYPOTHESIS_FAILED,     // some hypothesis failed on the grid
  CONSISTENT,            // hypotheses held on the full grid and the tuple is ordered
  COUNTEREXAMPLE,        // hypotheses held on the full grid and the stress points, order violated
  REFUTED_OFF_GRID,      // held on the grid, order violated, but a stress point broke a hypothesis
  EVALUATION_ERROR,
};

inline std::string to_string(TupleFate f) {
  switch (f) {
    case TupleFate::HYPOTHESIS_FAILED: return "hypothesis-failed";
    case TupleFate::CONSISTENT: return "consistent";
    case TupleFate::COUNTEREXAMPLE: return "counterexample";
    case TupleFate::REFUTED_OFF_GRID: return "refuted-off-grid";
    case TupleFate::EVALUATION_ERROR: return "evaluation-error";
  }
  return "?";
}

struct SearchRecord {
  int instance_id = 0;
  std::uint64_t seed = 0;
  int dim = 0;
  ChainTemplate chain;
  TupleFate fate = TupleFate::HYPOTHESIS_FAILED;
  std::size_t rows_evaluated = 0;
  double grid_max = 1;
  std::optional<CampaignRow> first_failure;   // on the grid, or at the refuting stress point
  std::size_t stress_rows = 0;
  std::size_t stress_errors = 0;   // stress rows that could not be evaluated
  int unordered_pair = 0;   // first i with A_{i+1} not >= A_i, 0 if ordered
  std::vector<RealMatrix> matrices;   // kept when the hypotheses survived the grid
};

/// Bin edges for margins of the first failing hypothesis, relative to the
/// comparison scale.
inline const std::vector<double>& margin_bin_edges() {
  static const std::vector<double> edges{-1e300, -10, -1, -1e-1, -1e-2, -1e-3, -1e-5, -1e-7, 0};
  return edges;
}

struct SearchReport {
  SearchConfig config;
  std::vector<SearchRecord> records;

  std::size_t count(TupleFate f) const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const auto& r) { return r.fate == f; }));
  }
  std::vector<const SearchRecord*> findings() const {
    std::vector<const SearchRecord*> out;
    for (const auto& r : records)
      if (r.fate == TupleFate::COUNTEREXAMPLE) out.push_back(&r);
    return out;
  }

  std::vector<std::size_t> margin_histogram() const {
    const auto& e = margin_bin_edges();
    std::vector<std::size_t> h(e.size(), 0);
    for (const auto& r : records) {
      if (r.fate != TupleFate::HYPOTHESIS_FAILED) continue;
      const double m = r.first_failure->relative_margin();
      std::size_t b = 0;
      while (b + 1 < e.size() && m >= e[b + 1]) ++b;
      ++h[b];
    }
    return h;
  }

  nlohmann::json stats_json() const {
    nlohmann::json j;
    j["tuples"] = records.size();
    j["hypothesis_failed_first"] = count(TupleFate::HYPOTHESIS_FAILED);
    j["consistent"] = count(TupleFate::CONSISTENT);
    j["counterexamples"] = count(TupleFate::COUNTEREXAMPLE);
    j["refuted_off_grid"] = count(TupleFate::REFUTED_OFF_GRID);
    j["evaluation_errors"] = count(TupleFate::EVALUATION_ERROR);
    std::size_t rows = 0;
    for (const auto& r : records) rows += r.rows_evaluated;
    j["rows_evaluated"] = rows;
    auto hist = nlohmann::json::array();
    const auto& e = margin_bin_edges();
    const auto h = margin_histogram();
    for (std::size_t b = 0; b < h.size(); ++b) {
      nlohmann::json bin{{"count", h[b]}};
      bin["lower"] = b == 0 ? nlohmann::json(nullptr) : nlohmann::json(e[b]);
      bin["upper"] = b + 1 < e.size() ? nlohmann::json(e[b + 1]) : nlohmann::json(nullptr);
      hist.push_back(bin);
    }
    j["first_failure_relative_margin_histogram"] = hist;
    std::vector<std::size_t> by_member;
    for (const auto& r : records)
      if (r.fate == TupleFate::HYPOTHESIS_FAILED) {
        const auto o = static_cast<std::size_t>(r.first_failure->ordinal);
        if (by_member.size() < o) by_member.resize(o, 0);
        ++by_member[o - 1];
      }
    j["first_failure_by_hypothesis"] = by_member;
    return j;
  }
};

namespace detail {

/// Points with one coordinate at a stress value and the rest in {1, 2},
/// plus the diagonal points (v, ..., v).
inline std::vector<std::vector<double>> stress_points(int dims, const std::vector<double>& stress) {
  std::vector<std::vector<double>> out;
  const auto base = grid_points({1.0, 2.0}, std::max(dims - 1, 1));
  for (double v : stress) {
    for (int d = 0; d < dims; ++d)
      for (const auto& rest : base) {
        std::vector<double> pt(rest.begin(), rest.begin() + (dims - 1));
        pt.insert(pt.begin() + d, v);
        out.push_back(std::move(pt));
      }
    out.emplace_back(static_cast<std::size_t>(dims), v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool contains_value(const std::vector<double>& p, double v) { return std::find(p.begin(), p.end(), v) != p.end(); }

template <class Scalar>
SearchRecord search_one(const SearchConfig& cfg, int index) {
  SearchRecord rec;
  rec.instance_id = index;
  rec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
  Rng rng(rec.seed);
  rec.dim = rng.uniform_int(cfg.dim_min, cfg.dim_max);
  rec.chain = ChainTemplate::sample(cfg.k, rng);
  const std::uint64_t tuple_seed = derive_seed(rec.seed, 1);
  const auto tuple = cfg.ordered ? gen_ordered_tuple<Scalar>(cfg.k, rec.dim, tuple_seed)
                                 : gen_unordered_tuple<Scalar>(cfg.k, rec.dim, tuple_seed);
  rec.unordered_pair = first_unordered_pair(tuple, cfg.tol_rel);

  CheckOptions opt;
  opt.tol_rel = cfg.tol_rel;
  opt.stop_at_first_failure = true;
  opt.instance_id = index;
  WordEvaluator<Scalar> ev(opt.eval);
  const int dims = 2 * chain_n(cfg.k);

  PGrid grid = cfg.grid;
  std::optional<double> added;   // value introduced by the last escalation
  for (;;) {
    auto points = grid_points(grid.values, dims, cfg.max_points, rec.seed);
    if (added)
      points.erase(std::remove_if(points.begin(), points.end(), [&](const auto& p) { return !contains_value(p, *added); }),
                   points.end());
    sort_by_psi(points, rec.chain.t);
    const auto report = check_hypotheses(tuple, rec.chain, points, cfg.weights, opt, ev);
    rec.rows_evaluated += report.rows.size();
    rec.grid_max = grid.values.back();
    if (!report.rows.empty() && report.rows.back().verdict != Outcome::HOLDS) {
      rec.first_failure = report.rows.back();
      rec.fate = report.rows.back().verdict == Outcome::ERROR ? TupleFate::EVALUATION_ERROR : TupleFate::HYPOTHESIS_FAILED;
      return rec;
    }
    if (!grid.can_escalate()) break;
    grid = grid.escalated();
    added = grid.values.back();
  }
  if (rec.unordered_pair == 0) {
    rec.fate = TupleFate::CONSISTENT;
    return rec;
  }
  rec.fate = TupleFate::COUNTEREXAMPLE;
  if (cfg.verify) {
    // Unevaluable stress rows are counted but neither refute nor confirm.
    CheckOptions all = opt;
    all.stop_at_first_failure = false;
    for (const auto& pt : stress_points(dims, cfg.stress_values)) {
      const auto report = check_hypotheses(tuple, rec.chain, {pt}, cfg.weights, all, ev);
      for (const auto& row : report.rows) {
        ++rec.stress_rows;
        if (row.verdict == Outcome::ERROR) ++rec.stress_errors;
        if (row.verdict == Outcome::FAILS && rec.fate == TupleFate::COUNTEREXAMPLE) {
          rec.fate = TupleFate::REFUTED_OFF_GRID;
          rec.first_failure = row;
        }
      }
      if (rec.fate == TupleFate::REFUTED_OFF_GRID) break;
    }
  }
  if constexpr (!is_complex_v<Scalar>) rec.matrices = tuple.matrices();
  return rec;
}

}  // namespace detail

/// Random tuples checked against the full hypothesis family on an escalating
/// grid. A tuple whose hypotheses survive the whole grid and the stress
/// points while its order fails is reported as a counterexample; passing
/// finitely many points does not certify the "for all p" quantifier.
template <class Scalar = double>
SearchReport search_counterexample(const SearchConfig& cfg) {
  cfg.validate();
  SearchReport rep;
  rep.config = cfg;
  rep.records.resize(static_cast<std::size_t>(cfg.budget));
  parallel_for(rep.records.size(), cfg.jobs,
               [&](std::size_t i, int) { rep.records[i] = detail::search_one<Scalar>(cfg, static_cast<int>(i)); });
  return rep;
}

}  // namespace oplab
