#pragma once

#include "oplab/chain.hpp"
#include "oplab/dsl.hpp"
#include "oplab/lab/config.hpp"
#include "oplab/matrix_io.hpp"
#include "oplab/verifier.hpp"

#include <json.hpp>

#include <complex>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace oplab::lab {

enum ExitCode { kExpectationMet = 0, kExpectationViolated = 1, kConfigError = 2 };

namespace detail {

inline std::string fmt(double x) { return format_number(x); }

inline TolerancePolicy policy(const LabConfig& cfg) {
  TolerancePolicy p;
  p.tol_rel = cfg.tol_rel;
  p.eps_pd_rel = cfg.eps_pd_rel;
  return p;
}

inline CheckOptions check_options(const LabConfig& cfg, int instance) {
  CheckOptions o;
  o.tol_rel = cfg.tol_rel;
  o.instance_id = instance;
  o.eval.policy = policy(cfg);
  return o;
}

inline WeightPolicy weights(const LabConfig& cfg, const std::string& fallback) {
  return WeightPolicy::parse(cfg.weights.empty() ? fallback : cfg.weights);
}

/// Parameter template for instance i: explicit --t/--r when given, sampled otherwise.
inline ChainTemplate chain_for(const LabConfig& cfg, Rng& rng) {
  ChainTemplate c = ChainTemplate::sample(cfg.k, rng);
  if (!cfg.t.empty()) {
    c.t = parse_csv_numbers(cfg.t, "--t");
    if (static_cast<int>(c.t.size()) != chain_n(cfg.k))
      throw RangeError("--t: expected " + std::to_string(chain_n(cfg.k)) + " values for k=" + std::to_string(cfg.k));
    if (cfg.r < 0) c.r = c.t.back() + rng.uniform(0.1, 2.0);
  }
  if (cfg.r >= 0) c.r = cfg.r;
  c.validate();
  return c;
}

template <class Scalar>
OperatorTuple<Scalar> fixture_tuple(const LabConfig& cfg) {
  if (!cfg.scalars.empty()) {
    const auto v = parse_csv_numbers(cfg.scalars, "--scalars");
    if (static_cast<int>(v.size()) != cfg.k)
      throw RangeError("--scalars: expected k=" + std::to_string(cfg.k) + " values, got " + std::to_string(v.size()));
    return OperatorTuple<Scalar>::scalars(v, cfg.dim);
  }
  std::ifstream in(cfg.tuple);
  if (!in) throw RangeError("--tuple: cannot open " + cfg.tuple);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw RangeError("--tuple: " + std::string(e.what()));
  }
  std::vector<HermitianMatrix<Scalar>> ms;
  for (const auto& m : j.at("matrices")) ms.push_back(matrix_from_json<Scalar>(m));
  if (static_cast<int>(ms.size()) != cfg.k)
    throw RangeError("--tuple: expected k=" + std::to_string(cfg.k) + " matrices, got " + std::to_string(ms.size()));
  return OperatorTuple<Scalar>(std::move(ms), policy(cfg));
}

inline bool has_fixture(const LabConfig& cfg) { return !cfg.scalars.empty() || !cfg.tuple.empty(); }

inline void write_report(const LabConfig& cfg, const CampaignReport& rep, const nlohmann::json& extra = {}) {
  if (cfg.report.empty()) return;
  std::ofstream csv(cfg.report);
  if (!csv) throw RangeError("--report: cannot write " + cfg.report);
  rep.write_csv(csv);
  nlohmann::json side{{"config", cfg.to_json()}, {"seed", cfg.seed}, {"summary", rep.summary_json()}};
  if (!extra.is_null()) side["details"] = extra;
  std::ofstream js(cfg.report + ".json");
  if (!js) throw RangeError("--report: cannot write " + cfg.report + ".json");
  js << side.dump(2) << '\n';
}

inline std::string describe(const CampaignRow& r) {
  return "instance " + std::to_string(r.instance_id) + " " + to_string(r.family) + " member " + std::to_string(r.member) +
         " p=" + join_numbers(r.p, ';') + " w=" + fmt(r.w) + " margin " + fmt(r.margin);
}

inline void print_summary(std::ostream& out, const std::string& label, const CampaignReport& rep) {
  const auto s = rep.summary();
  out << label << ": " << s.rows << " rows, " << s.holds << " hold, " << s.fails << " fail, " << s.errors << " errors";
  if (std::isfinite(s.worst_relative_margin)) out << ", worst relative margin " << fmt(s.worst_relative_margin);
  out << '\n';
}

/// Instance i of a generated campaign: its seed, dimension and parameters.
struct Instance {
  std::uint64_t seed;
  int dim;
  ChainTemplate chain;
};

inline Instance instance(const LabConfig& cfg, int i) {
  const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
  Rng rng(s);
  Instance in{s, rng.uniform_int(cfg.dim, cfg.dim_max), {}};
  in.chain = chain_for(cfg, rng);
  return in;
}

template <class Scalar>
int check_necessity(const LabConfig& cfg, std::ostream& out) {
  const PGrid grid = cfg.grid();
  const WeightPolicy wp = weights(cfg, "necessity");
  std::vector<CampaignReport> parts(static_cast<std::size_t>(cfg.count));
  std::vector<Instance> instances;
  for (int i = 0; i < cfg.count; ++i) instances.push_back(instance(cfg, i));
  parallel_for(parts.size(), cfg.jobs, [&](std::size_t i, int) {
    const auto& in = instances[i];
    const auto tuple = gen_ordered_tuple<Scalar>(cfg.k, in.dim, derive_seed(in.seed, 1));
    parts[i] = check_hypotheses(tuple, in.chain, grid, wp, check_options(cfg, static_cast<int>(i)));
  });
  CampaignReport rep;
  for (const auto& p : parts) rep.append(p);
  print_summary(out, "necessity (" + std::to_string(cfg.count) + " ordered tuples, weights " + wp.to_string() + ")", rep);
  write_report(cfg, rep);
  const auto s = rep.summary();
  if (s.fails == 0 && s.errors == 0) {
    out << "expectation met: every hypothesis holds on every ordered tuple\n";
    return kExpectationMet;
  }
  for (const auto& r : rep.rows)
    if (r.verdict != Outcome::HOLDS) out << "violation: " << describe(r) << (r.error.empty() ? "" : " (" + r.error + ")") << '\n';
  return kExpectationViolated;
}

template <class Scalar>
int check_contrapositive(const LabConfig& cfg, std::ostream& out) {
  const PGrid grid = cfg.grid();
  const WeightPolicy wp = weights(cfg, "necessity");
  std::vector<OperatorTuple<Scalar>> tuples;
  std::vector<ChainTemplate> chains;
  if (has_fixture(cfg)) {
    tuples.push_back(fixture_tuple<Scalar>(cfg));
    Rng rng(cfg.seed);
    chains.push_back(chain_for(cfg, rng));
  } else {
    for (int i = 0; i < cfg.count; ++i) {
      const auto in = instance(cfg, i);
      tuples.push_back(gen_unordered_tuple<Scalar>(cfg.k, in.dim, derive_seed(in.seed, 1)));
      chains.push_back(in.chain);
    }
  }
  CampaignReport rep;
  int findings = 0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const int pair = first_unordered_pair(tuples[i], cfg.tol_rel);
    if (pair == 0) throw RangeError("contrapositive mode needs an unordered tuple; instance " + std::to_string(i) + " is ordered");
    const auto part = check_hypotheses(tuples[i], chains[i], grid, wp, check_options(cfg, static_cast<int>(i)));
    rep.append(part);
    const CampaignRow* first = nullptr;
    for (const auto& r : part.rows)
      if (r.verdict == Outcome::FAILS) {
        first = &r;
        break;
      }
    if (first) {
      out << "hypothesis-failure found: " << describe(*first) << " (A" << pair + 1 << " >= A" << pair << " fails)\n";
    } else {
      ++findings;
      out << "no hypothesis failure for instance " << i << " although A" << pair + 1 << " >= A" << pair << " fails\n";
    }
  }
  print_summary(out, "contrapositive", rep);
  write_report(cfg, rep);
  if (findings == 0 && rep.summary().errors == 0) {
    out << "expectation met: every unordered tuple violates some hypothesis\n";
    return kExpectationMet;
  }
  return kExpectationViolated;
}

template <class Scalar>
int check_proof_steps(const LabConfig& cfg, std::ostream& out) {
  const PGrid grid = cfg.grid();
  const WeightPolicy wp = weights(cfg, "fixed:1");
  std::size_t premise = 0;
  std::size_t red = 0;
  std::size_t errors = 0;
  double worst = std::numeric_limits<double>::infinity();
  nlohmann::json details = nlohmann::json::array();
  for (int i = 0; i < cfg.count; ++i) {
    const auto in = instance(cfg, i);
    const auto tuple = has_fixture(cfg) ? fixture_tuple<Scalar>(cfg)
                                        : gen_ordered_tuple<Scalar>(cfg.k, in.dim, derive_seed(in.seed, 1)).normalized(0.9);
    auto points = grid_points(grid.values, 2 * chain_n(cfg.k));
    sort_by_psi(points, in.chain.t);
    const auto rep = replicate_proof_steps(tuple, in.chain, points, wp, check_options(cfg, i));
    premise += rep.premise_rows();
    red += rep.red_flags();
    for (const auto& r : rep.rows) errors += r.premise == Outcome::ERROR;
    worst = std::min(worst, rep.worst_relative_margin());
    details.push_back({{"instance_id", i}, {"rows", rep.rows.size()}, {"premise_rows", rep.premise_rows()},
                       {"red_flags", rep.red_flags()}});
    if (has_fixture(cfg)) break;
  }
  out << "proof-steps: " << premise << " rows with the first hypothesis holding, " << red << " red flags, " << errors
      << " errors";
  if (std::isfinite(worst)) out << ", worst relative margin " << fmt(worst);
  out << '\n';
  if (!cfg.report.empty()) {
    std::ofstream js(cfg.report + ".json");
    js << nlohmann::json{{"config", cfg.to_json()}, {"seed", cfg.seed}, {"instances", details}}.dump(2) << '\n';
  }
  if (red == 0 && errors == 0) {
    out << "expectation met: W <= I, the layered bound and the scalar bound hold wherever the premise holds\n";
    return kExpectationMet;
  }
  return kExpectationViolated;
}

inline void print_sequence(std::ostream& out, const LimitReport& rep) {
  out << "c^(1/p2):";
  for (std::size_t i = 0; i < rep.sequence.size(); ++i) out << ' ' << fmt(rep.p2[i]) << "->" << fmt(rep.sequence[i]);
  out << '\n';
}

template <class Scalar>
int check_limit(const LabConfig& cfg, std::ostream& out) {
  if (cfg.c >= 0) {
    const auto rep = limit_sequence(cfg.c);
    print_sequence(out, rep);
    const bool ok = rep.monotone_nonincreasing && std::abs(rep.final_gap) <= 1e-3;
    out << (ok ? "expectation met: sequence decreases to within 1e-3 of 1\n" : "sequence does not settle near 1\n");
    return ok ? kExpectationMet : kExpectationViolated;
  }
  int bad = 0;
  for (int i = 0; i < cfg.count; ++i) {
    const auto in = instance(cfg, i);
    const auto tuple = has_fixture(cfg) ? fixture_tuple<Scalar>(cfg)
                                        : gen_ordered_tuple<Scalar>(cfg.k, in.dim, derive_seed(in.seed, 1)).normalized(0.9);
    const int n = chain_n(cfg.k);
    const auto rep = limit_probe(tuple, in.chain, std::vector<double>(2 * n - 2, 1.0), default_limit_p2(), cfg.tol_rel);
    const bool ordered = loewner_compare(tuple[2], tuple[1], cfg.tol_rel).ge();
    const bool ok = rep.monotone_nonincreasing && std::abs(rep.final_gap) <= 1e-3 && rep.below_every_bound &&
                    rep.declares_ordered == ordered;
    out << "instance " << i << ": interior " << fmt(rep.interior) << ", lambda_max " << fmt(rep.lambda_max)
        << (rep.declares_ordered ? ", A2 >= A1 consistent" : ", A2 >= A1 not established") << (ok ? "" : "  [unexpected]")
        << '\n';
    if (i == 0) print_sequence(out, rep);
    bad += !ok;
    if (has_fixture(cfg)) break;
  }
  if (bad == 0) {
    out << "expectation met: bounds decrease toward 1 and the declared order matches the tuple\n";
    return kExpectationMet;
  }
  return kExpectationViolated;
}

template <class Scalar>
int check_loewner_heinz(const LabConfig& cfg, std::ostream& out) {
  const std::vector<double> alphas{0, 0.25, 0.5, 0.75, 1};
  int bad = 0;
  for (int i = 0; i < cfg.count; ++i) {
    const auto in = instance(cfg, i);
    const auto t = gen_ordered_tuple<Scalar>(2, in.dim, derive_seed(in.seed, 1));
    const auto rep = probe_loewner_heinz(t[2], t[1], alphas, cfg.tol_rel);
    bad += !rep.all_ge();
  }
  Dense<Scalar> pd(2, 2), qd(2, 2);
  pd << Scalar(2), Scalar(1), Scalar(1), Scalar(1);
  qd << Scalar(1), Scalar(1), Scalar(1), Scalar(1);
  const auto witness = probe_loewner_heinz(HermitianMatrix<Scalar>(pd), HermitianMatrix<Scalar>(qd), {2.0}, cfg.tol_rel);
  const bool witness_fails = witness.precondition_ok && !witness.all_ge();
  out << "loewner-heinz: " << cfg.count - bad << "/" << cfg.count << " pairs ordered at every alpha in [0,1]; witness at alpha=2 "
      << (witness_fails ? "fails as expected" : "unexpectedly holds") << '\n';
  return bad == 0 && witness_fails ? kExpectationMet : kExpectationViolated;
}

template <class Scalar>
int check_theorem_1_2(const LabConfig& cfg, std::ostream& out) {
  const auto p = cfg.p_scalar * HermitianMatrix<Scalar>::identity(cfg.dim);
  const auto q = cfg.q_scalar * HermitianMatrix<Scalar>::identity(cfg.dim);
  const double r = cfg.r < 0 ? 1.0 : cfg.r;
  Theorem12Options opt;
  opt.tol_rel = cfg.tol_rel;
  opt.cap = cfg.grid_cap;
  opt.escalation_factor = cfg.grid_factor;
  const auto rep = probe_theorem_1_2(p, q, r, cfg.delta, cfg.w, parse_csv_numbers(cfg.s_grid, "--s-grid"), opt);
  out << "theorem-1-2: hypothesis ";
  if (rep.first_violation_s) {
    out << "fails at s=" << fmt(*rep.first_violation_s);
  } else {
    out << "holds for every probed s up to " << fmt(rep.probed_up_to);
  }
  out << "; conclusion Q <= I " << (rep.conclusion_holds ? "holds" : "fails") << "; status " << to_string(rep.status) << '\n';
  const bool ok = rep.status != ImplicationStatus::VIOLATED && (!rep.spectrum_crosses_one || rep.first_violation_s);
  return ok ? kExpectationMet : kExpectationViolated;
}

template <class Scalar>
int run_check(const LabConfig& cfg, std::ostream& out) {
  if (cfg.mode == "necessity") return check_necessity<Scalar>(cfg, out);
  if (cfg.mode == "contrapositive") return check_contrapositive<Scalar>(cfg, out);
  if (cfg.mode == "proof-steps") return check_proof_steps<Scalar>(cfg, out);
  if (cfg.mode == "limit") return check_limit<Scalar>(cfg, out);
  if (cfg.mode == "loewner-heinz") return check_loewner_heinz<Scalar>(cfg, out);
  if (cfg.mode == "theorem-1-2") return check_theorem_1_2<Scalar>(cfg, out);
  throw RangeError("--mode: unknown mode '" + cfg.mode + "'");
}

template <class Scalar>
nlohmann::json record_json(const SearchRecord& r) {
  nlohmann::json j{{"instance_id", r.instance_id}, {"seed", r.seed}, {"dim", r.dim}, {"k", r.chain.k},
                   {"t", r.chain.t}, {"r", r.chain.r}, {"grid_max", r.grid_max}, {"unordered_pair", r.unordered_pair},
                   {"stress_rows", r.stress_rows}, {"stress_errors", r.stress_errors}};
  auto ms = nlohmann::json::array();
  for (const auto& m : r.matrices) ms.push_back(to_json(m));
  j["matrices"] = ms;
  return j;
}

template <class Scalar>
int run_search(const LabConfig& cfg, std::ostream& out) {
  SearchConfig sc;
  sc.k = cfg.k;
  sc.dim_min = cfg.dim;
  sc.dim_max = cfg.dim_max;
  sc.seed = cfg.seed;
  sc.budget = cfg.budget;
  sc.grid = cfg.grid();
  sc.weights = weights(cfg, "necessity");
  sc.ordered = cfg.ordered;
  sc.tol_rel = cfg.tol_rel;
  sc.jobs = cfg.jobs;
  const SearchReport rep = search_counterexample<Scalar>(sc);
  const auto findings = rep.findings();
  nlohmann::json doc{{"config", cfg.to_json()}, {"seed", cfg.seed}};
  auto list = nlohmann::json::array();
  for (const auto* f : findings) list.push_back(record_json<Scalar>(*f));
  doc["findings"] = list;
  if (cfg.emit_stats) doc["stats"] = rep.stats_json();
  if (!cfg.findings.empty()) {
    std::ofstream f(cfg.findings);
    if (!f) throw RangeError("--findings: cannot write " + cfg.findings);
    f << doc.dump(2) << '\n';
  }
  out << "search: " << rep.records.size() << " tuples, " << rep.count(TupleFate::HYPOTHESIS_FAILED)
      << " failed a hypothesis first, " << rep.count(TupleFate::CONSISTENT) << " consistent, "
      << rep.count(TupleFate::EVALUATION_ERROR) << " evaluation errors, " << rep.count(TupleFate::REFUTED_OFF_GRID)
      << " refuted off-grid, " << findings.size() << " counterexamples\n";
  if (cfg.emit_stats) out << rep.stats_json().dump() << '\n';
  return findings.empty() ? kExpectationMet : kExpectationViolated;
}

}  // namespace detail

/// Prints psi[2n] for --t/--p and the necessity weight when --r is given.
inline int cmd_psi(const LabConfig& cfg, std::ostream& out) {
  const auto t = parse_csv_numbers(cfg.t, "--t");
  const auto p = parse_csv_numbers(cfg.p, "--p");
  const double psi = psi_exponent(t, p);
  out << "psi = " << detail::fmt(psi) << '\n';
  if (cfg.r >= 0) {
    const int n = static_cast<int>(t.size());
    ParamSet ps{n, 2 * n + 1, t, p, cfg.r, std::vector<double>(2 * n, 1.0)};
    ps.validate();
    out << "w = " << detail::fmt(necessity_weight(ps)) << '\n';
  }
  return kExpectationMet;
}

inline std::vector<ChainInequality> selected_chain(const LabConfig& cfg) {
  std::vector<ChainInequality> out;
  const std::string& f = cfg.family;
  const bool asc = f == "asc" || f == "ascending" || f == "all";
  const bool desc = f == "desc" || f == "descending" || f == "all";
  if (!asc && !desc) throw RangeError("--family must be asc, desc or all");
  if (cfg.member != 0 && f == "all") throw RangeError("--member needs --family asc or desc");
  if (asc) {
    if (cfg.member != 0) return {build_chain(Family::ASCENDING, cfg.member, cfg.k)};
    for (int m = 1; m <= ascending_members(cfg.k); ++m) out.push_back(build_chain(Family::ASCENDING, m, cfg.k));
  }
  if (desc) {
    if (cfg.member != 0) return {build_chain(Family::DESCENDING, cfg.member, cfg.k)};
    for (int m = 1; m <= descending_members(cfg.k); ++m) out.push_back(build_chain(Family::DESCENDING, m, cfg.k));
  }
  return out;
}

inline int cmd_print_chain(const LabConfig& cfg, std::ostream& out) {
  for (const auto& c : selected_chain(cfg)) out << pretty_print(c) << '\n';
  return kExpectationMet;
}

/// Compares every golden file in the directory against the builder output
/// for the k it mentions.
inline int cmd_golden(const LabConfig& cfg, std::ostream& out) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(cfg.golden_dir)) throw RangeError("--golden-dir: not a directory: " + cfg.golden_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.golden_dir))
    if (e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  int mismatches = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto entries = parse_golden(ss.str());
    int k = 0;
    for (const auto& e : entries) k = std::max({k, e.chain.lhs.max_index(), e.chain.rhs.max_index()});
    const auto hyps = hypothesis_set(k);
    if (hyps.size() != entries.size()) {
      out << path.filename().string() << ": " << entries.size() << " lines but k=" << k << " has " << hyps.size()
          << " hypotheses\n";
      ++mismatches;
      continue;
    }
    int bad = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      if (normalize_whitespace(pretty_print(hyps[i])) != normalize_whitespace(entries[i].text)) {
        out << path.filename().string() << ":" << entries[i].line << ": mismatch\n  golden: " << entries[i].text
            << "\n  built:  " << pretty_print(hyps[i]) << '\n';
        ++bad;
      }
    }
    out << path.filename().string() << ": k=" << k << ", " << hyps.size() - bad << "/" << hyps.size() << " match\n";
    mismatches += bad;
  }
  return mismatches == 0 ? kExpectationMet : kExpectationViolated;
}

inline int cmd_check(const LabConfig& cfg, std::ostream& out) {
  cfg.validate();
  return cfg.field == "complex" ? detail::run_check<std::complex<double>>(cfg, out) : detail::run_check<double>(cfg, out);
}

inline int cmd_search(const LabConfig& cfg, std::ostream& out) {
  cfg.validate();
  return cfg.field == "complex" ? detail::run_search<std::complex<double>>(cfg, out) : detail::run_search<double>(cfg, out);
}

/// Dispatches on cfg.command; library errors become exit code 2.
inline int run_command(const LabConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.command == "psi") return cmd_psi(cfg, out);
    if (cfg.command == "print-chain") return cmd_print_chain(cfg, out);
    if (cfg.command == "golden") return cmd_golden(cfg, out);
    if (cfg.command == "check") return cmd_check(cfg, out);
    if (cfg.command == "search") return cmd_search(cfg, out);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace oplab::lab
