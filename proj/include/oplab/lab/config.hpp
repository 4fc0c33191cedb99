#pragma once

#include "oplab/errors.hpp"
#include "oplab/verifier/campaign.hpp"
#include "oplab/verifier/pgrid.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace oplab::lab {

/// Every setting of every command. The JSON form mirrors the long flag
/// names with dashes replaced by underscores.
struct LabConfig {
  std::string command;
  std::string mode = "necessity";
  int k = 3;
  int dim = 2;
  int dim_max = 6;
  std::uint64_t seed = 42;
  int count = 10;
  int budget = 200;
  int jobs = 1;
  std::string field = "real";
  std::string p_grid = "1,1.5,2,4,8";
  double grid_factor = 2.0;
  double grid_cap = 64.0;
  std::string s_grid = "1.5,2,4,8";
  double tol_rel = 1e-9;
  double eps_pd_rel = 1e-10;
  std::string weights;          // empty: per-mode default
  std::string t;                // csv; empty: sampled per instance
  std::string p;                // csv, for psi
  double r = -1;                // < 0: sampled per instance
  std::string family = "all";
  int member = 0;               // 0: every member
  std::string scalars;          // csv of A_i multiples of I (fixture tuples)
  std::string tuple;            // JSON file {"matrices": [...]}
  double p_scalar = 1.0;        // theorem-1-2 fixtures: P = p_scalar I
  double q_scalar = 2.0;
  double delta = 0.0;
  double w = 1.0;
  double c = -1;                // limit: explicit bound, < 0 to derive it
  bool ordered = false;
  bool emit_stats = false;
  std::string report;
  std::string findings;
  std::string golden_dir = "golden/v1";

  nlohmann::json to_json() const {
    return {{"command", command}, {"mode", mode},       {"k", k},
            {"dim", dim},         {"dim_max", dim_max}, {"seed", seed},
            {"count", count},     {"budget", budget},   {"jobs", jobs},
            {"field", field},     {"p_grid", p_grid},   {"grid_factor", grid_factor},
            {"grid_cap", grid_cap}, {"s_grid", s_grid}, {"tol_rel", tol_rel},
            {"eps_pd_rel", eps_pd_rel}, {"weights", weights}, {"t", t},
            {"p", p},             {"r", r},             {"family", family},
            {"member", member},   {"scalars", scalars}, {"tuple", tuple},
            {"p_scalar", p_scalar}, {"q_scalar", q_scalar}, {"delta", delta},
            {"w", w},             {"c", c},             {"ordered", ordered},
            {"emit_stats", emit_stats}, {"report", report}, {"findings", findings},
            {"golden_dir", golden_dir}};
  }

  /// Overwrites the fields present in j; unknown keys are an error.
  void merge(const nlohmann::json& j) {
    if (!j.is_object()) throw RangeError("config: expected a JSON object");
    const auto known = to_json();
    for (const auto& [key, value] : j.items())
      if (!known.contains(key)) throw RangeError("config: unknown key '" + key + "'");
    try {
      auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
      };
      get("command", command); get("mode", mode); get("k", k); get("dim", dim); get("dim_max", dim_max);
      get("seed", seed); get("count", count); get("budget", budget); get("jobs", jobs); get("field", field);
      get("p_grid", p_grid); get("grid_factor", grid_factor); get("grid_cap", grid_cap); get("s_grid", s_grid);
      get("tol_rel", tol_rel); get("eps_pd_rel", eps_pd_rel); get("weights", weights); get("t", t); get("p", p);
      get("r", r); get("family", family); get("member", member); get("scalars", scalars); get("tuple", tuple);
      get("p_scalar", p_scalar); get("q_scalar", q_scalar); get("delta", delta); get("w", w); get("c", c);
      get("ordered", ordered); get("emit_stats", emit_stats); get("report", report); get("findings", findings);
      get("golden_dir", golden_dir);
    } catch (const nlohmann::json::exception& e) {
      throw RangeError(std::string("config: ") + e.what());
    }
  }

  static LabConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RangeError("config: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw RangeError("config: " + path + ": " + e.what());
    }
    LabConfig c;
    c.merge(j);
    return c;
  }

  PGrid grid() const {
    PGrid g{parse_csv_numbers(p_grid, "--p-grid"), grid_factor, grid_cap};
    g.validate();
    return g;
  }

  /// Checks ranges shared by all commands before any computation.
  void validate() const {
    if (k < 2) throw RangeError("--k must be >= 2");
    if (dim < 1 || dim_max < dim) throw RangeError("--dim must be >= 1 and <= --dim-max");
    if (count < 0) throw RangeError("--count must be >= 0");
    if (budget < 0) throw RangeError("--budget must be >= 0");
    if (jobs < 1) throw RangeError("--jobs must be >= 1");
    if (field != "real" && field != "complex") throw RangeError("--field must be real or complex");
    if (!(tol_rel > 0)) throw RangeError("--tol-rel must be positive");
    if (!(eps_pd_rel > 0)) throw RangeError("--eps-pd-rel must be positive");
  }
};

}  // namespace oplab::lab
