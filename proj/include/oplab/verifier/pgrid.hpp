#pragma once

#include "oplab/chain.hpp"
#include "oplab/errors.hpp"
#include "oplab/scalar_expr.hpp"
#include "oplab/verifier/random.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace oplab {

/// Finite sample of [1, inf) standing in for "for all p >= 1". Escalation
/// appends max * factor while it stays within cap.
struct PGrid {
  std::vector<double> values{1.0, 1.5, 2.0, 4.0, 8.0};
  double factor = 2.0;
  double cap = 64.0;

  void validate() const {
    if (values.empty()) throw RangeError("PGrid: no values");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] >= 1.0)) throw RangeError("PGrid: values must be >= 1");
      if (i > 0 && !(values[i] > values[i - 1])) throw RangeError("PGrid: values must be strictly ascending");
    }
    if (!(factor > 1.0)) throw RangeError("PGrid: escalation factor must exceed 1");
    if (!(cap >= values.back())) throw RangeError("PGrid: cap below largest value");
  }

  bool can_escalate() const { return values.back() * factor <= cap; }

  PGrid escalated() const {
    PGrid g = *this;
    if (can_escalate()) g.values.push_back(values.back() * factor);
    return g;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + format_number(values[i]);
    return s;
  }
};

inline std::vector<double> parse_csv_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw RangeError(what + ": malformed number '" + item + "'");
    }
    if (used != item.size()) throw RangeError(what + ": malformed number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw RangeError(what + ": empty list");
  return out;
}

/// Cartesian product values^dims, Latin-hypercube subsampled to max_points
/// when larger. Each returned point has `dims` coordinates.
inline std::vector<std::vector<double>> grid_points(const std::vector<double>& values, int dims,
                                                    std::size_t max_points = 10000, std::uint64_t seed = 0) {
  if (dims < 1) throw RangeError("grid_points: dims must be >= 1");
  const std::size_t m = values.size();
  double total = 1;
  for (int d = 0; d < dims; ++d) total *= static_cast<double>(m);
  std::vector<std::vector<double>> out;
  if (total <= static_cast<double>(max_points)) {
    const auto count = static_cast<std::size_t>(total);
    out.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::vector<double> pt(dims);
      std::size_t rest = idx;
      for (int d = dims - 1; d >= 0; --d) {
        pt[d] = values[rest % m];
        rest /= m;
      }
      out.push_back(std::move(pt));
    }
    return out;
  }
  // Stratify each coordinate into max_points cells mapped onto the value
  // indices, then pair the strata by independent random permutations.
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> perms(dims);
  for (auto& p : perms) {
    p.resize(max_points);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::shuffle(p.begin(), p.end(), rng.engine());
  }
  out.reserve(max_points);
  for (std::size_t s = 0; s < max_points; ++s) {
    std::vector<double> pt(dims);
    for (int d = 0; d < dims; ++d) pt[d] = values[perms[d][s] * m / max_points];
    out.push_back(std::move(pt));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Stable sort of p-vectors by psi[2n] under fixed t.
inline void sort_by_psi(std::vector<std::vector<double>>& points, const std::vector<double>& t) {
  std::stable_sort(points.begin(), points.end(), [&](const auto& a, const auto& b) {
    return psi_exponent(t, a) < psi_exponent(t, b);
  });
}

}  // namespace oplab
