#pragma once

#include "oplab/errors.hpp"
#include "oplab/operator_word.hpp"
#include "oplab/relation.hpp"
#include "oplab/scalar_expr.hpp"

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace oplab {

enum class Family { ASCENDING, DESCENDING };

inline std::string to_string(Family f) { return f == Family::ASCENDING ? "ascending" : "descending"; }

/// Chain parameter n for k operators: k = 2n + 1 (odd) or k = 2n (even).
inline int chain_n(int k) {
  if (k < 2) throw RangeError("k must be >= 2, got " + std::to_string(k));
  return k / 2;
}

inline int ascending_members(int k) { return chain_n(k); }
inline int descending_members(int k) { return k % 2 == 1 ? chain_n(k) : chain_n(k) - 1; }

/// Scalars of the chain inequalities: t_1..t_n, p_1..p_2n, r, w_1..w_{k-1}.
struct ParamSet {
  int n = 1;
  int k = 3;
  std::vector<double> t;
  std::vector<double> p;
  double r = 1.0;
  std::vector<double> w;

  /// Throws RangeError on the first violated invariant.
  void validate() const {
    if (n < 1) throw RangeError("ParamSet: n must be >= 1");
    if (k != 2 * n && k != 2 * n + 1) throw RangeError("ParamSet: k must be 2n or 2n+1");
    if (static_cast<int>(t.size()) != n) throw RangeError("ParamSet: expected n values of t");
    if (static_cast<int>(p.size()) != 2 * n) throw RangeError("ParamSet: expected 2n values of p");
    if (static_cast<int>(w.size()) != k - 1) throw RangeError("ParamSet: expected k-1 values of w");
    for (double x : t)
      if (!(x >= 0.0 && x <= 1.0)) throw RangeError("ParamSet: t_i must lie in [0,1]");
    for (double x : p)
      if (!(x >= 1.0)) throw RangeError("ParamSet: p_i must be >= 1");
    for (double x : w)
      if (!(x >= 0.0 && x <= 1.0)) throw RangeError("ParamSet: w_i must lie in [0,1]");
    if (!(r > t.back())) throw RangeError("ParamSet: r must exceed t_n");
  }

  static ParamSet make(int k, std::vector<double> t, std::vector<double> p, double r, std::vector<double> w) {
    ParamSet ps{chain_n(k), k, std::move(t), std::move(p), r, std::move(w)};
    ps.validate();
    return ps;
  }

  /// Name -> value map (t1.., p1.., r, w1..) used to bind exponents.
  std::map<std::string, double> bindings() const {
    std::map<std::string, double> b;
    for (int i = 0; i < static_cast<int>(t.size()); ++i) b[indexed_name('t', i + 1)] = t[i];
    for (int i = 0; i < static_cast<int>(p.size()); ++i) b[indexed_name('p', i + 1)] = p[i];
    for (int i = 0; i < static_cast<int>(w.size()); ++i) b[indexed_name('w', i + 1)] = w[i];
    b["r"] = r;
    return b;
  }
};

/// b_0 = 1; b_j = (b_{j-1} p_{2j-1} - t_j) p_{2j} + t_j.
inline double psi_exponent(std::span<const double> t, std::span<const double> p) {
  if (p.size() != 2 * t.size())
    throw RangeError("psi_exponent: expected len(p) = 2 len(t), got " + std::to_string(p.size()) + " and " +
                     std::to_string(t.size()));
  double b = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) b = (b * p[2 * j] - t[j]) * p[2 * j + 1] + t[j];
  return b;
}

/// (r - t_n) / (psi - t_n + r): the common weight under which the hypothesis
/// family characterizes the order.
inline double necessity_weight(const ParamSet& params) {
  const double tn = params.t.back();
  if (!(params.r > tn)) throw RangeError("necessity_weight: r must exceed t_n");
  const double denom = psi_exponent(params.t, params.p) - tn + params.r;
  if (!(denom > 0.0)) throw RangeError("necessity_weight: non-positive denominator");
  return (params.r - tn) / denom;
}

/// Symbol index of layer j in ascending member m; j = 0 is the innermost base.
inline int ascending_index(int member, int layer, int k) {
  const int n = chain_n(k);
  if (member < 1 || member > n) throw RangeError("ascending_index: member out of range");
  if (layer < 0 || layer > 2 * n - 1) throw RangeError("ascending_index: layer out of range");
  return std::min(member + layer, k);
}

inline int descending_index(int member, int layer, int k) {
  const int n = chain_n(k);
  if (member < 1 || member > descending_members(k)) throw RangeError("descending_index: member out of range");
  if (layer < 0 || layer > 2 * n - 1) throw RangeError("descending_index: layer out of range");
  return std::max(n + 1 + member - layer, 1);
}

/// Layer j = 2i-1 carries -t_i/2, layer j = 2i carries +t_i/2.
inline ScalarExpr layer_exponent(int layer, int n) {
  if (layer < 1 || layer > 2 * n - 1) throw RangeError("layer_exponent: layer out of range");
  const int i = (layer + 1) / 2;
  return ScalarExpr::name(indexed_name('t', i), layer % 2 == 1, 2.0);
}

struct ChainInequality {
  Family family = Family::ASCENDING;
  int member = 1;
  int ordinal = 1;    // position in the hypothesis list, also the w index
  int k = 3;
  OperatorWord lhs = OperatorWord::symbol(1, ScalarExpr::literal(1));
  OperatorWord rhs = OperatorWord::symbol(1, ScalarExpr::literal(1));
  Relation relation = Relation::GE;   // lhs relation rhs

  bool operator==(const ChainInequality&) const = default;
};

/// Builds the member-th inequality of the given family for k operators.
inline ChainInequality build_chain(Family family, int member, int k) {
  const int n = chain_n(k);
  const int count = family == Family::ASCENDING ? ascending_members(k) : descending_members(k);
  if (member < 1 || member > count)
    throw RangeError("build_chain: member " + std::to_string(member) + " out of range 1.." +
                     std::to_string(count) + " for " + to_string(family) + " family with k=" + std::to_string(k));
  auto index = [&](int layer) {
    return family == Family::ASCENDING ? ascending_index(member, layer, k) : descending_index(member, layer, k);
  };

  OperatorWord core = OperatorWord::symbol(index(0), ScalarExpr::name("p1"));
  for (int j = 1; j <= 2 * n - 1; ++j) {
    const auto outer = OperatorWord::symbol(index(j), layer_exponent(j, n));
    core = OperatorWord::power(OperatorWord::sandwich(outer, std::move(core)), ScalarExpr::name(indexed_name('p', j + 1)));
  }
  const int outer_index = family == Family::ASCENDING ? k : 1;
  const int ordinal = family == Family::ASCENDING ? member : n + member;
  const auto cap = OperatorWord::symbol(outer_index, ScalarExpr::name("r", false, 2.0));

  ChainInequality ci;
  ci.family = family;
  ci.member = member;
  ci.ordinal = ordinal;
  ci.k = k;
  ci.rhs = OperatorWord::power(OperatorWord::sandwich(cap, std::move(core)), ScalarExpr::name(indexed_name('w', ordinal)));
  ci.lhs = OperatorWord::symbol(outer_index, ScalarExpr::difference("r", indexed_name('t', n)));
  ci.relation = family == Family::ASCENDING ? Relation::GE : Relation::LE;
  return ci;
}

inline ChainInequality build_chain(Family family, int member, const ParamSet& params) {
  params.validate();
  return build_chain(family, member, params.k);
}

/// All hypotheses for k operators: n ascending then the descending members.
inline std::vector<ChainInequality> hypothesis_set(int k) {
  std::vector<ChainInequality> out;
  for (int m = 1; m <= ascending_members(k); ++m) out.push_back(build_chain(Family::ASCENDING, m, k));
  for (int q = 1; q <= descending_members(k); ++q) out.push_back(build_chain(Family::DESCENDING, q, k));
  return out;
}

inline std::vector<ChainInequality> hypothesis_set(const ParamSet& params) {
  params.validate();
  return hypothesis_set(params.k);
}

}  // namespace oplab
