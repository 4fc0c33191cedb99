#pragma once

#include "oplab/errors.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

namespace oplab {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Scalar names: r, t<i>, p<i>, w<i> with i >= 1.
inline bool is_scalar_name(const std::string& s) {
  if (s == "r") return true;
  if (s.size() < 2) return false;
  if (s[0] != 't' && s[0] != 'p' && s[0] != 'w') return false;
  if (s[1] < '1' || s[1] > '9') return false;
  for (std::size_t i = 2; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

inline std::string indexed_name(char letter, int index) { return std::string(1, letter) + std::to_string(index); }

/// One signed term of an exponent: name, literal, or either divided by a
/// literal.
struct ScalarTerm {
  bool negative = false;
  std::variant<std::string, double> atom;
  std::optional<double> divisor;

  bool operator==(const ScalarTerm&) const = default;
};

/// Exponent expression: a signed sum of terms, printed without spaces
/// (e.g. `-t1/2`, `r-t2`, `p3`).
class ScalarExpr {
 public:
  ScalarExpr() = default;
  explicit ScalarExpr(std::vector<ScalarTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw RangeError("ScalarExpr: empty expression");
  }

  static ScalarExpr literal(double value) {
    ScalarTerm t;
    t.negative = std::signbit(value);
    t.atom = std::fabs(value);
    return ScalarExpr({t});
  }
  static ScalarExpr name(const std::string& n, bool negative = false, std::optional<double> divisor = {}) {
    if (!is_scalar_name(n)) throw RangeError("ScalarExpr: name outside vocabulary: " + n);
    ScalarTerm t;
    t.negative = negative;
    t.atom = n;
    t.divisor = divisor;
    return ScalarExpr({t});
  }
  /// a - b for two names, e.g. r - t_n.
  static ScalarExpr difference(const std::string& a, const std::string& b) {
    ScalarTerm ta{false, a, std::nullopt};
    ScalarTerm tb{true, b, std::nullopt};
    return ScalarExpr({ta, tb});
  }

  const std::vector<ScalarTerm>& terms() const { return terms_; }

  double resolve(const std::function<double(const std::string&)>& lookup) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
      double v = std::holds_alternative<double>(t.atom) ? std::get<double>(t.atom)
                                                        : lookup(std::get<std::string>(t.atom));
      if (t.divisor) v /= *t.divisor;
      sum += t.negative ? -v : v;
    }
    return sum;
  }

  double resolve(const std::map<std::string, double>& bindings) const {
    return resolve([&](const std::string& n) {
      auto it = bindings.find(n);
      if (it == bindings.end()) throw UnboundName(n);
      return it->second;
    });
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& t : terms_)
      if (std::holds_alternative<std::string>(t.atom)) out.push_back(std::get<std::string>(t.atom));
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      if (t.negative)
        s += '-';
      else if (i > 0)
        s += '+';
      s += std::holds_alternative<double>(t.atom) ? format_number(std::get<double>(t.atom))
                                                  : std::get<std::string>(t.atom);
      if (t.divisor) s += "/" + format_number(*t.divisor);
    }
    return s;
  }

  bool operator==(const ScalarExpr&) const = default;

 private:
  std::vector<ScalarTerm> terms_;
};

}  // namespace oplab
