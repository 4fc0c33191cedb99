#pragma once

#include "oplab/scalar_expr.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace oplab {

class OperatorWord;

/// Value-semantic owning pointer; lets the word variant hold itself.
template <class T>
class Box {
 public:
  explicit Box(T value) : p_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : p_(std::make_unique<T>(*other.p_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) p_ = std::make_unique<T>(*other.p_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const { return *p_; }
  const T* operator->() const { return p_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.p_ == *b.p_; }

 private:
  std::unique_ptr<T> p_;
};

/// A_index^{exponent}
struct Symbol {
  int index = 1;
  ScalarExpr exponent;
  bool operator==(const Symbol&) const = default;
};

/// Ordered product of at least two factors (juxtaposition).
struct Product {
  std::vector<OperatorWord> factors;
  bool operator==(const Product&) const;
};

/// (base)^{exponent}
struct Power {
  Box<OperatorWord> base;
  ScalarExpr exponent;
  bool operator==(const Power&) const = default;
};

class OperatorWord {
 public:
  using Node = std::variant<Symbol, Product, Power>;

  OperatorWord(Symbol s) : node_(std::move(s)) {}
  OperatorWord(Product p) : node_(std::move(p)) {}
  OperatorWord(Power p) : node_(std::move(p)) {}

  static OperatorWord symbol(int index, ScalarExpr exponent) { return Symbol{index, std::move(exponent)}; }
  static OperatorWord product(std::vector<OperatorWord> factors) {
    if (factors.size() == 1) return std::move(factors.front());
    return Product{std::move(factors)};
  }
  static OperatorWord power(OperatorWord base, ScalarExpr exponent) {
    return Power{Box<OperatorWord>(std::move(base)), std::move(exponent)};
  }
  /// X core X
  static OperatorWord sandwich(const OperatorWord& outer, OperatorWord core) {
    return Product{{outer, std::move(core), outer}};
  }

  const Node& node() const { return node_; }
  bool is_symbol() const { return std::holds_alternative<Symbol>(node_); }
  bool is_product() const { return std::holds_alternative<Product>(node_); }
  bool is_power() const { return std::holds_alternative<Power>(node_); }
  const Symbol& as_symbol() const { return std::get<Symbol>(node_); }
  const Product& as_product() const { return std::get<Product>(node_); }
  const Power& as_power() const { return std::get<Power>(node_); }

  bool operator==(const OperatorWord&) const = default;

  /// Largest symbol index occurring in the word.
  int max_index() const {
    return std::visit(
        [](const auto& n) -> int {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Symbol>) {
            return n.index;
          } else if constexpr (std::is_same_v<T, Product>) {
            int m = 0;
            for (const auto& f : n.factors) m = std::max(m, f.max_index());
            return m;
          } else {
            return n.base->max_index();
          }
        },
        node_);
  }

  /// True when the word reads the same from both ends (X core X shapes).
  bool is_palindromic() const {
    if (is_symbol()) return true;
    if (is_power()) return as_power().base->is_palindromic();
    const auto& f = as_product().factors;
    for (std::size_t i = 0, j = f.size() - 1; i < j; ++i, --j)
      if (!(f[i] == f[j])) return false;
    for (const auto& x : f)
      if (!x.is_palindromic()) return false;
    return true;
  }

 private:
  Node node_;
};

inline bool Product::operator==(const Product& other) const { return factors == other.factors; }

}  // namespace oplab
