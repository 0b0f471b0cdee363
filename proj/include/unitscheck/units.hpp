#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>

#include "unitscheck/rational.hpp"

namespace unitscheck {

/// Surface syntax of a unit expression as written in an annotation,
/// e.g. `m / s**2` or `('a)**2`. Trees are immutable and shared.
struct UnitSpec;
using UnitSpecPtr = std::shared_ptr<const UnitSpec>;

struct UnitSpec {
  struct One {};
  struct Base { std::string name; };
  struct Var { std::string name; };  // written 'name
  struct Mul { UnitSpecPtr lhs, rhs; };
  struct Div { UnitSpecPtr lhs, rhs; };
  struct Pow { UnitSpecPtr operand; Rational exponent; };

  using Node = std::variant<One, Base, Var, Mul, Div, Pow>;
  Node node;
};

inline UnitSpecPtr spec_one() { return std::make_shared<UnitSpec>(UnitSpec{UnitSpec::One{}}); }
inline UnitSpecPtr spec_base(std::string name) {
  return std::make_shared<UnitSpec>(UnitSpec{UnitSpec::Base{std::move(name)}});
}
inline UnitSpecPtr spec_var(std::string name) {
  return std::make_shared<UnitSpec>(UnitSpec{UnitSpec::Var{std::move(name)}});
}
inline UnitSpecPtr spec_mul(UnitSpecPtr a, UnitSpecPtr b) {
  return std::make_shared<UnitSpec>(UnitSpec{UnitSpec::Mul{std::move(a), std::move(b)}});
}
inline UnitSpecPtr spec_div(UnitSpecPtr a, UnitSpecPtr b) {
  return std::make_shared<UnitSpec>(UnitSpec{UnitSpec::Div{std::move(a), std::move(b)}});
}
inline UnitSpecPtr spec_pow(UnitSpecPtr a, Rational k) {
  return std::make_shared<UnitSpec>(UnitSpec{UnitSpec::Pow{std::move(a), std::move(k)}});
}

/// Normal form of a unit: exponent vectors over base-unit names and
/// unit-variable names. No stored exponent is zero; both maps empty
/// means the dimensionless unit 1.
struct UnitNorm {
  std::map<std::string, Rational> base;
  std::map<std::string, Rational> vars;

  bool dimensionless() const { return base.empty() && vars.empty(); }

  static UnitNorm base_unit(const std::string& name, Rational exp = 1) {
    UnitNorm u;
    if (!exp.is_zero()) u.base.emplace(name, std::move(exp));
    return u;
  }
  static UnitNorm unit_var(const std::string& name, Rational exp = 1) {
    UnitNorm u;
    if (!exp.is_zero()) u.vars.emplace(name, std::move(exp));
    return u;
  }

  friend bool operator==(const UnitNorm& a, const UnitNorm& b) {
    return a.base == b.base && a.vars == b.vars;
  }
  friend bool operator!=(const UnitNorm& a, const UnitNorm& b) { return !(a == b); }
};

namespace detail {
inline void add_scaled(std::map<std::string, Rational>& dst,
                       const std::map<std::string, Rational>& src, const Rational& k) {
  for (const auto& [name, exp] : src) {
    Rational r = exp * k;
    auto it = dst.find(name);
    if (it == dst.end()) {
      if (!r.is_zero()) dst.emplace(name, std::move(r));
      continue;
    }
    it->second += r;
    if (it->second.is_zero()) dst.erase(it);
  }
}
}  // namespace detail

/// Pointwise sum of exponents; zero exponents are dropped.
inline UnitNorm unit_mul(UnitNorm a, const UnitNorm& b) {
  detail::add_scaled(a.base, b.base, 1);
  detail::add_scaled(a.vars, b.vars, 1);
  return a;
}

/// Pointwise scaling of exponents; k == 0 collapses to the unit 1.
inline UnitNorm unit_pow(const UnitNorm& u, const Rational& k) {
  UnitNorm r;
  detail::add_scaled(r.base, u.base, k);
  detail::add_scaled(r.vars, u.vars, k);
  return r;
}

/// Fold a surface unit expression to its normal form. Multiplication sums
/// exponents, division subtracts, powers scale.
inline UnitNorm unit_normalize(const UnitSpec& spec) {
  struct Visitor {
    UnitNorm operator()(const UnitSpec::One&) const { return {}; }
    UnitNorm operator()(const UnitSpec::Base& b) const { return UnitNorm::base_unit(b.name); }
    UnitNorm operator()(const UnitSpec::Var& v) const { return UnitNorm::unit_var(v.name); }
    UnitNorm operator()(const UnitSpec::Mul& m) const {
      return unit_mul(unit_normalize(*m.lhs), unit_normalize(*m.rhs));
    }
    UnitNorm operator()(const UnitSpec::Div& d) const {
      return unit_mul(unit_normalize(*d.lhs), unit_pow(unit_normalize(*d.rhs), -1));
    }
    UnitNorm operator()(const UnitSpec::Pow& p) const {
      return unit_pow(unit_normalize(*p.operand), p.exponent);
    }
  };
  return std::visit(Visitor{}, spec.node);
}

namespace detail {
inline std::string render_factor(const std::string& name, bool is_var, const Rational& exp) {
  std::string head = is_var ? "'" + name : name;
  if (exp == Rational(1)) return head;
  if (is_var) head = "(" + head + ")";
  if (exp.is_integer()) return head + "**" + exp.str();
  return head + "**(" + exp.str() + ")";
}
}  // namespace detail

/// Deterministic rendering of a normal form back to surface syntax.
/// Positive-exponent factors come first (unit variables before base units,
/// each group alphabetical), joined by `*`; a single ` / ` then the
/// negative-exponent factors with their exponents shown positive, wrapped
/// in parentheses when there is more than one of them. The dimensionless
/// unit renders as `1`. The output always re-parses to the same UnitNorm.
inline std::string unit_render(const UnitNorm& u) {
  std::string pos;
  std::string neg;
  int neg_count = 0;
  auto emit = [&](const std::string& name, bool is_var, const Rational& exp) {
    if (exp.is_negative()) {
      if (!neg.empty()) neg += "*";
      neg += detail::render_factor(name, is_var, -exp);
      ++neg_count;
    } else {
      if (!pos.empty()) pos += "*";
      pos += detail::render_factor(name, is_var, exp);
    }
  };
  for (const auto& [name, exp] : u.vars) emit(name, true, exp);
  for (const auto& [name, exp] : u.base) emit(name, false, exp);

  if (pos.empty() && neg.empty()) return "1";
  std::string out = pos.empty() ? "1" : pos;
  if (!neg.empty()) {
    out += " / ";
    out += neg_count > 1 ? "(" + neg + ")" : neg;
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const UnitNorm& u) {
  return os << unit_render(u);
}

}  // namespace unitscheck
