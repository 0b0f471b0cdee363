#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "unitscheck/ast.hpp"

namespace unitscheck {

using UnknownId = int;

enum class UnknownKind { DeclaredVar, LiteralUnit, Instantiated, Param, Result };

/// A solver variable standing for the unit of a program variable, a numeric
/// literal occurrence, or a call-site copy of a template-local unknown.
struct Unknown {
  UnknownId id = -1;
  UnknownKind kind = UnknownKind::DeclaredVar;
  std::string name;        // display name
  Span span;               // declaration / literal / call site
  std::string scope;       // "" = main scope, otherwise the function name
  UnknownId origin = -1;   // Instantiated: the template-local unknown copied
  bool has_decl = false;   // a `real ::` declaration exists for this name
  int decl_item_index = 0; // position within its declaration statement
};

enum class ConstraintReason {
  AdditionOperands,
  SubtractionOperands,
  Assignment,
  AnnotationBinding,
  ArgumentPassing,
  ResultBinding,
  PowExponent,
};

inline const char* reason_text(ConstraintReason r) {
  switch (r) {
    case ConstraintReason::AdditionOperands: return "addition operands";
    case ConstraintReason::SubtractionOperands: return "subtraction operands";
    case ConstraintReason::Assignment: return "assignment";
    case ConstraintReason::AnnotationBinding: return "annotation";
    case ConstraintReason::ArgumentPassing: return "argument passing";
    case ConstraintReason::ResultBinding: return "call result";
    case ConstraintReason::PowExponent: return "power exponent";
  }
  return "constraint";
}

struct ProvenanceTag {
  Span span;
  ConstraintReason reason = ConstraintReason::Assignment;

  friend bool operator<(const ProvenanceTag& a, const ProvenanceTag& b) {
    return std::tie(a.span.line, a.span.column, a.span.length, a.reason, a.span.file) <
           std::tie(b.span.line, b.span.column, b.span.length, b.reason, b.span.file);
  }
  friend bool operator==(const ProvenanceTag& a, const ProvenanceTag& b) {
    return a.span == b.span && a.reason == b.reason;
  }
};

/// One linear equation over unit unknowns: the product of unit(u)^coeff over
/// `terms` equals `rhs`. The rhs is ground (base units only) everywhere
/// except inside function templates, where annotation unit variables appear
/// as rigid rhs symbols until instantiation replaces them per call site.
struct Constraint {
  std::map<UnknownId, Rational> terms;
  UnitNorm rhs;
  std::set<ProvenanceTag> provenance;
};

struct FunctionTemplate {
  std::string name;
  Span name_span;
  Span header_span;
  std::vector<UnknownId> params;  // in parameter order
  UnknownId result = -1;
  std::vector<UnknownId> locals;  // body-declared non-parameter variables
  std::vector<Constraint> body;
  std::vector<std::string> rigid_vars;  // annotation unit-variable names, sorted
};

struct ArityMismatch : SourceError {
  using SourceError::SourceError;
};
struct UnknownFunction : SourceError {
  using SourceError::SourceError;
};
struct PolymorphicAnnotationAtMainScope : SourceError {
  using SourceError::SourceError;
};
struct RecursionUnsupported : SourceError {
  using SourceError::SourceError;
};

struct ConstraintSet {
  std::vector<Constraint> constraints;  // main set, source order
  std::vector<Unknown> unknowns;        // registry; id == index
  std::map<std::string, FunctionTemplate> templates;
  std::vector<std::string> template_order;  // source order of definitions

  const Unknown& unknown(UnknownId id) const { return unknowns.at(static_cast<size_t>(id)); }

  UnknownId find_declared(const std::string& scope, const std::string& name) const {
    for (const auto& u : unknowns) {
      if (u.scope == scope && u.name == name &&
          (u.kind == UnknownKind::DeclaredVar || u.kind == UnknownKind::Param ||
           u.kind == UnknownKind::Result)) {
        return u.id;
      }
    }
    return -1;
  }

  UnknownId add_unknown(UnknownKind kind, std::string name, Span span, std::string scope) {
    Unknown u;
    u.id = static_cast<UnknownId>(unknowns.size());
    u.kind = kind;
    u.name = std::move(name);
    u.span = std::move(span);
    u.scope = std::move(scope);
    unknowns.push_back(std::move(u));
    return unknowns.back().id;
  }
};

/// The symbolic unit of an expression: a linear combination of unknowns in
/// exponent space.
using Terms = std::map<UnknownId, Rational>;

struct InstArg {
  Terms terms;
  Span span;
};

namespace detail {
inline void add_terms(Terms& dst, const Terms& src, const Rational& k) {
  for (const auto& [id, coeff] : src) {
    Rational r = coeff * k;
    auto it = dst.find(id);
    if (it == dst.end()) {
      if (!r.is_zero()) dst.emplace(id, std::move(r));
      continue;
    }
    it->second += r;
    if (it->second.is_zero()) dst.erase(it);
  }
}

inline void emit(std::vector<Constraint>& sink, Terms terms, UnitNorm rhs, ProvenanceTag tag) {
  if (terms.empty() && rhs.dimensionless()) return;  // tautology, carries nothing
  Constraint c;
  c.terms = std::move(terms);
  c.rhs = std::move(rhs);
  c.provenance.insert(std::move(tag));
  sink.push_back(std::move(c));
}
}  // namespace detail

/// Copy a function template into `sink` for one call site: every
/// template-local unknown becomes a fresh Instantiated unknown, rigid
/// annotation variables become fresh per-call unknowns, argument units are
/// equated with the parameter copies, and the copy of the result unknown is
/// returned.
inline UnknownId instantiate_template(ConstraintSet& cs, const FunctionTemplate& t,
                                      const std::vector<InstArg>& args, const Span& call_span,
                                      const std::string& target_scope,
                                      std::vector<Constraint>& sink) {
  if (args.size() != t.params.size()) {
    throw ArityMismatch(call_span, "call of '" + t.name + "' passes " +
                                       std::to_string(args.size()) + " argument(s), expected " +
                                       std::to_string(t.params.size()));
  }

  std::vector<std::pair<UnknownId, std::string>> locals;
  for (const auto& u : cs.unknowns) {
    if (u.scope == t.name) locals.emplace_back(u.id, u.name);
  }
  std::map<UnknownId, UnknownId> remap;
  for (const auto& [id, name] : locals) {
    UnknownId copy =
        cs.add_unknown(UnknownKind::Instantiated, t.name + "." + name, call_span, target_scope);
    cs.unknowns.back().origin = id;
    remap[id] = copy;
  }
  std::map<std::string, UnknownId> var_map;
  for (const auto& v : t.rigid_vars) {
    var_map[v] = cs.add_unknown(UnknownKind::Instantiated, t.name + ".'" + v, call_span,
                                target_scope);
  }

  for (const auto& c : t.body) {
    Constraint copy;
    for (const auto& [id, coeff] : c.terms) copy.terms[remap.at(id)] = coeff;
    copy.rhs.base = c.rhs.base;
    for (const auto& [var, exp] : c.rhs.vars) {
      detail::add_terms(copy.terms, Terms{{var_map.at(var), 1}}, -exp);
    }
    copy.provenance = c.provenance;
    copy.provenance.insert(ProvenanceTag{call_span, ConstraintReason::ResultBinding});
    sink.push_back(std::move(copy));
  }

  for (std::size_t i = 0; i < args.size(); ++i) {
    Terms terms = args[i].terms;
    detail::add_terms(terms, Terms{{remap.at(t.params[i]), 1}}, -1);
    detail::emit(sink, std::move(terms), UnitNorm{},
                 ProvenanceTag{args[i].span, ConstraintReason::ArgumentPassing});
  }
  return remap.at(t.result);
}

namespace detail {

class ConstraintGenerator {
public:
  explicit ConstraintGenerator(const Program& p) : prog_(p) {}

  ConstraintSet run() {
    build_templates();
    ScopeCtx main_ctx{"", &cs_.constraints, {}};
    declare_variables(prog_.statements, main_ctx, /*tmpl=*/nullptr);
    for (const auto& s : prog_.statements) gen_stmt(s, main_ctx);
    return std::move(cs_);
  }

private:
  const Program& prog_;
  ConstraintSet cs_;

  struct ScopeCtx {
    std::string scope;  // "" = main
    std::vector<Constraint>* sink;
    std::map<std::string, UnknownId> vars;
  };

  // --- Template construction ------------------------------------------------

  void build_templates() {
    std::map<std::string, const FuncDef*> defs;
    for (const auto& f : prog_.functions) defs[f.name] = &f;

    // Call graph edges carry the first call span for recursion reports.
    std::map<std::string, std::vector<std::pair<std::string, Span>>> edges;
    for (const auto& f : prog_.functions) {
      auto& out = edges[f.name];
      for (const auto& s : f.body) collect_calls(s, defs, out);
    }

    // Depth-first topological order; a back edge is recursion.
    std::map<std::string, int> state;  // 0 unvisited, 1 in progress, 2 done
    std::vector<const FuncDef*> order;
    auto visit = [&](auto&& self, const std::string& name) -> void {
      int& st = state[name];
      if (st == 2) return;
      st = 1;
      for (const auto& [callee, span] : edges[name]) {
        int callee_state = state[callee];
        if (callee_state == 1) {
          throw RecursionUnsupported(span, "recursive call of '" + callee + "'");
        }
        if (callee_state == 0) self(self, callee);
      }
      st = 2;
      order.push_back(defs.at(name));
    };
    for (const auto& f : prog_.functions) visit(visit, f.name);

    for (const FuncDef* f : order) build_template(*f);
    for (const auto& f : prog_.functions) cs_.template_order.push_back(f.name);
  }

  void collect_calls(const Stmt& s, const std::map<std::string, const FuncDef*>& defs,
                     std::vector<std::pair<std::string, Span>>& out) {
    auto walk_expr = [&](auto&& self, const Expr& e) -> void {
      if (const auto* b = std::get_if<Binary>(&e.node)) {
        self(self, *b->lhs);
        self(self, *b->rhs);
      } else if (const auto* p = std::get_if<PowExpr>(&e.node)) {
        self(self, *p->base);
      } else if (const auto* c = std::get_if<CallExpr>(&e.node)) {
        if (defs.count(c->callee)) out.emplace_back(c->callee, e.span);
        for (const auto& a : c->args) self(self, *a);
      }
    };
    if (const auto* d = std::get_if<Decl>(&s.node)) {
      for (const auto& item : d->items) {
        if (item.init) walk_expr(walk_expr, *item.init);
      }
    } else if (const auto* a = std::get_if<Assign>(&s.node)) {
      walk_expr(walk_expr, a->value);
    }
  }

  void build_template(const FuncDef& f) {
    FunctionTemplate t;
    t.name = f.name;
    t.name_span = f.name_span;
    t.header_span = f.header_span;

    ScopeCtx ctx{f.name, &t.body, {}};
    for (const auto& param : f.params) {
      UnknownId id = cs_.add_unknown(UnknownKind::Param, param.name, param.span, f.name);
      t.params.push_back(id);
      ctx.vars[param.name] = id;
    }
    t.result = cs_.add_unknown(UnknownKind::Result, f.name, f.name_span, f.name);
    ctx.vars[f.name] = t.result;

    declare_variables(f.body, ctx, &t);
    for (const auto& s : f.body) gen_stmt(s, ctx);

    std::set<std::string> rigid;
    for (const auto& c : t.body) {
      for (const auto& [var, exp] : c.rhs.vars) rigid.insert(var);
    }
    t.rigid_vars.assign(rigid.begin(), rigid.end());
    cs_.templates.emplace(f.name, std::move(t));
  }

  // Create the declared-variable unknowns for a scope, in declaration order.
  // A declaration of a parameter binds the parameter's unknown and records
  // its declaration site.
  void declare_variables(const std::vector<Stmt>& stmts, ScopeCtx& ctx, FunctionTemplate* tmpl) {
    for (const auto& s : stmts) {
      const auto* d = std::get_if<Decl>(&s.node);
      if (!d) continue;
      for (std::size_t i = 0; i < d->items.size(); ++i) {
        const DeclItem& item = d->items[i];
        auto existing = ctx.vars.find(item.name);
        if (existing != ctx.vars.end()) {
          Unknown& u = cs_.unknowns[static_cast<size_t>(existing->second)];
          u.span = item.span;
          u.has_decl = true;
          u.decl_item_index = static_cast<int>(i);
          continue;
        }
        UnknownId id = cs_.add_unknown(UnknownKind::DeclaredVar, item.name, item.span, ctx.scope);
        cs_.unknowns.back().has_decl = true;
        cs_.unknowns.back().decl_item_index = static_cast<int>(i);
        ctx.vars[item.name] = id;
        if (tmpl) tmpl->locals.push_back(id);
      }
    }
  }

  // --- Statement and expression walks ---------------------------------------

  void gen_stmt(const Stmt& s, ScopeCtx& ctx) {
    if (const auto* d = std::get_if<Decl>(&s.node)) {
      for (const auto& item : d->items) {
        if (!item.init) continue;
        Terms terms{{ctx.vars.at(item.name), 1}};
        add_terms(terms, fold_expr(*item.init, ctx), -1);
        emit(*ctx.sink, std::move(terms), UnitNorm{},
             ProvenanceTag{item.span, ConstraintReason::Assignment});
      }
    } else if (const auto* a = std::get_if<Assign>(&s.node)) {
      Terms terms{{ctx.vars.at(a->target), 1}};
      add_terms(terms, fold_expr(a->value, ctx), -1);
      emit(*ctx.sink, std::move(terms), UnitNorm{},
           ProvenanceTag{s.span, ConstraintReason::Assignment});
    } else if (const auto* an = std::get_if<Annotation>(&s.node)) {
      UnitNorm norm = unit_normalize(*an->spec);
      if (ctx.scope.empty() && !norm.vars.empty()) {
        throw PolymorphicAnnotationAtMainScope(
            s.span, "unit variables are only allowed inside function definitions");
      }
      for (const auto& [name, span] : an->names) {
        (void)span;
        Terms terms{{ctx.vars.at(name), 1}};
        emit(*ctx.sink, std::move(terms), norm,
             ProvenanceTag{s.span, ConstraintReason::AnnotationBinding});
      }
    }
  }

  Terms fold_expr(const Expr& e, ScopeCtx& ctx) {
    if (const auto* lit = std::get_if<NumLit>(&e.node)) {
      UnknownId id = cs_.add_unknown(UnknownKind::LiteralUnit, lit->text, e.span, ctx.scope);
      return Terms{{id, 1}};
    }
    if (const auto* var = std::get_if<VarRef>(&e.node)) {
      return Terms{{ctx.vars.at(var->name), 1}};
    }
    if (const auto* bin = std::get_if<Binary>(&e.node)) {
      Terms lhs = fold_expr(*bin->lhs, ctx);
      Terms rhs = fold_expr(*bin->rhs, ctx);
      switch (bin->op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: {
          Terms diff = lhs;
          add_terms(diff, rhs, -1);
          emit(*ctx.sink, std::move(diff), UnitNorm{},
               ProvenanceTag{e.span, bin->op == BinaryOp::Add
                                         ? ConstraintReason::AdditionOperands
                                         : ConstraintReason::SubtractionOperands});
          return lhs;  // both operands share a unit; the left one stands for it
        }
        case BinaryOp::Mul:
          add_terms(lhs, rhs, 1);
          return lhs;
        case BinaryOp::Div:
          add_terms(lhs, rhs, -1);
          return lhs;
      }
    }
    if (const auto* pow = std::get_if<PowExpr>(&e.node)) {
      Terms base = fold_expr(*pow->base, ctx);
      Terms scaled;
      add_terms(scaled, base, Rational(pow->exponent));
      return scaled;
    }
    const auto& call = std::get<CallExpr>(e.node);
    auto it = cs_.templates.find(call.callee);
    if (it == cs_.templates.end()) {
      throw UnknownFunction(call.callee_span, "unknown function '" + call.callee + "'");
    }
    std::vector<InstArg> args;
    args.reserve(call.args.size());
    for (const auto& arg : call.args) {
      args.push_back(InstArg{fold_expr(*arg, ctx), arg->span});
    }
    UnknownId result = instantiate_template(cs_, it->second, args, e.span, ctx.scope, *ctx.sink);
    return Terms{{result, 1}};
  }
};

}  // namespace detail

/// Walk a resolved program and produce its unit constraints: one template
/// per function, generalized once and instantiated freshly at each call
/// site, plus the main-scope constraint list in source order.
inline ConstraintSet gen_constraints(const Program& p) {
  return detail::ConstraintGenerator(p).run();
}

}  // namespace unitscheck
