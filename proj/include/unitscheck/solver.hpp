#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "unitscheck/constraints.hpp"

namespace unitscheck {

struct CalledOnInconsistent : std::logic_error {
  CalledOnInconsistent() : std::logic_error("solve outcome is inconsistent") {}
};

/// Right-hand-side column: a base unit, or (inside templates) a rigid
/// annotation unit variable.
struct RhsCol {
  bool is_var = false;
  std::string name;

  friend bool operator<(const RhsCol& a, const RhsCol& b) {
    return std::tie(a.is_var, a.name) < std::tie(b.is_var, b.name);
  }
  friend bool operator==(const RhsCol&, const RhsCol&) = default;
};

struct MatrixRow {
  std::vector<Rational> coeffs;  // indexed by col_order
  std::vector<Rational> rhs;     // indexed by rhs_cols
  std::set<ProvenanceTag> provenance;
};

struct AugMatrix {
  std::vector<MatrixRow> rows;
  std::vector<UnknownId> col_order;
  std::vector<RhsCol> rhs_cols;
};

namespace detail {

inline AugMatrix build_matrix_for(const std::vector<UnknownId>& cols,
                                  const std::vector<Constraint>& constraints) {
  AugMatrix m;
  m.col_order = cols;

  std::set<RhsCol> rhs_set;
  for (const auto& c : constraints) {
    for (const auto& [name, exp] : c.rhs.base) rhs_set.insert(RhsCol{false, name});
    for (const auto& [name, exp] : c.rhs.vars) rhs_set.insert(RhsCol{true, name});
  }
  m.rhs_cols.assign(rhs_set.begin(), rhs_set.end());

  std::map<UnknownId, std::size_t> col_index;
  for (std::size_t i = 0; i < cols.size(); ++i) col_index[cols[i]] = i;
  std::map<RhsCol, std::size_t> rhs_index;
  for (std::size_t i = 0; i < m.rhs_cols.size(); ++i) rhs_index[m.rhs_cols[i]] = i;

  for (const auto& c : constraints) {
    MatrixRow row;
    row.coeffs.assign(cols.size(), Rational(0));
    row.rhs.assign(m.rhs_cols.size(), Rational(0));
    for (const auto& [id, coeff] : c.terms) row.coeffs.at(col_index.at(id)) = coeff;
    for (const auto& [name, exp] : c.rhs.base) row.rhs.at(rhs_index.at(RhsCol{false, name})) = exp;
    for (const auto& [name, exp] : c.rhs.vars) row.rhs.at(rhs_index.at(RhsCol{true, name})) = exp;
    row.provenance = c.provenance;
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace detail

/// Encode the main constraint set as an exact-rational augmented matrix.
/// Column order fixes the critical-variable tie-break: literal unknowns in
/// creation order, then instantiation unknowns in creation order, then
/// declared variables in declaration order, so free columns fall on
/// annotatable names. Base-unit rhs columns are alphabetical.
inline AugMatrix build_matrix(const ConstraintSet& cs) {
  std::vector<UnknownId> cols;
  for (UnknownKind kind :
       {UnknownKind::LiteralUnit, UnknownKind::Instantiated, UnknownKind::DeclaredVar}) {
    for (const auto& u : cs.unknowns) {
      if (u.scope.empty() && u.kind == kind) cols.push_back(u.id);
    }
  }
  return detail::build_matrix_for(cols, cs.constraints);
}

/// Matrix for one function template solved in isolation. Literals and
/// nested-call instantiations come first, then body-declared locals, the
/// result, and finally the parameters, so leftover freedom lands on the
/// parameters and publishes as unit polymorphism.
inline AugMatrix build_template_matrix(const ConstraintSet& cs, const FunctionTemplate& t) {
  std::vector<UnknownId> cols;
  for (UnknownKind kind : {UnknownKind::LiteralUnit, UnknownKind::Instantiated}) {
    for (const auto& u : cs.unknowns) {
      if (u.scope == t.name && u.kind == kind) cols.push_back(u.id);
    }
  }
  for (UnknownId id : t.locals) cols.push_back(id);
  cols.push_back(t.result);
  for (UnknownId id : t.params) cols.push_back(id);
  return detail::build_matrix_for(cols, t.body);
}

struct RrefResult {
  AugMatrix matrix;
  std::map<int, int> pivots;          // coefficient column -> row
  std::vector<int> free_cols;         // non-pivot coefficient columns
  std::vector<int> inconsistent_rows; // all-zero coefficients, nonzero rhs
};

/// Exact Gauss-Jordan reduction of the full augmented matrix. Pivoting
/// continues through the rhs columns, which both canonicalizes the reduced
/// matrix under input row permutations and surfaces inconsistent rows as
/// rhs-block pivots. Eliminating with a pivot row unions its provenance
/// into every row it modifies.
inline RrefResult rref(AugMatrix m) {
  const std::size_t ncoeff = m.col_order.size();
  const std::size_t total = ncoeff + m.rhs_cols.size();
  auto entry = [&](MatrixRow& r, std::size_t c) -> Rational& {
    return c < ncoeff ? r.coeffs[c] : r.rhs[c - ncoeff];
  };

  RrefResult result;
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < total && pivot_row < m.rows.size(); ++c) {
    std::size_t r = pivot_row;
    while (r < m.rows.size() && entry(m.rows[r], c).is_zero()) ++r;
    if (r == m.rows.size()) continue;
    std::swap(m.rows[r], m.rows[pivot_row]);

    MatrixRow& pr = m.rows[pivot_row];
    Rational scale = entry(pr, c).inv();
    if (scale != Rational(1)) {
      for (auto& v : pr.coeffs) v *= scale;
      for (auto& v : pr.rhs) v *= scale;
    }
    for (std::size_t rr = 0; rr < m.rows.size(); ++rr) {
      if (rr == pivot_row) continue;
      Rational factor = entry(m.rows[rr], c);
      if (factor.is_zero()) continue;
      MatrixRow& row = m.rows[rr];
      for (std::size_t k = 0; k < row.coeffs.size(); ++k) row.coeffs[k] -= factor * pr.coeffs[k];
      for (std::size_t k = 0; k < row.rhs.size(); ++k) row.rhs[k] -= factor * pr.rhs[k];
      row.provenance.insert(pr.provenance.begin(), pr.provenance.end());
    }
    if (c < ncoeff) {
      result.pivots[static_cast<int>(c)] = static_cast<int>(pivot_row);
    } else {
      result.inconsistent_rows.push_back(static_cast<int>(pivot_row));
    }
    ++pivot_row;
  }

  for (std::size_t c = 0; c < ncoeff; ++c) {
    if (!result.pivots.count(static_cast<int>(c))) result.free_cols.push_back(static_cast<int>(c));
  }
  result.matrix = std::move(m);
  return result;
}

/// The unit of one unknown, expressed over base units (and rigid unit
/// variables inside templates) plus exponents of the free unknowns.
struct SymbolicUnit {
  UnitNorm ground;
  std::map<UnknownId, Rational> free_terms;

  friend bool operator==(const SymbolicUnit&, const SymbolicUnit&) = default;
};

struct SolveOutcome {
  struct Conflict {
    std::set<ProvenanceTag> provenance;
    UnitNorm residual;  // the reduced row states 1 = residual
  };

  bool consistent = true;
  std::vector<Conflict> conflicts;                 // nonempty iff inconsistent
  std::map<UnknownId, SymbolicUnit> assignments;   // per column unknown
  std::vector<UnknownId> free;                     // free unknowns, column order
};

/// Read the reduced matrix back as either an inconsistency (with the
/// provenance of every combined row) or a per-unknown symbolic solution in
/// which free unknowns map to themselves.
inline SolveOutcome classify(const RrefResult& r, const ConstraintSet& cs) {
  (void)cs;
  const AugMatrix& m = r.matrix;
  SolveOutcome out;

  if (!r.inconsistent_rows.empty()) {
    out.consistent = false;
    for (int row_idx : r.inconsistent_rows) {
      const MatrixRow& row = m.rows[static_cast<size_t>(row_idx)];
      SolveOutcome::Conflict conflict;
      conflict.provenance = row.provenance;
      for (std::size_t k = 0; k < row.rhs.size(); ++k) {
        if (row.rhs[k].is_zero()) continue;
        const RhsCol& col = m.rhs_cols[k];
        (col.is_var ? conflict.residual.vars : conflict.residual.base)[col.name] = row.rhs[k];
      }
      out.conflicts.push_back(std::move(conflict));
    }
    std::sort(out.conflicts.begin(), out.conflicts.end(),
              [](const SolveOutcome::Conflict& a, const SolveOutcome::Conflict& b) {
                return std::lexicographical_compare(a.provenance.begin(), a.provenance.end(),
                                                    b.provenance.begin(), b.provenance.end());
              });
    return out;
  }

  std::set<int> free_set(r.free_cols.begin(), r.free_cols.end());
  for (const auto& [col, row_idx] : r.pivots) {
    const MatrixRow& row = m.rows[static_cast<size_t>(row_idx)];
    SymbolicUnit su;
    for (std::size_t k = 0; k < row.rhs.size(); ++k) {
      if (row.rhs[k].is_zero()) continue;
      const RhsCol& rc = m.rhs_cols[k];
      (rc.is_var ? su.ground.vars : su.ground.base)[rc.name] = row.rhs[k];
    }
    for (int fc : r.free_cols) {
      const Rational& coeff = row.coeffs[static_cast<size_t>(fc)];
      if (!coeff.is_zero()) su.free_terms[m.col_order[static_cast<size_t>(fc)]] = -coeff;
    }
    out.assignments[m.col_order[static_cast<size_t>(col)]] = std::move(su);
  }
  for (int fc : r.free_cols) {
    UnknownId id = m.col_order[static_cast<size_t>(fc)];
    SymbolicUnit su;
    su.free_terms[id] = 1;
    out.assignments[id] = std::move(su);
    out.free.push_back(id);
  }
  return out;
}

/// The minimal annotation suggestion: declared variables among the free
/// unknowns, sorted alphabetically. Literal and instantiation freedom is
/// not reported; template freedom publishes as polymorphism instead.
inline std::vector<std::pair<std::string, Span>> critical_variables(const SolveOutcome& outcome,
                                                                    const ConstraintSet& cs) {
  if (!outcome.consistent) throw CalledOnInconsistent();
  std::vector<std::pair<std::string, Span>> result;
  for (UnknownId id : outcome.free) {
    const Unknown& u = cs.unknown(id);
    if (u.kind == UnknownKind::DeclaredVar && u.scope.empty()) {
      result.emplace_back(u.name, u.span);
    }
  }
  std::sort(result.begin(), result.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return result;
}

/// One published member of a function's unit specification.
struct TemplateMember {
  std::string name;
  Span span;
  UnitNorm unit;
  bool is_result = false;
  bool has_decl = false;
  int decl_item_index = 0;
};

struct FunctionSpec {
  std::string name;
  Span name_span;
  Span header_span;
  bool consistent = true;
  std::vector<SolveOutcome::Conflict> conflicts;
  std::vector<std::pair<std::string, UnitNorm>> params;  // in parameter order
  UnitNorm result;
  std::vector<TemplateMember> members;  // params with declarations, locals, result
};

namespace detail {

inline std::string unit_var_name(int index) {
  std::string name;
  int n = index;
  do {
    name.insert(name.begin(), static_cast<char>('a' + n % 26));
    n = n / 26 - 1;
  } while (n >= 0);
  return name;
}

}  // namespace detail

/// Solve every function template in isolation and publish its unit
/// specification. Free parameters are named 'a, 'b, ... in parameter
/// order; any other free declared member continues the sequence. Names
/// already fixed by annotations are kept and never reused.
inline std::map<std::string, FunctionSpec> solve_templates(const ConstraintSet& cs) {
  std::map<std::string, FunctionSpec> specs;
  for (const auto& name : cs.template_order) {
    const FunctionTemplate& t = cs.templates.at(name);
    FunctionSpec spec;
    spec.name = t.name;
    spec.name_span = t.name_span;
    spec.header_span = t.header_span;

    RrefResult rr = rref(build_template_matrix(cs, t));
    SolveOutcome outcome = classify(rr, cs);
    if (!outcome.consistent) {
      spec.consistent = false;
      spec.conflicts = std::move(outcome.conflicts);
      specs.emplace(name, std::move(spec));
      continue;
    }

    std::set<std::string> reserved(t.rigid_vars.begin(), t.rigid_vars.end());
    std::map<UnknownId, std::string> var_names;
    int counter = 0;
    auto next_name = [&]() {
      std::string candidate;
      do {
        candidate = detail::unit_var_name(counter++);
      } while (reserved.count(candidate));
      return candidate;
    };
    std::set<UnknownId> free_set(outcome.free.begin(), outcome.free.end());
    for (UnknownId id : t.params) {
      if (free_set.count(id)) var_names[id] = next_name();
    }
    for (UnknownId id : outcome.free) {
      if (var_names.count(id)) continue;
      const Unknown& u = cs.unknown(id);
      if (u.kind == UnknownKind::DeclaredVar || u.kind == UnknownKind::Result) {
        var_names[id] = next_name();
      }
    }

    auto unit_of = [&](UnknownId id) {
      const SymbolicUnit& su = outcome.assignments.at(id);
      UnitNorm u = su.ground;
      for (const auto& [fid, exp] : su.free_terms) {
        detail::add_scaled(u.vars, std::map<std::string, Rational>{{var_names.at(fid), exp}}, 1);
      }
      return u;
    };

    for (UnknownId id : t.params) {
      spec.params.emplace_back(cs.unknown(id).name, unit_of(id));
    }
    spec.result = unit_of(t.result);

    auto add_member = [&](UnknownId id, bool is_result) {
      const Unknown& u = cs.unknown(id);
      spec.members.push_back(TemplateMember{u.name, u.span, unit_of(id), is_result, u.has_decl,
                                            u.decl_item_index});
    };
    add_member(t.result, true);
    for (UnknownId id : t.params) add_member(id, false);
    for (UnknownId id : t.locals) add_member(id, false);

    specs.emplace(name, std::move(spec));
  }
  return specs;
}

}  // namespace unitscheck
