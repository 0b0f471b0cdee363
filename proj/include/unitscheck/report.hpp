#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "unitscheck/parser.hpp"
#include "unitscheck/solver.hpp"

namespace unitscheck {

struct RefusesOnInconsistent : std::logic_error {
  RefusesOnInconsistent()
      : std::logic_error("refusing to synthesize annotations for an inconsistent program") {}
};

/// Everything one file's analysis produces: the program, its constraints,
/// the published function specifications and the main-scope solution.
struct Analysis {
  Program program;
  ConstraintSet cs;
  std::map<std::string, FunctionSpec> function_specs;
  RrefResult main_rref;
  SolveOutcome main_outcome;

  bool consistent() const {
    if (!main_outcome.consistent) return false;
    for (const auto& [name, spec] : function_specs) {
      if (!spec.consistent) return false;
    }
    return true;
  }
};

inline Analysis analyze(Program p) {
  Analysis a;
  a.cs = gen_constraints(p);
  a.program = std::move(p);
  a.function_specs = solve_templates(a.cs);
  a.main_rref = rref(build_matrix(a.cs));
  a.main_outcome = classify(a.main_rref, a.cs);
  return a;
}

inline Analysis analyze_source(const std::string& text, const std::string& file) {
  return analyze(parse_source(text, file));
}

// --- Reports -----------------------------------------------------------------

struct SuggestReport {
  std::string file;
  std::vector<std::pair<std::string, Span>> entries;  // sorted alphabetically
  int count = 0;
};

struct InferEntry {
  std::string name;
  Span span;
  std::string unit_text;
  UnitNorm unit;
  bool polymorphic = false;
  int insert_line = 0;  // 0 when there is no declaration line to annotate
  int insert_order = 0;
};

struct InferReport {
  std::string file;
  std::vector<InferEntry> entries;                       // source order
  std::vector<std::pair<std::string, Span>> unresolved;  // still mention a free declared unknown
};

struct CheckConflict {
  std::string message;
  std::vector<ProvenanceTag> spans;  // sorted by span
};

struct CheckReport {
  std::string file;
  bool consistent = true;
  std::vector<CheckConflict> conflicts;
};

struct Insertion {
  int before_line = 1;
  std::string indent;
  std::string text;  // annotation without indentation or line ending
  int order = 0;
};

struct RewritePlan {
  std::vector<Insertion> insertions;
};

/// (scope, name) pairs that already carry a unit annotation.
inline std::set<std::pair<std::string, std::string>> annotated_names(const Program& p) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& s : p.statements) {
    if (const auto* a = std::get_if<Annotation>(&s.node)) {
      for (const auto& [name, span] : a->names) out.emplace("", name);
    }
  }
  for (const auto& f : p.functions) {
    for (const auto& s : f.body) {
      if (const auto* a = std::get_if<Annotation>(&s.node)) {
        for (const auto& [name, span] : a->names) out.emplace(f.name, name);
      }
    }
  }
  return out;
}

inline SuggestReport make_suggest(const Analysis& a) {
  SuggestReport r;
  r.file = a.program.file;
  r.entries = critical_variables(a.main_outcome, a.cs);
  r.count = static_cast<int>(r.entries.size());
  return r;
}

inline InferReport make_infer(const Analysis& a) {
  if (!a.consistent()) throw CalledOnInconsistent();
  InferReport r;
  r.file = a.program.file;
  const auto annotated = annotated_names(a.program);

  for (const auto& u : a.cs.unknowns) {
    if (u.kind != UnknownKind::DeclaredVar || !u.scope.empty()) continue;
    if (annotated.count({"", u.name})) continue;
    const SymbolicUnit& su = a.main_outcome.assignments.at(u.id);
    if (!su.free_terms.empty()) {
      r.unresolved.emplace_back(u.name, u.span);
      continue;
    }
    InferEntry e;
    e.name = u.name;
    e.span = u.span;
    e.unit = su.ground;
    e.unit_text = unit_render(e.unit);
    e.polymorphic = !e.unit.vars.empty();
    e.insert_line = u.span.line;
    e.insert_order = u.decl_item_index;
    r.entries.push_back(std::move(e));
  }

  for (const auto& name : a.cs.template_order) {
    const FunctionSpec& spec = a.function_specs.at(name);
    for (const auto& member : spec.members) {
      if (annotated.count({name, member.name})) continue;
      InferEntry e;
      e.name = member.name;
      e.span = member.span;
      e.unit = member.unit;
      e.unit_text = unit_render(member.unit);
      e.polymorphic = !member.unit.vars.empty();
      if (member.is_result) {
        e.insert_line = spec.header_span.line;
        e.insert_order = 0;
      } else if (member.has_decl) {
        e.insert_line = member.span.line;
        e.insert_order = member.decl_item_index;
      } else {
        e.insert_line = 0;  // parameter never declared in the body
      }
      r.entries.push_back(std::move(e));
    }
  }

  auto by_location = [](const auto& x, const auto& y) {
    const Span& sx = x.span;
    const Span& sy = y.span;
    return std::tie(sx.line, sx.column) < std::tie(sy.line, sy.column);
  };
  std::stable_sort(r.entries.begin(), r.entries.end(), by_location);
  std::stable_sort(r.unresolved.begin(), r.unresolved.end(),
                   [](const auto& x, const auto& y) {
                     return std::tie(x.second.line, x.second.column) <
                            std::tie(y.second.line, y.second.column);
                   });
  return r;
}

inline CheckReport make_check(const Analysis& a) {
  CheckReport r;
  r.file = a.program.file;
  r.consistent = a.consistent();

  auto add_conflicts = [&](const std::vector<SolveOutcome::Conflict>& conflicts,
                           const std::string& context) {
    for (const auto& c : conflicts) {
      CheckConflict cc;
      cc.message = context + "constraints reduce to 1 = " + unit_render(c.residual);
      cc.spans.assign(c.provenance.begin(), c.provenance.end());
      r.conflicts.push_back(std::move(cc));
    }
  };
  for (const auto& name : a.cs.template_order) {
    const FunctionSpec& spec = a.function_specs.at(name);
    if (!spec.consistent) add_conflicts(spec.conflicts, "in function '" + name + "': ");
  }
  if (!a.main_outcome.consistent) add_conflicts(a.main_outcome.conflicts, "");
  return r;
}

// --- Console rendering -------------------------------------------------------

inline std::string render_suggest(const SuggestReport& r) {
  std::string out = r.file + ": " + std::to_string(r.count) +
                    " variable declarations suggested to be given a specification:\n";
  for (const auto& [name, span] : r.entries) {
    out += "    " + r.file + " " + loc_string(span) + "    " + name + "\n";
  }
  return out;
}

inline std::string render_infer(const InferReport& r) {
  std::string out;
  for (const auto& e : r.entries) {
    out += r.file + " " + loc_string(e.span) + "    unit(" + e.unit_text + ") :: " + e.name + "\n";
  }
  if (!r.unresolved.empty()) {
    out += "underdetermined:\n";
    for (const auto& [name, span] : r.unresolved) {
      out += "    " + r.file + " " + loc_string(span) + "    " + name + "\n";
    }
  }
  return out;
}

inline std::string render_check(const CheckReport& r) {
  if (r.consistent) return r.file + ": consistent\n";
  std::string out = r.file + ": inconsistent\n";
  for (const auto& c : r.conflicts) {
    out += "  conflict: " + c.message + "\n";
    for (const auto& tag : c.spans) {
      out += "    " + tag.span.file + " " + loc_string(tag.span) + "    " +
             reason_text(tag.reason) + "\n";
    }
  }
  return out;
}

// --- Synthesis ---------------------------------------------------------------

/// Plan and apply the insertion of `!= unit(U) :: name` lines above the
/// declarations (or function headers) of inferred entries that are not yet
/// annotated. Existing lines are copied byte-for-byte; inserted lines copy
/// the declaration line's indentation and the file's dominant line ending.
inline std::pair<RewritePlan, std::string> synthesize(const Program& p, const InferReport& r) {
  RewritePlan plan;
  for (const auto& e : r.entries) {
    if (e.insert_line <= 0) continue;
    Insertion ins;
    ins.before_line = e.insert_line;
    const auto& raw = p.raw_lines.at(static_cast<size_t>(e.insert_line - 1));
    ins.indent = leading_whitespace(line_content(raw));
    ins.text = "!= unit(" + e.unit_text + ") :: " + e.name;
    ins.order = e.insert_order;
    plan.insertions.push_back(std::move(ins));
  }
  std::stable_sort(plan.insertions.begin(), plan.insertions.end(),
                   [](const Insertion& a, const Insertion& b) {
                     return std::tie(a.before_line, a.order) < std::tie(b.before_line, b.order);
                   });

  std::string out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < p.raw_lines.size(); ++i) {
    while (next < plan.insertions.size() &&
           plan.insertions[next].before_line == static_cast<int>(i) + 1) {
      out += plan.insertions[next].indent + plan.insertions[next].text + p.dominant_ending;
      ++next;
    }
    out += p.raw_lines[i];
  }
  return {std::move(plan), std::move(out)};
}

/// Synthesis entry point guarded by the consistency check.
inline std::pair<RewritePlan, std::string> synthesize(const Analysis& a) {
  if (!a.consistent()) throw RefusesOnInconsistent();
  return synthesize(a.program, make_infer(a));
}

// --- Annotation burden -------------------------------------------------------

struct Burden {
  int total = 0;     // declared variables across all scopes
  int critical = 0;  // suggested annotations
  std::optional<double> reduction;  // 1 - critical/total; absent when total == 0
};

inline Burden annotation_burden(const Program& p, const SuggestReport& suggest) {
  Burden b;
  auto count_decls = [&](const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
      if (const auto* d = std::get_if<Decl>(&s.node)) {
        b.total += static_cast<int>(d->items.size());
      }
    }
  };
  count_decls(p.statements);
  for (const auto& f : p.functions) count_decls(f.body);
  b.critical = suggest.count;
  if (b.total > 0) {
    b.reduction = 1.0 - static_cast<double>(b.critical) / static_cast<double>(b.total);
  }
  return b;
}

inline std::string render_burden(const Burden& b) {
  std::ostringstream os;
  os << "    annotation reduction: ";
  if (b.reduction) {
    os << *b.reduction;
  } else {
    os << "n/a";
  }
  os << " (" << b.critical << " critical of " << b.total << " declared)\n";
  return os.str();
}

}  // namespace unitscheck
