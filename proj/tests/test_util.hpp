#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "unitscheck/unitscheck.hpp"

namespace testutil {

inline std::string fixture_dir() { return UNITSCHECK_FIXTURE_DIR; }

inline std::string fixture_path(const std::string& name) { return fixture_dir() + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> corpus_files() {
  return {
      "corpus/chain.f90",       "corpus/polyfun.f90",  "corpus/twofuncs.f90",
      "corpus/forward.f90",     "corpus/multi.f90",    "corpus/literals.f90",
      "corpus/fixed_point.f90", "corpus/pow.f90",      "corpus/zeroarg.f90",
      "corpus/dimensionless.f90", "corpus/physics.f90", "corpus/funcchain.f90",
      "corpus/mixed.f90",       "corpus/twoparams.f90", "corpus/commented.f90",
      "corpus/crlf.f90",        "sample.f90",
  };
}

inline unitscheck::Analysis analyze_fixture(const std::string& name) {
  return unitscheck::analyze_source(slurp(fixture_path(name)), name);
}

// --- Random generation -------------------------------------------------------

inline unitscheck::Rational random_rational(std::mt19937& rng, int max_num = 4, int max_den = 3) {
  std::uniform_int_distribution<int> num(-max_num, max_num);
  std::uniform_int_distribution<int> den(1, max_den);
  return unitscheck::Rational(num(rng), den(rng));
}

inline unitscheck::UnitNorm random_unit_norm(std::mt19937& rng, bool with_vars = true) {
  static const std::vector<std::string> bases = {"m", "s", "kg"};
  static const std::vector<std::string> vars = {"a", "b"};
  unitscheck::UnitNorm u;
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_int_distribution<std::size_t> base_pick(0, bases.size() - 1);
  std::uniform_int_distribution<std::size_t> var_pick(0, vars.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    unitscheck::Rational exp = random_rational(rng);
    if (exp.is_zero()) continue;
    if (with_vars && coin(rng) == 0) {
      u = unit_mul(u, unitscheck::UnitNorm::unit_var(vars[var_pick(rng)], exp));
    } else {
      u = unit_mul(u, unitscheck::UnitNorm::base_unit(bases[base_pick(rng)], exp));
    }
  }
  return u;
}

/// Random main-scope constraint system over declared unknowns u0..u{n-1}
/// with small integer coefficients and ground rhs over up to `dims` base
/// units named p, q.
inline unitscheck::ConstraintSet random_system(std::mt19937& rng, int max_unknowns = 5,
                                               int max_dims = 2, int coeff_bound = 3) {
  using namespace unitscheck;
  std::uniform_int_distribution<int> nd(1, max_unknowns);
  std::uniform_int_distribution<int> dims_dist(1, max_dims);
  std::uniform_int_distribution<int> coeff(-coeff_bound, coeff_bound);
  const int n = nd(rng);
  const int dims = dims_dist(rng);
  std::uniform_int_distribution<int> rows(0, n + 2);

  ConstraintSet cs;
  for (int i = 0; i < n; ++i) {
    Span span{"random", i + 1, 1, 1};
    cs.add_unknown(UnknownKind::DeclaredVar, "u" + std::to_string(i), span, "");
    cs.unknowns.back().has_decl = true;
  }
  static const char* base_names[2] = {"p", "q"};
  const int m = rows(rng);
  for (int r = 0; r < m; ++r) {
    Constraint c;
    for (int i = 0; i < n; ++i) {
      int k = coeff(rng);
      if (k != 0) c.terms[i] = Rational(k);
    }
    for (int d = 0; d < dims; ++d) {
      int k = coeff(rng);
      if (k != 0) c.rhs.base[base_names[d]] = Rational(k);
    }
    if (c.terms.empty() && c.rhs.base.empty()) continue;
    c.provenance.insert(ProvenanceTag{Span{"random", r + 1, 1, 1},
                                      ConstraintReason::Assignment});
    cs.constraints.push_back(std::move(c));
  }
  return cs;
}

/// Exact check that a symbolic solution satisfies every constraint: the
/// ground parts must sum to the rhs and every free-unknown coefficient must
/// cancel.
inline bool solution_satisfies(const unitscheck::ConstraintSet& cs,
                               const unitscheck::SolveOutcome& outcome) {
  using namespace unitscheck;
  for (const auto& c : cs.constraints) {
    UnitNorm ground;
    std::map<UnknownId, Rational> free_acc;
    for (const auto& [id, coeff] : c.terms) {
      const SymbolicUnit& su = outcome.assignments.at(id);
      ground = unit_mul(ground, unit_pow(su.ground, coeff));
      for (const auto& [fid, exp] : su.free_terms) {
        Rational r = exp * coeff;
        auto it = free_acc.find(fid);
        if (it == free_acc.end()) {
          if (!r.is_zero()) free_acc.emplace(fid, r);
        } else {
          it->second += r;
          if (it->second.is_zero()) free_acc.erase(it);
        }
      }
    }
    if (!free_acc.empty()) return false;
    if (!(ground == c.rhs)) return false;
  }
  return true;
}

/// Brute-force search for an integer solution with every exponent in
/// [-bound, bound]. The constraints never couple base-unit dimensions, so
/// the vector search factorizes into one scalar search per dimension.
inline bool brute_force_has_solution(const unitscheck::ConstraintSet& cs, int bound = 6) {
  using namespace unitscheck;
  const int n = static_cast<int>(cs.unknowns.size());

  std::set<std::string> dims;
  for (const auto& c : cs.constraints) {
    for (const auto& [name, exp] : c.rhs.base) dims.insert(name);
  }
  if (dims.empty()) dims.insert("p");  // homogeneous: one dimension suffices

  for (const auto& dim : dims) {
    struct Row {
      std::vector<long long> coeffs;
      long long rhs = 0;
      int max_var = -1;
    };
    std::vector<Row> rows;
    for (const auto& c : cs.constraints) {
      Row row;
      row.coeffs.assign(static_cast<size_t>(n), 0);
      for (const auto& [id, coeff] : c.terms) {
        // Random systems use integer coefficients only.
        row.coeffs[static_cast<size_t>(id)] = static_cast<long long>(coeff.numerator());
        row.max_var = std::max(row.max_var, id);
      }
      auto it = c.rhs.base.find(dim);
      row.rhs = it == c.rhs.base.end() ? 0 : static_cast<long long>(it->second.numerator());
      rows.push_back(std::move(row));
    }

    std::vector<long long> x(static_cast<size_t>(n), 0);
    auto search = [&](auto&& self, int depth) -> bool {
      if (depth == n) return true;
      for (long long v = -bound; v <= bound; ++v) {
        x[static_cast<size_t>(depth)] = v;
        bool ok = true;
        for (const Row& row : rows) {
          if (row.max_var != depth) continue;
          long long sum = 0;
          for (int i = 0; i <= depth; ++i) sum += row.coeffs[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
          if (sum != row.rhs) {
            ok = false;
            break;
          }
        }
        if (ok && self(self, depth + 1)) return true;
      }
      return false;
    };
    bool constant_rows_ok = true;
    for (const Row& row : rows) {
      if (row.max_var == -1 && row.rhs != 0) constant_rows_ok = false;
    }
    if (!constant_rows_ok || !search(search, 0)) return false;
  }
  return true;
}

/// Fraction-free Bareiss elimination over the integer-scaled augmented
/// matrix; an algorithmically independent rank oracle.
inline int bareiss_rank(const unitscheck::AugMatrix& m) {
  using unitscheck::Rational;
  const std::size_t rows = m.rows.size();
  const std::size_t cols = m.col_order.size() + m.rhs_cols.size();
  if (rows == 0 || cols == 0) return 0;

  std::vector<std::vector<long long>> a(rows, std::vector<long long>(cols, 0));
  for (std::size_t r = 0; r < rows; ++r) {
    long long lcm = 1;
    auto entry = [&](std::size_t c) -> const Rational& {
      return c < m.col_order.size() ? m.rows[r].coeffs[c]
                                    : m.rows[r].rhs[c - m.col_order.size()];
    };
    for (std::size_t c = 0; c < cols; ++c) {
      long long den = static_cast<long long>(entry(c).denominator());
      lcm = std::lcm(lcm, den);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const Rational scaled = entry(c) * Rational(lcm);
      a[r][c] = static_cast<long long>(scaled.numerator());
    }
  }

  int rank = 0;
  long long prev = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[row]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c) {
        a[r][c] = (a[row][col] * a[r][c] - a[r][col] * a[row][c]) / prev;
      }
      a[r][col] = 0;
    }
    prev = a[row][col];
    ++rank;
    ++row;
  }
  return rank;
}

}  // namespace testutil
