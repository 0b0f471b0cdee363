#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "unitscheck/units.hpp"

namespace unitscheck {

/// 1-based source location of the first character of an entity.
struct Span {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

inline std::string loc_string(const Span& s) {
  return "(" + std::to_string(s.line) + ":" + std::to_string(s.column) + ")";
}

struct SourceError : std::runtime_error {
  Span span;
  SourceError(Span s, const std::string& msg)
      : std::runtime_error(s.file + ":" + std::to_string(s.line) + ":" +
                           std::to_string(s.column) + ": " + msg),
        span(std::move(s)) {}
};

struct LexError : SourceError {
  using SourceError::SourceError;
};
struct ParseError : SourceError {
  using SourceError::SourceError;
};
struct UnresolvedName : SourceError {
  using SourceError::SourceError;
};
struct DuplicateName : SourceError {
  using SourceError::SourceError;
};

// --- Expressions -----------------------------------------------------------

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct NumLit {
  std::string text;
};
struct VarRef {
  std::string name;
};
enum class BinaryOp { Add, Sub, Mul, Div };
struct Binary {
  BinaryOp op;
  ExprPtr lhs, rhs;
};
struct PowExpr {
  ExprPtr base;
  long long exponent;  // syntactic integer literal, possibly negated
};
struct CallExpr {
  std::string callee;
  Span callee_span;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<NumLit, VarRef, Binary, PowExpr, CallExpr> node;
  Span span;
};

// --- Statements ------------------------------------------------------------

struct DeclItem {
  std::string name;
  Span span;  // the name token
  std::optional<Expr> init;
};
struct Decl {
  std::vector<DeclItem> items;
};
struct Annotation {
  UnitSpecPtr spec;
  std::vector<std::pair<std::string, Span>> names;
};
struct Assign {
  std::string target;
  Span target_span;
  Expr value;
};

struct Stmt {
  std::variant<Decl, Annotation, Assign> node;
  Span span;  // first character of the statement
};

struct Param {
  std::string name;
  Span span;
};

struct FuncDef {
  std::string name;
  Span name_span;    // the function name on the header line
  Span header_span;  // first character of the header line
  std::vector<Param> params;
  std::vector<Stmt> body;  // includes annotations written directly above the header
};

/// A parsed source file. `raw_lines` keeps every line byte-for-byte,
/// including its own line ending, so rewriting can preserve the input
/// exactly.
struct Program {
  std::string file;
  std::vector<Stmt> statements;
  std::vector<FuncDef> functions;
  std::vector<std::string> raw_lines;
  std::string dominant_ending = "\n";
};

// --- Source text helpers ---------------------------------------------------

/// Split text into lines, each keeping its own ending ("\n" or "\r\n").
/// A final line without a newline is kept as-is.
inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start + 1));
    start = nl + 1;
  }
  return lines;
}

/// Strip the trailing line ending from a raw line.
inline std::string line_content(const std::string& raw) {
  std::size_t end = raw.size();
  if (end > 0 && raw[end - 1] == '\n') --end;
  if (end > 0 && raw[end - 1] == '\r') --end;
  return raw.substr(0, end);
}

/// The file's dominant line ending; ties and empty files resolve to "\n".
inline std::string dominant_ending(const std::vector<std::string>& raw_lines) {
  int crlf = 0;
  int lf = 0;
  for (const auto& l : raw_lines) {
    if (l.size() >= 2 && l[l.size() - 2] == '\r' && l.back() == '\n') {
      ++crlf;
    } else if (!l.empty() && l.back() == '\n') {
      ++lf;
    }
  }
  return crlf > lf ? "\r\n" : "\n";
}

inline std::string leading_whitespace(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return line.substr(0, i);
}

}  // namespace unitscheck
