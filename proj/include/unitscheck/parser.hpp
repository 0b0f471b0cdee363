#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "unitscheck/ast.hpp"
#include "unitscheck/lexer.hpp"

namespace unitscheck {

namespace detail {

inline Span span_between(const Span& first, const Span& last) {
  Span s = first;
  s.length = last.column + last.length - first.column;
  return s;
}

class Parser {
public:
  Parser(std::vector<Token> tokens, std::string file, std::vector<std::string> raw_lines)
      : toks_(std::move(tokens)), file_(std::move(file)), raw_lines_(std::move(raw_lines)) {}

  Program parse() {
    Program p;
    p.file = file_;
    p.raw_lines = raw_lines_;
    p.dominant_ending = dominant_ending(raw_lines_);

    skip_newlines();
    while (!at(Tok::Eof) && !at(Tok::KwContains)) {
      p.statements.push_back(parse_statement(/*in_function=*/false));
      end_of_statement();
    }
    if (accept(Tok::KwContains)) {
      end_of_statement();
      parse_contains_region(p);
    }
    expect(Tok::Eof, "end of file");
    return p;
  }

  /// Parses `unit ( <unitexpr> ) :: name {, name}` starting at 'unit'.
  std::pair<UnitSpecPtr, std::vector<std::pair<std::string, Span>>> parse_annotation_body() {
    expect(Tok::KwUnit, "'unit'");
    expect(Tok::LParen, "'('");
    UnitSpecPtr spec = parse_unit_expr();
    expect(Tok::RParen, "')'");
    expect(Tok::DColon, "'::'");
    std::vector<std::pair<std::string, Span>> names;
    Token first = expect(Tok::Ident, "a name");
    names.emplace_back(first.text, first.span);
    while (accept(Tok::Comma)) {
      Token n = expect(Tok::Ident, "a name");
      names.emplace_back(n.text, n.span);
    }
    return {std::move(spec), std::move(names)};
  }

private:
  std::vector<Token> toks_;
  std::string file_;
  std::vector<std::string> raw_lines_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    if (i >= toks_.size()) i = toks_.size() - 1;  // Eof
    return toks_[i];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k)) {
      throw ParseError(peek().span, std::string("expected ") + what + ", found " +
                                        tok_name(peek().kind));
    }
    return toks_[pos_++];
  }
  void skip_newlines() {
    while (at(Tok::Newline)) ++pos_;
  }
  void end_of_statement() {
    if (at(Tok::Eof)) return;
    expect(Tok::Newline, "end of line");
    skip_newlines();
  }

  Stmt parse_statement(bool in_function) {
    if (at(Tok::KwReal)) {
      if (peek(1).kind == Tok::KwFunction) {
        throw ParseError(peek().span,
                         in_function ? "function definitions cannot be nested"
                                     : "function definitions must follow 'contains'");
      }
      return parse_decl();
    }
    if (at(Tok::AnnotStart)) return parse_annotation();
    if (at(Tok::Ident)) return parse_assign();
    throw ParseError(peek().span, std::string("expected a statement, found ") +
                                      tok_name(peek().kind));
  }

  Stmt parse_decl() {
    Token kw = expect(Tok::KwReal, "'real'");
    expect(Tok::DColon, "'::'");
    Decl d;
    do {
      Token name = expect(Tok::Ident, "a variable name");
      DeclItem item{name.text, name.span, std::nullopt};
      if (accept(Tok::Eq)) item.init = parse_expr();
      d.items.push_back(std::move(item));
    } while (accept(Tok::Comma));
    Span last = toks_[pos_ - 1].span;
    return Stmt{std::move(d), span_between(kw.span, last)};
  }

  Stmt parse_annotation() {
    Token start = expect(Tok::AnnotStart, "'!='");
    auto [spec, names] = parse_annotation_body();
    Span last = toks_[pos_ - 1].span;
    return Stmt{Annotation{std::move(spec), std::move(names)}, span_between(start.span, last)};
  }

  Stmt parse_assign() {
    Token target = expect(Tok::Ident, "a variable name");
    expect(Tok::Eq, "'='");
    Expr value = parse_expr();
    Span stmt_span = span_between(target.span, value.span);
    return Stmt{Assign{target.text, target.span, std::move(value)}, stmt_span};
  }

  void parse_contains_region(Program& p) {
    std::vector<Stmt> pending;
    while (!at(Tok::Eof)) {
      if (at(Tok::AnnotStart)) {
        pending.push_back(parse_annotation());
        end_of_statement();
        continue;
      }
      if (at(Tok::KwReal) && peek(1).kind == Tok::KwFunction) {
        p.functions.push_back(parse_function(std::move(pending)));
        pending.clear();
        skip_newlines();
        continue;
      }
      throw ParseError(peek().span, std::string("expected a function definition, found ") +
                                        tok_name(peek().kind));
    }
    if (!pending.empty()) {
      throw ParseError(pending.front().span,
                       "annotation is not followed by a function definition");
    }
  }

  FuncDef parse_function(std::vector<Stmt> leading_annotations) {
    Token kw = expect(Tok::KwReal, "'real'");
    expect(Tok::KwFunction, "'function'");
    Token name = expect(Tok::Ident, "a function name");
    expect(Tok::LParen, "'('");
    FuncDef f;
    f.name = name.text;
    f.name_span = name.span;
    f.header_span = kw.span;
    if (!at(Tok::RParen)) {
      do {
        Token param = expect(Tok::Ident, "a parameter name");
        f.params.push_back(Param{param.text, param.span});
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    end_of_statement();

    f.body = std::move(leading_annotations);
    while (!at(Tok::KwEnd)) {
      if (at(Tok::Eof)) {
        throw ParseError(peek().span, "expected 'end function' before end of file");
      }
      f.body.push_back(parse_statement(/*in_function=*/true));
      end_of_statement();
    }
    expect(Tok::KwEnd, "'end'");
    expect(Tok::KwFunction, "'function'");
    if (at(Tok::Ident)) {
      Token trailing = expect(Tok::Ident, "the function name");
      if (trailing.text != f.name) {
        throw ParseError(trailing.span, "'end function " + trailing.text +
                                            "' does not match function '" + f.name + "'");
      }
    }
    end_of_statement();
    return f;
  }

  // --- Expressions ---------------------------------------------------------

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinaryOp op = accept(Tok::Plus) ? BinaryOp::Add : (++pos_, BinaryOp::Sub);
      Expr rhs = parse_term();
      Span s = span_between(lhs.span, rhs.span);
      lhs = Expr{Binary{op, std::make_unique<Expr>(std::move(lhs)),
                        std::make_unique<Expr>(std::move(rhs))},
                 s};
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_power();
    while (at(Tok::Star) || at(Tok::Slash)) {
      BinaryOp op = accept(Tok::Star) ? BinaryOp::Mul : (++pos_, BinaryOp::Div);
      Expr rhs = parse_power();
      Span s = span_between(lhs.span, rhs.span);
      lhs = Expr{Binary{op, std::make_unique<Expr>(std::move(lhs)),
                        std::make_unique<Expr>(std::move(rhs))},
                 s};
    }
    return lhs;
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (at(Tok::StarStar)) {
      ++pos_;
      auto [exponent, last] = parse_int_exponent();
      Span s = span_between(base.span, last);
      base = Expr{PowExpr{std::make_unique<Expr>(std::move(base)), exponent}, s};
    }
    return base;
  }

  std::pair<long long, Span> parse_int_exponent() {
    bool paren = accept(Tok::LParen);
    bool negative = false;
    if (paren && accept(Tok::Minus)) negative = true;
    Token num = expect(Tok::Number, "an integer exponent");
    long long value = integer_value(num);
    if (negative) value = -value;
    Span last = num.span;
    if (paren) last = expect(Tok::RParen, "')'").span;
    return {value, last};
  }

  long long integer_value(const Token& num) {
    if (num.text.find('.') != std::string::npos || num.text.find('e') != std::string::npos ||
        num.text.find('E') != std::string::npos) {
      throw ParseError(num.span, "exponent must be an integer literal");
    }
    try {
      return std::stoll(num.text);
    } catch (const std::out_of_range&) {
      throw ParseError(num.span, "integer exponent out of range");
    }
  }

  Expr parse_primary() {
    if (at(Tok::Number)) {
      Token t = toks_[pos_++];
      return Expr{NumLit{t.text}, t.span};
    }
    if (at(Tok::Ident)) {
      Token t = toks_[pos_++];
      if (at(Tok::LParen)) {
        ++pos_;
        CallExpr call{t.text, t.span, {}};
        if (!at(Tok::RParen)) {
          do {
            call.args.push_back(std::make_unique<Expr>(parse_expr()));
          } while (accept(Tok::Comma));
        }
        Token rp = expect(Tok::RParen, "')'");
        return Expr{std::move(call), span_between(t.span, rp.span)};
      }
      return Expr{VarRef{t.text}, t.span};
    }
    if (accept(Tok::LParen)) {
      Expr inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    throw ParseError(peek().span, std::string("expected an expression, found ") +
                                      tok_name(peek().kind));
  }

  // --- Unit expressions ----------------------------------------------------

  UnitSpecPtr parse_unit_expr() {
    UnitSpecPtr lhs = parse_unit_power();
    while (at(Tok::Star) || at(Tok::Slash)) {
      bool mul = accept(Tok::Star);
      if (!mul) ++pos_;
      UnitSpecPtr rhs = parse_unit_power();
      lhs = mul ? spec_mul(std::move(lhs), std::move(rhs))
                : spec_div(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  UnitSpecPtr parse_unit_power() {
    UnitSpecPtr operand = parse_unit_primary();
    while (at(Tok::StarStar)) {
      ++pos_;
      operand = spec_pow(std::move(operand), parse_unit_exponent());
    }
    return operand;
  }

  Rational parse_unit_exponent() {
    if (accept(Tok::LParen)) {
      bool negative = accept(Tok::Minus);
      Token num = expect(Tok::Number, "an integer");
      long long p = integer_value(num);
      long long q = 1;
      if (accept(Tok::Slash)) {
        Token den = expect(Tok::Number, "an integer");
        q = integer_value(den);
        if (q == 0) throw ParseError(den.span, "exponent denominator must be nonzero");
      }
      expect(Tok::RParen, "')'");
      return Rational(negative ? -p : p, q);
    }
    bool negative = accept(Tok::Minus);
    Token num = expect(Tok::Number, "an integer exponent");
    long long p = integer_value(num);
    return Rational(negative ? -p : p);
  }

  UnitSpecPtr parse_unit_primary() {
    if (at(Tok::Number)) {
      Token t = toks_[pos_++];
      if (t.text != "1") {
        throw ParseError(t.span, "only the literal 1 denotes the dimensionless unit");
      }
      return spec_one();
    }
    if (at(Tok::Ident)) {
      Token t = toks_[pos_++];
      return spec_base(t.text);
    }
    if (at(Tok::UnitVar)) {
      Token t = toks_[pos_++];
      return spec_var(t.text);
    }
    if (accept(Tok::LParen)) {
      UnitSpecPtr inner = parse_unit_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    throw ParseError(peek().span, std::string("expected a unit expression, found ") +
                                      tok_name(peek().kind));
  }
};

// --- Post-parse resolution ---------------------------------------------------

inline void resolve_expr(const Expr& e, const std::set<std::string>& vars,
                         const std::string& scope_desc) {
  struct Visitor {
    const std::set<std::string>& vars;
    const std::string& scope_desc;
    void operator()(const NumLit&) const {}
    void operator()(const VarRef& v) const {
      if (!vars.count(v.name)) {
        throw UnresolvedName(span, "unknown variable '" + v.name + "'" + scope_desc);
      }
    }
    void operator()(const Binary& b) const {
      resolve_expr(*b.lhs, vars, scope_desc);
      resolve_expr(*b.rhs, vars, scope_desc);
    }
    void operator()(const PowExpr& p) const { resolve_expr(*p.base, vars, scope_desc); }
    void operator()(const CallExpr& c) const {
      for (const auto& a : c.args) resolve_expr(*a, vars, scope_desc);
    }
    Span span;
  };
  std::visit(Visitor{vars, scope_desc, e.span}, e.node);
}

/// Scope checking: declarations unique, every variable reference and
/// annotation name resolves, every function assigns its result.
inline void resolve(const Program& p) {
  std::set<std::string> function_names;
  for (const auto& f : p.functions) {
    if (!function_names.insert(f.name).second) {
      throw DuplicateName(f.name_span, "duplicate function '" + f.name + "'");
    }
  }

  auto collect_scope = [](const std::vector<Stmt>& stmts, std::set<std::string>& vars,
                          const char* what) {
    for (const auto& s : stmts) {
      const auto* d = std::get_if<Decl>(&s.node);
      if (!d) continue;
      for (const auto& item : d->items) {
        if (!vars.insert(item.name).second) {
          throw DuplicateName(item.span,
                              std::string("duplicate ") + what + " '" + item.name + "'");
        }
      }
    }
  };

  std::set<std::string> main_vars;
  collect_scope(p.statements, main_vars, "declaration of");
  for (const auto& name : main_vars) {
    if (function_names.count(name)) {
      for (const auto& s : p.statements) {
        const auto* d = std::get_if<Decl>(&s.node);
        if (!d) continue;
        for (const auto& item : d->items) {
          if (item.name == name) {
            throw DuplicateName(item.span, "'" + name + "' is already a function name");
          }
        }
      }
    }
  }

  auto check_stmts = [&](const std::vector<Stmt>& stmts, const std::set<std::string>& vars,
                         const std::string& scope_desc) {
    for (const auto& s : stmts) {
      if (const auto* d = std::get_if<Decl>(&s.node)) {
        for (const auto& item : d->items) {
          if (item.init) resolve_expr(*item.init, vars, scope_desc);
        }
      } else if (const auto* a = std::get_if<Assign>(&s.node)) {
        if (!vars.count(a->target)) {
          throw UnresolvedName(a->target_span,
                               "unknown variable '" + a->target + "'" + scope_desc);
        }
        resolve_expr(a->value, vars, scope_desc);
      } else if (const auto* an = std::get_if<Annotation>(&s.node)) {
        for (const auto& [name, span] : an->names) {
          if (vars.count(name)) continue;
          if (scope_desc.empty() && function_names.count(name)) {
            throw UnresolvedName(span, "function '" + name +
                                           "' must be annotated at its definition");
          }
          throw UnresolvedName(span, "unknown name '" + name + "'" + scope_desc);
        }
      }
    }
  };

  check_stmts(p.statements, main_vars, "");

  for (const auto& f : p.functions) {
    std::set<std::string> scope;
    scope.insert(f.name);
    for (const auto& param : f.params) {
      if (param.name == f.name) {
        throw DuplicateName(param.span,
                            "parameter '" + param.name + "' collides with the function name");
      }
      if (!scope.insert(param.name).second) {
        throw DuplicateName(param.span, "duplicate parameter '" + param.name + "'");
      }
    }
    std::set<std::string> declared;
    for (const auto& s : f.body) {
      const auto* d = std::get_if<Decl>(&s.node);
      if (!d) continue;
      for (const auto& item : d->items) {
        if (item.name == f.name) {
          throw DuplicateName(item.span, "'" + item.name + "' is the function result");
        }
        if (!declared.insert(item.name).second) {
          throw DuplicateName(item.span, "duplicate declaration of '" + item.name + "'");
        }
        scope.insert(item.name);
      }
    }
    check_stmts(f.body, scope, " in function '" + f.name + "'");

    bool assigns_result = false;
    for (const auto& s : f.body) {
      const auto* a = std::get_if<Assign>(&s.node);
      if (a && a->target == f.name) {
        assigns_result = true;
        break;
      }
    }
    if (!assigns_result) {
      throw ParseError(f.name_span,
                       "function '" + f.name + "' never assigns its result");
    }
  }
}

}  // namespace detail

/// Parse a token stream into a resolved Program.
inline Program parse_program(std::vector<Token> tokens, std::string file,
                             std::vector<std::string> source_lines) {
  detail::Parser parser(std::move(tokens), std::move(file), std::move(source_lines));
  Program p = parser.parse();
  detail::resolve(p);
  return p;
}

/// Tokenize and parse a whole source text.
inline Program parse_source(const std::string& text, const std::string& file) {
  return parse_program(tokenize(text, file), file, split_lines(text));
}

struct ParsedAnnotation {
  UnitSpecPtr spec;
  std::vector<std::pair<std::string, Span>> names;
};

/// Parse a bare annotation body of the form `unit(<unitexpr>) :: name, ...`.
inline ParsedAnnotation parse_unit_annotation(const std::string& text,
                                              const std::string& file = "<annotation>") {
  detail::Parser parser(tokenize(text, file), file, split_lines(text));
  auto [spec, names] = parser.parse_annotation_body();
  return ParsedAnnotation{std::move(spec), std::move(names)};
}

}  // namespace unitscheck
