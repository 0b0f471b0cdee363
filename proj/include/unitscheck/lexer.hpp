#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "unitscheck/ast.hpp"

namespace unitscheck {

enum class Tok {
  KwReal,
  KwFunction,
  KwEnd,
  KwContains,
  KwUnit,
  Ident,
  Number,
  UnitVar,  // 'name
  DColon,   // ::
  Comma,
  LParen,
  RParen,
  Plus,
  Minus,
  Star,
  StarStar,
  Slash,
  Eq,
  AnnotStart,  // != as the first non-blank token of a line
  Newline,
  Eof,
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::KwReal: return "'real'";
    case Tok::KwFunction: return "'function'";
    case Tok::KwEnd: return "'end'";
    case Tok::KwContains: return "'contains'";
    case Tok::KwUnit: return "'unit'";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::UnitVar: return "unit variable";
    case Tok::DColon: return "'::'";
    case Tok::Comma: return "','";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::StarStar: return "'**'";
    case Tok::Slash: return "'/'";
    case Tok::Eq: return "'='";
    case Tok::AnnotStart: return "'!='";
    case Tok::Newline: return "end of line";
    case Tok::Eof: return "end of file";
  }
  return "token";
}

struct Token {
  Tok kind;
  std::string text;
  Span span;
  std::vector<std::string> trivia;  // plain !-comments preceding this token
};

namespace detail {
inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
inline bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
}  // namespace detail

/// Tokenize a whole source file. Annotation comments beginning `!=` at the
/// first non-blank position of a line are lexed as token streams; all other
/// `!`-comments become trivia attached to the following token. A Newline
/// token is emitted for each line that both carries tokens and ends with a
/// newline character in the input.
inline std::vector<Token> tokenize(const std::string& source, const std::string& file) {
  std::vector<Token> out;
  std::vector<std::string> pending_trivia;

  auto push = [&](Tok kind, std::string text, int line, int col) {
    Token t{kind, std::move(text), Span{file, line, col, 0}, {}};
    t.span.length = static_cast<int>(t.text.size());
    t.trivia = std::move(pending_trivia);
    pending_trivia.clear();
    out.push_back(std::move(t));
  };

  const std::vector<std::string> raw = split_lines(source);
  for (std::size_t ln = 0; ln < raw.size(); ++ln) {
    const std::string line = line_content(raw[ln]);
    const bool has_newline = raw[ln].size() != line.size();
    const int lineno = static_cast<int>(ln) + 1;
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) continue;

    bool emitted = false;
    if (line[i] == '!') {
      if (i + 1 < line.size() && line[i + 1] == '=') {
        push(Tok::AnnotStart, "!=", lineno, static_cast<int>(i) + 1);
        emitted = true;
        i += 2;
      } else {
        pending_trivia.push_back(line.substr(i));
        continue;
      }
    }

    while (i < line.size()) {
      char c = line[i];
      if (c == ' ' || c == '\t') {
        ++i;
        continue;
      }
      const int col = static_cast<int>(i) + 1;
      if (c == '!') {
        // A mid-line ! always starts a comment.
        pending_trivia.push_back(line.substr(i));
        break;
      }
      if (detail::ident_start(c)) {
        std::size_t j = i;
        while (j < line.size() && detail::ident_char(line[j])) ++j;
        std::string word = line.substr(i, j - i);
        Tok kind = Tok::Ident;
        if (word == "real") kind = Tok::KwReal;
        else if (word == "function") kind = Tok::KwFunction;
        else if (word == "end") kind = Tok::KwEnd;
        else if (word == "contains") kind = Tok::KwContains;
        else if (word == "unit") kind = Tok::KwUnit;
        push(kind, std::move(word), lineno, col);
        i = j;
      } else if (detail::digit(c)) {
        std::size_t j = i;
        while (j < line.size() && detail::digit(line[j])) ++j;
        if (j < line.size() && line[j] == '.') {
          ++j;
          while (j < line.size() && detail::digit(line[j])) ++j;
        }
        if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
          if (k < line.size() && detail::digit(line[k])) {
            while (k < line.size() && detail::digit(line[k])) ++k;
            j = k;
          }
        }
        push(Tok::Number, line.substr(i, j - i), lineno, col);
        i = j;
      } else if (c == '\'') {
        std::size_t j = i + 1;
        if (j >= line.size() || !std::islower(static_cast<unsigned char>(line[j]))) {
          throw LexError(Span{file, lineno, col, 1},
                         "expected a lowercase identifier after '");
        }
        while (j < line.size() && detail::ident_char(line[j])) ++j;
        Token t{Tok::UnitVar, line.substr(i + 1, j - i - 1), Span{file, lineno, col, 0}, {}};
        t.span.length = static_cast<int>(j - i);
        t.trivia = std::move(pending_trivia);
        pending_trivia.clear();
        out.push_back(std::move(t));
        i = j;
      } else {
        switch (c) {
          case ':':
            if (i + 1 < line.size() && line[i + 1] == ':') {
              push(Tok::DColon, "::", lineno, col);
              i += 2;
            } else {
              throw LexError(Span{file, lineno, col, 1}, "expected '::'");
            }
            break;
          case ',': push(Tok::Comma, ",", lineno, col); ++i; break;
          case '(': push(Tok::LParen, "(", lineno, col); ++i; break;
          case ')': push(Tok::RParen, ")", lineno, col); ++i; break;
          case '+': push(Tok::Plus, "+", lineno, col); ++i; break;
          case '-': push(Tok::Minus, "-", lineno, col); ++i; break;
          case '*':
            if (i + 1 < line.size() && line[i + 1] == '*') {
              push(Tok::StarStar, "**", lineno, col);
              i += 2;
            } else {
              push(Tok::Star, "*", lineno, col);
              ++i;
            }
            break;
          case '/': push(Tok::Slash, "/", lineno, col); ++i; break;
          case '=': push(Tok::Eq, "=", lineno, col); ++i; break;
          default:
            throw LexError(Span{file, lineno, col, 1},
                           std::string("illegal character '") + c + "'");
        }
      }
      emitted = true;
    }
    if (emitted && has_newline) {
      // Newlines never claim trivia; comments float to the next real token.
      std::vector<std::string> keep = std::move(pending_trivia);
      pending_trivia.clear();
      push(Tok::Newline, "\n", lineno, static_cast<int>(line.size()) + 1);
      pending_trivia = std::move(keep);
    }
  }

  const int last_line = raw.empty() ? 1 : static_cast<int>(raw.size());
  push(Tok::Eof, "", last_line, raw.empty() ? 1 : static_cast<int>(line_content(raw.back()).size()) + 1);
  return out;
}

}  // namespace unitscheck
