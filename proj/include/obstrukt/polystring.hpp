#pragma once

// Parser for the polynomial strings used in presentation files.
//
//   poly   := ['-'] term (('+' | '-') term)*
//   term   := [coeff '*'] factor ('*' factor)*  |  coeff
//   factor := name ['^' int] | 'cup1' '(' poly ',' poly ')' | '(' poly ')' ['^' int]
//   name   := [A-Za-z_][A-Za-z0-9_']*
//
// `cup1(...)` and parenthesised groups are only accepted when the caller
// enables cup-1 syntax.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "obstrukt/error.hpp"

namespace obstrukt::poly {

struct Poly;

struct Factor {
  enum class Kind { Name, Cup1, Group };
  Kind kind = Kind::Name;
  std::string name;          // Kind::Name
  unsigned exponent = 1;
  std::vector<Poly> args;    // two operands for Cup1, one for Group
  std::size_t column = 0;    // 1-based
};

struct Term {
  std::int64_t coeff = 1;
  std::vector<Factor> factors;  // empty => constant term
  std::size_t column = 0;
};

struct Poly {
  std::vector<Term> terms;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t column, const std::string& msg)
      : Error(ErrorCode::ParseError, "column " + std::to_string(column) + ": " + msg), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

struct ParseOptions {
  bool allow_cup1 = false;
};

Poly parse(std::string_view text, const ParseOptions& options = {});

/// Every generator name mentioned anywhere in the expression.
std::vector<std::string> names(const Poly& p);

std::string to_string(const Poly& p);

}  // namespace obstrukt::poly
