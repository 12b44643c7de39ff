#pragma once

#include <stdexcept>
#include <string>

#include "exrew/pgcl/ast.hpp"

namespace exrew::pgcl {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& reason)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + reason),
          line(line),
          column(column) {}
    std::size_t line;
    std::size_t column;
};

// Concrete syntax:
//
//   skip
//   x := e
//   tick(q)                  q a rational literal or inf
//   s1 ; s2
//   { s1 } [p] { s2 }        probabilistic choice, p a rational in [0,1]
//   { s1 } [] { s2 }         nondeterministic choice
//   if (b) { s1 } else { s2 }
//   while (b) { s }
//
// Arithmetic: rationals ("7", "1/2"), identifiers, +, - (monus), * with the
// usual precedence. Guards: comparisons (=, !=, <, <=, >, >=), &&, ||, !,
// true, false. "//" starts a line comment. A brace group "{ s }" also works
// as plain statement grouping.
StmtPtr parse_program(const std::string& text);

// For postexpectation syntax and tests.
AExprPtr parse_aexpr(const std::string& text);
BExprPtr parse_bexpr(const std::string& text);

}  // namespace exrew::pgcl
