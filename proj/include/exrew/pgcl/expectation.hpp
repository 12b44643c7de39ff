#pragma once

#include <functional>
#include <memory>

#include "exrew/pgcl/ast.hpp"

namespace exrew::pgcl {

namespace detail {
struct ExpNode;
}

// A total map from program states to extended nonnegative reals, built from
// combinators: constants, variable reads, Iverson brackets, pointwise sum,
// product, binary min/max, and substitution. Evaluation is pure; results are
// memoized per (node, state) behind the scenes, so nested loop approximants
// evaluate in polynomial time per query.
class Expectation {
public:
    Expectation();  // the zero expectation

    ExtValue eval(const ProgramState& state) const;

    static Expectation constant(ExtValue v);
    static Expectation variable(std::string name);
    static Expectation iverson(BExprPtr predicate);
    static Expectation sum(Expectation a, Expectation b);
    static Expectation product(Expectation a, Expectation b);
    static Expectation min_of(Expectation a, Expectation b);
    static Expectation max_of(Expectation a, Expectation b);
    // X[x/e]: evaluates X on the state updated with x := e(state).
    static Expectation substitute(Expectation x, std::string var, AExprPtr expr);

    std::function<ExtValue(const ProgramState&)> as_function() const;

private:
    explicit Expectation(std::shared_ptr<const detail::ExpNode> node);
    std::shared_ptr<const detail::ExpNode> node_;
};

// Postexpectation concrete syntax: the arithmetic grammar extended with
// `inf`, Iverson brackets `[b]` over guards, and `min(e1, e2)` / `max(e1, e2)`.
// Examples: "y", "[x = 0] * (y + 2) + [x != 0] * y", "min(x, 1)".
Expectation parse_expectation(const std::string& text);

}  // namespace exrew::pgcl
