#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "exrew/extreal.hpp"

namespace exrew::pgcl {

// A program state: a finite-support map from variables to nonnegative
// rationals; unlisted variables read as 0. Canonical form never stores
// explicit zeros, so structural equality is support-insensitive.
class ProgramState {
public:
    ProgramState() = default;

    Rational get(const std::string& var) const;
    ProgramState with(const std::string& var, const Rational& value) const;  // v >= 0

    bool operator==(const ProgramState& o) const { return values_ == o.values_; }
    bool operator!=(const ProgramState& o) const { return !(*this == o); }

    const std::map<std::string, Rational>& entries() const { return values_; }

    // "x=1/2,y=3"; the empty state renders as "".
    std::string str() const;
    static ProgramState parse(const std::string& text);

private:
    std::map<std::string, Rational> values_;
};

// --- arithmetic expressions -------------------------------------------------

struct AExpr;
using AExprPtr = std::shared_ptr<const AExpr>;

// Literals, variables, +, monus, *. Evaluation is total and stays in the
// nonnegative rationals: subtraction clamps at zero.
struct AExpr {
    enum class Kind { Lit, Var, Add, Monus, Mul };
    Kind kind;
    Rational lit;     // Kind::Lit
    std::string var;  // Kind::Var
    AExprPtr lhs, rhs;

    static AExprPtr literal(Rational q);
    static AExprPtr variable(std::string name);
    static AExprPtr add(AExprPtr a, AExprPtr b);
    static AExprPtr monus(AExprPtr a, AExprPtr b);
    static AExprPtr mul(AExprPtr a, AExprPtr b);
};

Rational eval_aexpr(const AExpr& e, const ProgramState& state);
bool aexpr_equal(const AExprPtr& a, const AExprPtr& b);
std::string aexpr_str(const AExpr& e);

// --- boolean expressions ----------------------------------------------------

struct BExpr;
using BExprPtr = std::shared_ptr<const BExpr>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct BExpr {
    enum class Kind { True, False, Cmp, And, Or, Not };
    Kind kind;
    CmpOp op = CmpOp::Eq;  // Kind::Cmp
    AExprPtr alhs, arhs;   // Kind::Cmp
    BExprPtr lhs, rhs;     // And/Or; Not uses lhs only

    static BExprPtr btrue();
    static BExprPtr bfalse();
    static BExprPtr cmp(CmpOp op, AExprPtr a, AExprPtr b);
    static BExprPtr band(BExprPtr a, BExprPtr b);
    static BExprPtr bor(BExprPtr a, BExprPtr b);
    static BExprPtr bnot(BExprPtr a);
};

bool eval_bexpr(const BExpr& b, const ProgramState& state);
bool bexpr_equal(const BExprPtr& a, const BExprPtr& b);
std::string bexpr_str(const BExpr& b);

// --- statements ---------------------------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    enum class Kind { Skip, Assign, Tick, Seq, Prob, Nondet, If, While };
    Kind kind;

    std::string var;   // Assign
    AExprPtr expr;     // Assign
    ExtValue reward;   // Tick: a nonnegative rational or infinity
    Rational prob;     // Prob: exact rational in [0, 1]
    BExprPtr guard;    // If / While
    StmtPtr a, b;      // substatements

    static StmtPtr skip();
    static StmtPtr assign(std::string var, AExprPtr expr);
    static StmtPtr tick(ExtValue reward);
    static StmtPtr seq(StmtPtr first, StmtPtr second);
    static StmtPtr prob_choice(StmtPtr left, Rational p, StmtPtr right);
    static StmtPtr nondet_choice(StmtPtr left, StmtPtr right);
    static StmtPtr ite(BExprPtr guard, StmtPtr then_branch, StmtPtr else_branch);
    static StmtPtr while_loop(BExprPtr guard, StmtPtr body);
};

// Structural equality; this is the program-identity notion used everywhere
// (in particular for the probabilistic-choice rule with equal branches).
bool stmt_equal(const StmtPtr& a, const StmtPtr& b);

// Canonical concrete syntax; parse(stmt_str(s)) reconstructs s exactly, so the
// rendering also serves as an interning key. Left-nested sequences are braced
// to preserve tree shape.
std::string stmt_str(const Stmt& s);

// Head-statement label for graph dumps: sequences render as "head; ...".
std::string stmt_head_label(const Stmt& s);

// Collects every variable mentioned by the program, sorted.
std::vector<std::string> stmt_variables(const Stmt& s);

}  // namespace exrew::pgcl
