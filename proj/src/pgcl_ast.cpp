#include "exrew/pgcl/ast.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace exrew::pgcl {

Rational ProgramState::get(const std::string& var) const {
    auto it = values_.find(var);
    return it == values_.end() ? Rational(0) : it->second;
}

ProgramState ProgramState::with(const std::string& var, const Rational& value) const {
    if (value < 0) throw std::invalid_argument("program values are nonnegative");
    ProgramState out = *this;
    if (value == 0)
        out.values_.erase(var);
    else
        out.values_[var] = value;
    return out;
}

std::string ProgramState::str() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [var, value] : values_) {
        if (!first) out << ",";
        out << var << "=" << rational_str(value);
        first = false;
    }
    return out.str();
}

ProgramState ProgramState::parse(const std::string& text) {
    ProgramState state;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        pos = comma == std::string::npos ? text.size() : comma + 1;
        if (item.empty()) continue;
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("state assignments look like 'x=1/2': '" + item + "'");
        Rational v = parse_rational(item.substr(eq + 1));
        if (v < 0) throw std::invalid_argument("negative program value in '" + item + "'");
        state = state.with(item.substr(0, eq), v);
    }
    return state;
}

// --- AExpr -------------------------------------------------------------------

AExprPtr AExpr::literal(Rational q) {
    if (q < 0) throw std::invalid_argument("negative literal");
    auto e = std::make_shared<AExpr>();
    e->kind = Kind::Lit;
    e->lit = std::move(q);
    return e;
}

AExprPtr AExpr::variable(std::string name) {
    auto e = std::make_shared<AExpr>();
    e->kind = Kind::Var;
    e->var = std::move(name);
    return e;
}

namespace {
AExprPtr make_binary(AExpr::Kind kind, AExprPtr a, AExprPtr b) {
    auto e = std::make_shared<AExpr>();
    e->kind = kind;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}
}  // namespace

AExprPtr AExpr::add(AExprPtr a, AExprPtr b) { return make_binary(Kind::Add, std::move(a), std::move(b)); }
AExprPtr AExpr::monus(AExprPtr a, AExprPtr b) { return make_binary(Kind::Monus, std::move(a), std::move(b)); }
AExprPtr AExpr::mul(AExprPtr a, AExprPtr b) { return make_binary(Kind::Mul, std::move(a), std::move(b)); }

Rational eval_aexpr(const AExpr& e, const ProgramState& state) {
    switch (e.kind) {
        case AExpr::Kind::Lit: return e.lit;
        case AExpr::Kind::Var: return state.get(e.var);
        case AExpr::Kind::Add: return eval_aexpr(*e.lhs, state) + eval_aexpr(*e.rhs, state);
        case AExpr::Kind::Monus: {
            Rational l = eval_aexpr(*e.lhs, state);
            Rational r = eval_aexpr(*e.rhs, state);
            return l <= r ? Rational(0) : Rational(l - r);
        }
        case AExpr::Kind::Mul: return eval_aexpr(*e.lhs, state) * eval_aexpr(*e.rhs, state);
    }
    throw std::logic_error("unreachable");
}

bool aexpr_equal(const AExprPtr& a, const AExprPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case AExpr::Kind::Lit: return a->lit == b->lit;
        case AExpr::Kind::Var: return a->var == b->var;
        default: return aexpr_equal(a->lhs, b->lhs) && aexpr_equal(a->rhs, b->rhs);
    }
}

namespace {

int aexpr_level(const AExpr& e) {
    switch (e.kind) {
        case AExpr::Kind::Lit:
        case AExpr::Kind::Var: return 3;
        case AExpr::Kind::Mul: return 2;
        default: return 1;  // Add / Monus
    }
}

void aexpr_print(const AExpr& e, std::ostream& out, int parent_level, bool is_right) {
    int level = aexpr_level(e);
    // Parenthesize when binding is weaker than the context, or when a
    // same-level operand appears on the right of a left-associative operator.
    bool parens = level < parent_level || (level == parent_level && is_right && level < 3);
    if (parens) out << "(";
    switch (e.kind) {
        case AExpr::Kind::Lit: out << rational_str(e.lit); break;
        case AExpr::Kind::Var: out << e.var; break;
        case AExpr::Kind::Add:
            aexpr_print(*e.lhs, out, level, false);
            out << " + ";
            aexpr_print(*e.rhs, out, level, true);
            break;
        case AExpr::Kind::Monus:
            aexpr_print(*e.lhs, out, level, false);
            out << " - ";
            aexpr_print(*e.rhs, out, level, true);
            break;
        case AExpr::Kind::Mul:
            aexpr_print(*e.lhs, out, level, false);
            out << " * ";
            aexpr_print(*e.rhs, out, level, true);
            break;
    }
    if (parens) out << ")";
}

}  // namespace

std::string aexpr_str(const AExpr& e) {
    std::ostringstream out;
    aexpr_print(e, out, 0, false);
    return out.str();
}

// --- BExpr -------------------------------------------------------------------

BExprPtr BExpr::btrue() {
    auto b = std::make_shared<BExpr>();
    b->kind = Kind::True;
    return b;
}

BExprPtr BExpr::bfalse() {
    auto b = std::make_shared<BExpr>();
    b->kind = Kind::False;
    return b;
}

BExprPtr BExpr::cmp(CmpOp op, AExprPtr a, AExprPtr b) {
    auto e = std::make_shared<BExpr>();
    e->kind = Kind::Cmp;
    e->op = op;
    e->alhs = std::move(a);
    e->arhs = std::move(b);
    return e;
}

BExprPtr BExpr::band(BExprPtr a, BExprPtr b) {
    auto e = std::make_shared<BExpr>();
    e->kind = Kind::And;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

BExprPtr BExpr::bor(BExprPtr a, BExprPtr b) {
    auto e = std::make_shared<BExpr>();
    e->kind = Kind::Or;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

BExprPtr BExpr::bnot(BExprPtr a) {
    auto e = std::make_shared<BExpr>();
    e->kind = Kind::Not;
    e->lhs = std::move(a);
    return e;
}

bool eval_bexpr(const BExpr& b, const ProgramState& state) {
    switch (b.kind) {
        case BExpr::Kind::True: return true;
        case BExpr::Kind::False: return false;
        case BExpr::Kind::Cmp: {
            Rational l = eval_aexpr(*b.alhs, state);
            Rational r = eval_aexpr(*b.arhs, state);
            switch (b.op) {
                case CmpOp::Eq: return l == r;
                case CmpOp::Ne: return l != r;
                case CmpOp::Lt: return l < r;
                case CmpOp::Le: return l <= r;
                case CmpOp::Gt: return l > r;
                case CmpOp::Ge: return l >= r;
            }
            throw std::logic_error("unreachable");
        }
        case BExpr::Kind::And: return eval_bexpr(*b.lhs, state) && eval_bexpr(*b.rhs, state);
        case BExpr::Kind::Or: return eval_bexpr(*b.lhs, state) || eval_bexpr(*b.rhs, state);
        case BExpr::Kind::Not: return !eval_bexpr(*b.lhs, state);
    }
    throw std::logic_error("unreachable");
}

bool bexpr_equal(const BExprPtr& a, const BExprPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case BExpr::Kind::True:
        case BExpr::Kind::False: return true;
        case BExpr::Kind::Cmp:
            return a->op == b->op && aexpr_equal(a->alhs, b->alhs) && aexpr_equal(a->arhs, b->arhs);
        case BExpr::Kind::Not: return bexpr_equal(a->lhs, b->lhs);
        default: return bexpr_equal(a->lhs, b->lhs) && bexpr_equal(a->rhs, b->rhs);
    }
}

namespace {

const char* cmp_str(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

int bexpr_level(const BExpr& b) {
    switch (b.kind) {
        case BExpr::Kind::Or: return 1;
        case BExpr::Kind::And: return 2;
        default: return 3;  // Not, Cmp, literals bind tightest
    }
}

void bexpr_print(const BExpr& b, std::ostream& out, int parent_level, bool is_right) {
    int level = bexpr_level(b);
    bool parens = level < parent_level || (level == parent_level && is_right && level < 3);
    if (parens) out << "(";
    switch (b.kind) {
        case BExpr::Kind::True: out << "true"; break;
        case BExpr::Kind::False: out << "false"; break;
        case BExpr::Kind::Cmp:
            out << aexpr_str(*b.alhs) << " " << cmp_str(b.op) << " " << aexpr_str(*b.arhs);
            break;
        case BExpr::Kind::And:
            bexpr_print(*b.lhs, out, level, false);
            out << " && ";
            bexpr_print(*b.rhs, out, level, true);
            break;
        case BExpr::Kind::Or:
            bexpr_print(*b.lhs, out, level, false);
            out << " || ";
            bexpr_print(*b.rhs, out, level, true);
            break;
        case BExpr::Kind::Not:
            // The grammar requires parentheses after '!'.
            out << "!(";
            bexpr_print(*b.lhs, out, 0, false);
            out << ")";
            break;
    }
    if (parens) out << ")";
}

}  // namespace

std::string bexpr_str(const BExpr& b) {
    std::ostringstream out;
    bexpr_print(b, out, 0, false);
    return out.str();
}

// --- Stmt --------------------------------------------------------------------

namespace {
std::shared_ptr<Stmt> make_stmt(Stmt::Kind kind) {
    auto s = std::make_shared<Stmt>();
    s->kind = kind;
    return s;
}
}  // namespace

StmtPtr Stmt::skip() { return make_stmt(Kind::Skip); }

StmtPtr Stmt::assign(std::string var, AExprPtr expr) {
    auto s = make_stmt(Kind::Assign);
    s->var = std::move(var);
    s->expr = std::move(expr);
    return s;
}

StmtPtr Stmt::tick(ExtValue reward) {
    auto s = make_stmt(Kind::Tick);
    s->reward = std::move(reward);
    return s;
}

StmtPtr Stmt::seq(StmtPtr first, StmtPtr second) {
    auto s = make_stmt(Kind::Seq);
    s->a = std::move(first);
    s->b = std::move(second);
    return s;
}

StmtPtr Stmt::prob_choice(StmtPtr left, Rational p, StmtPtr right) {
    if (p < 0 || p > 1) throw std::invalid_argument("choice probability outside [0, 1]");
    auto s = make_stmt(Kind::Prob);
    s->a = std::move(left);
    s->b = std::move(right);
    s->prob = std::move(p);
    return s;
}

StmtPtr Stmt::nondet_choice(StmtPtr left, StmtPtr right) {
    auto s = make_stmt(Kind::Nondet);
    s->a = std::move(left);
    s->b = std::move(right);
    return s;
}

StmtPtr Stmt::ite(BExprPtr guard, StmtPtr then_branch, StmtPtr else_branch) {
    auto s = make_stmt(Kind::If);
    s->guard = std::move(guard);
    s->a = std::move(then_branch);
    s->b = std::move(else_branch);
    return s;
}

StmtPtr Stmt::while_loop(BExprPtr guard, StmtPtr body) {
    auto s = make_stmt(Kind::While);
    s->guard = std::move(guard);
    s->a = std::move(body);
    return s;
}

bool stmt_equal(const StmtPtr& x, const StmtPtr& y) {
    if (x == y) return true;
    if (!x || !y || x->kind != y->kind) return false;
    switch (x->kind) {
        case Stmt::Kind::Skip: return true;
        case Stmt::Kind::Assign: return x->var == y->var && aexpr_equal(x->expr, y->expr);
        case Stmt::Kind::Tick: return x->reward == y->reward;
        case Stmt::Kind::Seq:
        case Stmt::Kind::Nondet:
            return stmt_equal(x->a, y->a) && stmt_equal(x->b, y->b);
        case Stmt::Kind::Prob:
            return x->prob == y->prob && stmt_equal(x->a, y->a) && stmt_equal(x->b, y->b);
        case Stmt::Kind::If:
            return bexpr_equal(x->guard, y->guard) && stmt_equal(x->a, y->a) &&
                   stmt_equal(x->b, y->b);
        case Stmt::Kind::While:
            return bexpr_equal(x->guard, y->guard) && stmt_equal(x->a, y->a);
    }
    throw std::logic_error("unreachable");
}

namespace {

void stmt_print(const Stmt& s, std::ostream& out) {
    switch (s.kind) {
        case Stmt::Kind::Skip: out << "skip"; break;
        case Stmt::Kind::Assign: out << s.var << " := " << aexpr_str(*s.expr); break;
        case Stmt::Kind::Tick: out << "tick(" << s.reward.str() << ")"; break;
        case Stmt::Kind::Seq:
            // A sequence nested on the left keeps its braces so that the
            // rendering round-trips to the identical tree.
            if (s.a->kind == Stmt::Kind::Seq) {
                out << "{ ";
                stmt_print(*s.a, out);
                out << " }";
            } else {
                stmt_print(*s.a, out);
            }
            out << "; ";
            stmt_print(*s.b, out);
            break;
        case Stmt::Kind::Prob:
            out << "{ ";
            stmt_print(*s.a, out);
            out << " } [" << rational_str(s.prob) << "] { ";
            stmt_print(*s.b, out);
            out << " }";
            break;
        case Stmt::Kind::Nondet:
            out << "{ ";
            stmt_print(*s.a, out);
            out << " } [] { ";
            stmt_print(*s.b, out);
            out << " }";
            break;
        case Stmt::Kind::If:
            out << "if (" << bexpr_str(*s.guard) << ") { ";
            stmt_print(*s.a, out);
            out << " } else { ";
            stmt_print(*s.b, out);
            out << " }";
            break;
        case Stmt::Kind::While:
            out << "while (" << bexpr_str(*s.guard) << ") { ";
            stmt_print(*s.a, out);
            out << " }";
            break;
    }
}

}  // namespace

std::string stmt_str(const Stmt& s) {
    std::ostringstream out;
    stmt_print(s, out);
    return out.str();
}

std::string stmt_head_label(const Stmt& s) {
    if (s.kind == Stmt::Kind::Seq) return stmt_head_label(*s.a) + "; ...";
    if (s.kind == Stmt::Kind::While) return "while (" + bexpr_str(*s.guard) + ") { ... }";
    if (s.kind == Stmt::Kind::If) return "if (" + bexpr_str(*s.guard) + ") { ... }";
    if (s.kind == Stmt::Kind::Prob) return "{...} [" + rational_str(s.prob) + "] {...}";
    if (s.kind == Stmt::Kind::Nondet) return "{...} [] {...}";
    return stmt_str(s);
}

namespace {

void collect_aexpr_vars(const AExpr& e, std::set<std::string>& vars) {
    switch (e.kind) {
        case AExpr::Kind::Var: vars.insert(e.var); break;
        case AExpr::Kind::Lit: break;
        default:
            collect_aexpr_vars(*e.lhs, vars);
            collect_aexpr_vars(*e.rhs, vars);
    }
}

void collect_bexpr_vars(const BExpr& b, std::set<std::string>& vars) {
    switch (b.kind) {
        case BExpr::Kind::Cmp:
            collect_aexpr_vars(*b.alhs, vars);
            collect_aexpr_vars(*b.arhs, vars);
            break;
        case BExpr::Kind::Not: collect_bexpr_vars(*b.lhs, vars); break;
        case BExpr::Kind::And:
        case BExpr::Kind::Or:
            collect_bexpr_vars(*b.lhs, vars);
            collect_bexpr_vars(*b.rhs, vars);
            break;
        default: break;
    }
}

void collect_stmt_vars(const Stmt& s, std::set<std::string>& vars) {
    switch (s.kind) {
        case Stmt::Kind::Skip:
        case Stmt::Kind::Tick: break;
        case Stmt::Kind::Assign:
            vars.insert(s.var);
            collect_aexpr_vars(*s.expr, vars);
            break;
        case Stmt::Kind::Seq:
        case Stmt::Kind::Prob:
        case Stmt::Kind::Nondet:
            collect_stmt_vars(*s.a, vars);
            collect_stmt_vars(*s.b, vars);
            break;
        case Stmt::Kind::If:
            collect_bexpr_vars(*s.guard, vars);
            collect_stmt_vars(*s.a, vars);
            collect_stmt_vars(*s.b, vars);
            break;
        case Stmt::Kind::While:
            collect_bexpr_vars(*s.guard, vars);
            collect_stmt_vars(*s.a, vars);
            break;
    }
}

}  // namespace

std::vector<std::string> stmt_variables(const Stmt& s) {
    std::set<std::string> vars;
    collect_stmt_vars(s, vars);
    return {vars.begin(), vars.end()};
}

}  // namespace exrew::pgcl
