#include "exrew/pgcl/expectation.hpp"

#include <cctype>
#include <mutex>
#include <unordered_map>

namespace exrew::pgcl {

namespace detail {

struct ExpNode {
    enum class Kind { Const, Var, Iverson, Sum, Prod, Min, Max, Subst };
    Kind kind;
    ExtValue value;                  // Const
    std::string var;                 // Var / Subst
    BExprPtr predicate;              // Iverson
    AExprPtr expr;                   // Subst
    std::shared_ptr<const ExpNode> lhs, rhs;

    mutable std::mutex memo_mu;
    mutable std::unordered_map<std::string, ExtValue> memo;
};

namespace {

ExtValue eval_node(const ExpNode& node, const ProgramState& state) {
    switch (node.kind) {
        case ExpNode::Kind::Const: return node.value;
        case ExpNode::Kind::Var: return ExtValue(state.get(node.var));
        case ExpNode::Kind::Iverson:
            return eval_bexpr(*node.predicate, state) ? ExtValue(1) : ExtValue::zero();
        default: break;
    }

    std::string key = state.str();
    {
        std::lock_guard<std::mutex> lock(node.memo_mu);
        auto it = node.memo.find(key);
        if (it != node.memo.end()) return it->second;
    }
    ExtValue result;
    switch (node.kind) {
        case ExpNode::Kind::Sum:
            result = eval_node(*node.lhs, state) + eval_node(*node.rhs, state);
            break;
        case ExpNode::Kind::Prod:
            result = eval_node(*node.lhs, state) * eval_node(*node.rhs, state);
            break;
        case ExpNode::Kind::Min:
            result = min(eval_node(*node.lhs, state), eval_node(*node.rhs, state));
            break;
        case ExpNode::Kind::Max:
            result = max(eval_node(*node.lhs, state), eval_node(*node.rhs, state));
            break;
        case ExpNode::Kind::Subst:
            result = eval_node(*node.lhs, state.with(node.var, eval_aexpr(*node.expr, state)));
            break;
        default:
            throw std::logic_error("unreachable");
    }
    std::lock_guard<std::mutex> lock(node.memo_mu);
    node.memo.emplace(std::move(key), result);
    return result;
}

std::shared_ptr<ExpNode> make_node(ExpNode::Kind kind) {
    auto n = std::make_shared<ExpNode>();
    n->kind = kind;
    return n;
}

}  // namespace

}  // namespace detail

using detail::ExpNode;

Expectation::Expectation() : Expectation(constant(ExtValue::zero())) {}

Expectation::Expectation(std::shared_ptr<const ExpNode> node) : node_(std::move(node)) {}

ExtValue Expectation::eval(const ProgramState& state) const {
    return detail::eval_node(*node_, state);
}

Expectation Expectation::constant(ExtValue v) {
    auto n = detail::make_node(ExpNode::Kind::Const);
    n->value = std::move(v);
    return Expectation(n);
}

Expectation Expectation::variable(std::string name) {
    auto n = detail::make_node(ExpNode::Kind::Var);
    n->var = std::move(name);
    return Expectation(n);
}

Expectation Expectation::iverson(BExprPtr predicate) {
    auto n = detail::make_node(ExpNode::Kind::Iverson);
    n->predicate = std::move(predicate);
    return Expectation(n);
}

Expectation Expectation::sum(Expectation a, Expectation b) {
    auto n = detail::make_node(ExpNode::Kind::Sum);
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expectation(n);
}
Expectation Expectation::product(Expectation a, Expectation b) {
    auto n = detail::make_node(ExpNode::Kind::Prod);
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expectation(n);
}
Expectation Expectation::min_of(Expectation a, Expectation b) {
    auto n = detail::make_node(ExpNode::Kind::Min);
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expectation(n);
}
Expectation Expectation::max_of(Expectation a, Expectation b) {
    auto n = detail::make_node(ExpNode::Kind::Max);
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expectation(n);
}

Expectation Expectation::substitute(Expectation x, std::string var, AExprPtr expr) {
    auto n = detail::make_node(ExpNode::Kind::Subst);
    n->lhs = x.node_;
    n->var = std::move(var);
    n->expr = std::move(expr);
    return Expectation(n);
}

std::function<ExtValue(const ProgramState&)> Expectation::as_function() const {
    return [copy = *this](const ProgramState& state) { return copy.eval(state); };
}

}  // namespace exrew::pgcl
