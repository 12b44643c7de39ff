#include "exrew/pgcl/opsem.hpp"

#include <deque>
#include <set>
#include <sstream>

namespace exrew::pgcl {

Configuration Configuration::running(StmtPtr program, ProgramState state) {
    Configuration c;
    c.kind = Kind::Running;
    c.program = std::move(program);
    c.state = std::move(state);
    return c;
}

Configuration Configuration::terminated(ProgramState state) {
    Configuration c;
    c.kind = Kind::Terminated;
    c.state = std::move(state);
    return c;
}

Configuration Configuration::sink() { return Configuration{}; }

bool Configuration::operator==(const Configuration& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Sink: return true;
        case Kind::Terminated: return state == o.state;
        case Kind::Running: return state == o.state && stmt_equal(program, o.program);
    }
    return false;
}

std::string Configuration::key() const {
    switch (kind) {
        case Kind::Sink: return "!sink";
        case Kind::Terminated: return "!done|" + state.str();
        case Kind::Running: return stmt_str(*program) + "|" + state.str();
    }
    return {};
}

std::string Configuration::label() const {
    switch (kind) {
        case Kind::Sink: return "sink";
        case Kind::Terminated: return "done | " + state.str();
        case Kind::Running: return stmt_head_label(*program) + " | " + state.str();
    }
    return {};
}

namespace {

std::vector<std::pair<Configuration, Rational>> singleton(Configuration c) {
    return {{std::move(c), Rational(1)}};
}

// Wraps the outcomes of a substatement step with the pending continuation:
// a finished first component continues as the second, an unfinished one keeps
// the sequence around it.
std::vector<std::pair<Configuration, Rational>> lift_seq(
    std::vector<std::pair<Configuration, Rational>> inner, const StmtPtr& continuation) {
    std::vector<std::pair<Configuration, Rational>> out;
    out.reserve(inner.size());
    for (auto& [conf, p] : inner) {
        if (conf.kind == Configuration::Kind::Terminated)
            out.emplace_back(Configuration::running(continuation, std::move(conf.state)), p);
        else
            out.emplace_back(Configuration::running(Stmt::seq(conf.program, continuation),
                                                    std::move(conf.state)),
                             p);
    }
    return out;
}

}  // namespace

std::vector<ConfigStep> step(const Configuration& c) {
    switch (c.kind) {
        case Configuration::Kind::Sink:
            return {{OpAction::N, singleton(Configuration::sink())}};
        case Configuration::Kind::Terminated:
            return {{OpAction::N, singleton(Configuration::sink())}};
        case Configuration::Kind::Running:
            break;
    }

    const Stmt& s = *c.program;
    const ProgramState& sigma = c.state;
    switch (s.kind) {
        case Stmt::Kind::Skip:
        case Stmt::Kind::Tick:
            // tick behaves like skip operationally; its reward lives in rew_pgcl
            return {{OpAction::N, singleton(Configuration::terminated(sigma))}};
        case Stmt::Kind::Assign:
            return {{OpAction::N, singleton(Configuration::terminated(
                                      sigma.with(s.var, eval_aexpr(*s.expr, sigma))))}};
        case Stmt::Kind::Seq: {
            std::vector<ConfigStep> inner = step(Configuration::running(s.a, sigma));
            std::vector<ConfigStep> out;
            out.reserve(inner.size());
            for (auto& st : inner)
                out.push_back({st.action, lift_seq(std::move(st.outcomes), s.b)});
            return out;
        }
        case Stmt::Kind::Prob: {
            if (stmt_equal(s.a, s.b))
                return {{OpAction::N, singleton(Configuration::running(s.a, sigma))}};
            std::vector<std::pair<Configuration, Rational>> outcomes;
            if (s.prob > 0) outcomes.emplace_back(Configuration::running(s.a, sigma), s.prob);
            if (s.prob < 1)
                outcomes.emplace_back(Configuration::running(s.b, sigma), Rational(1 - s.prob));
            return {{OpAction::N, std::move(outcomes)}};
        }
        case Stmt::Kind::Nondet:
            return {{OpAction::L, singleton(Configuration::running(s.a, sigma))},
                    {OpAction::R, singleton(Configuration::running(s.b, sigma))}};
        case Stmt::Kind::If:
            return {{OpAction::N, singleton(Configuration::running(
                                      eval_bexpr(*s.guard, sigma) ? s.a : s.b, sigma))}};
        case Stmt::Kind::While:
            if (eval_bexpr(*s.guard, sigma))
                return {{OpAction::N, singleton(Configuration::running(
                                          Stmt::seq(s.a, c.program), sigma))}};
            return {{OpAction::N, singleton(Configuration::terminated(sigma))}};
    }
    throw std::logic_error("unreachable");
}

ExtValue rew_pgcl(const Configuration& c) {
    if (c.kind != Configuration::Kind::Running) return ExtValue::zero();
    const Stmt* s = c.program.get();
    while (s->kind == Stmt::Kind::Seq) s = s->a.get();
    return s->kind == Stmt::Kind::Tick ? s->reward : ExtValue::zero();
}

OperationalMdp::OperationalMdp() = default;

StateId OperationalMdp::intern(const Configuration& c) const {
    std::string key = c.key();
    std::lock_guard<std::mutex> lock(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    StateId id = static_cast<StateId>(configs_.size());
    configs_.push_back(c);
    index_.emplace(std::move(key), id);
    return id;
}

const Configuration& OperationalMdp::config(StateId s) const {
    std::lock_guard<std::mutex> lock(mu_);
    return configs_.at(s);
}

std::string OperationalMdp::action_name(ActionId a) const {
    switch (a) {
        case 0: return "N";
        case 1: return "L";
        case 2: return "R";
    }
    throw std::invalid_argument("bad action id");
}

const OperationalMdp::Row& OperationalMdp::row(StateId s) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = rows_.find(s);
        if (it != rows_.end()) return *it->second;
    }
    // Expand outside the lock; interning below re-locks.
    Configuration c = config(s);
    std::vector<ConfigStep> steps = step(c);
    auto fresh = std::make_unique<Row>();
    for (const ConfigStep& st : steps) {
        ActionId a = static_cast<ActionId>(st.action);
        fresh->actions.push_back(a);
        std::vector<Transition> entries;
        entries.reserve(st.outcomes.size());
        for (const auto& [conf, p] : st.outcomes) entries.push_back({intern(conf), p});
        fresh->dists.emplace(a, Distribution::make(std::move(entries)));
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = rows_.emplace(s, std::move(fresh));
    return *it->second;
}

std::vector<ActionId> OperationalMdp::enabled_actions(StateId s) const {
    return row(s).actions;
}

const Distribution& OperationalMdp::successors(StateId s, ActionId a) const {
    const Row& r = row(s);
    auto it = r.dists.find(a);
    if (it == r.dists.end())
        throw std::invalid_argument("action " + action_name(a) + " not enabled at " + state_name(s));
    return it->second;
}

std::string OperationalMdp::state_name(StateId s) const { return config(s).key(); }

std::optional<StateId> OperationalMdp::find_state(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

RewardFn torew(const std::shared_ptr<const OperationalMdp>& mdp,
               std::function<ExtValue(const ProgramState&)> post) {
    return [mdp, post = std::move(post)](StateId s) {
        const Configuration& c = mdp->config(s);
        if (c.kind == Configuration::Kind::Terminated) return post(c.state);
        return rew_pgcl(c);
    };
}

std::string dump_fragment(const OperationalMdp& mdp, const Configuration& start,
                          std::size_t depth, const std::vector<std::string>& display_vars) {
    StateId root = mdp.intern(start);

    auto label = [&](StateId id) {
        const Configuration& c = mdp.config(id);
        if (c.kind == Configuration::Kind::Sink) return std::string("sink");
        std::ostringstream state_text;
        std::set<std::string> shown;
        bool first = true;
        for (const auto& var : display_vars) {
            if (!first) state_text << ",";
            state_text << var << "=" << rational_str(c.state.get(var));
            shown.insert(var);
            first = false;
        }
        for (const auto& [var, value] : c.state.entries()) {
            if (shown.count(var)) continue;
            if (!first) state_text << ",";
            state_text << var << "=" << rational_str(value);
            first = false;
        }
        std::string head = c.kind == Configuration::Kind::Terminated
                               ? "done"
                               : stmt_head_label(*c.program);
        return head + " | " + state_text.str();
    };

    // BFS with deterministic child order (action id, then distribution order).
    std::vector<StateId> order{root};
    std::unordered_map<StateId, std::size_t> node_index{{root, 0}};
    std::unordered_map<StateId, std::size_t> node_depth{{root, 0}};
    std::deque<StateId> queue{root};
    struct EdgeRow {
        std::size_t from;
        std::string action;
        Rational prob;
        StateId to;
    };
    std::vector<EdgeRow> edges;

    while (!queue.empty()) {
        StateId cur = queue.front();
        queue.pop_front();
        std::size_t d = node_depth.at(cur);
        if (d >= depth) continue;
        for (ActionId a : mdp.enabled_actions(cur)) {
            for (const auto& e : mdp.successors(cur, a).entries()) {
                if (!node_index.count(e.target)) {
                    node_index[e.target] = order.size();
                    node_depth[e.target] = d + 1;
                    order.push_back(e.target);
                    queue.push_back(e.target);
                }
                edges.push_back({node_index.at(cur), mdp.action_name(a), e.prob, e.target});
            }
        }
    }

    std::ostringstream out;
    out << "fragment depth " << depth << "\n";
    for (std::size_t i = 0; i < order.size(); ++i)
        out << "node " << i << " depth " << node_depth.at(order[i]) << " \"" << label(order[i])
            << "\"\n";
    for (const auto& e : edges)
        out << "edge " << e.from << " " << e.action << " " << rational_str(e.prob) << " "
            << node_index.at(e.to) << "\n";
    return out.str();
}

}  // namespace exrew::pgcl
