#include "exrew/fixpoint.hpp"

#include <algorithm>
#include <deque>

namespace exrew {

bool ValueFunction::pointwise_leq(const ValueFunction& other) const {
    for (const auto& [s, v] : values_)
        if (!(v <= other.get(s))) return false;
    // States only in `other` compare 0 <= other(s), which always holds.
    return true;
}

bool ValueFunction::equal_on(const std::vector<StateId>& states, const ValueFunction& other) const {
    for (StateId s : states)
        if (get(s) != other.get(s)) return false;
    return true;
}

ExtValue bellman_value(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                       const ValueFunction& v, StateId s) {
    bool first = true;
    ExtValue best;
    for (ActionId a : mdp.enabled_actions(s)) {
        ExtValue sum;
        for (const auto& e : mdp.successors(s, a).entries())
            sum += ExtValue(e.prob) * v.get(e.target);
        if (first || (mode == BellmanMode::Min ? sum < best : sum > best)) best = sum;
        first = false;
    }
    return rew(s) + best;
}

ValueFunction bellman_apply(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                            const ValueFunction& v, const std::vector<StateId>& frontier) {
    ValueFunction out = v;
    for (StateId s : frontier) out.set(s, bellman_value(mdp, rew, mode, v, s));
    return out;
}

ExtValue KleeneResult::value_at(std::size_t k, StateId s) const {
    if (k < iterates.size()) return iterates[k].get(s);
    if (verdict == KleeneVerdict::ConvergedExact) return iterates.back().get(s);
    throw std::out_of_range("iterate " + std::to_string(k) + " was not computed");
}

namespace {

struct Region {
    std::vector<StateId> states;  // BFS order
    // Every successor of every region state lies inside the region.
    bool successor_closed = false;
};

// States reachable from `start` within `depth` steps.
Region reachable_within(const Mdp& mdp, const std::vector<StateId>& start, std::size_t depth,
                        std::size_t node_budget) {
    Region region;
    std::unordered_set<StateId> seen;
    std::deque<std::pair<StateId, std::size_t>> queue;
    std::vector<StateId> boundary;  // states whose successors were not expanded
    for (StateId s : start) {
        if (seen.insert(s).second) {
            region.states.push_back(s);
            queue.emplace_back(s, 0);
        }
    }
    while (!queue.empty()) {
        auto [s, d] = queue.front();
        queue.pop_front();
        if (d >= depth) {
            boundary.push_back(s);
            continue;
        }
        for (StateId succ : mdp.all_successors(s)) {
            if (seen.insert(succ).second) {
                if (region.states.size() >= node_budget) throw ResourceCapExceeded(node_budget);
                region.states.push_back(succ);
                queue.emplace_back(succ, d + 1);
            }
        }
    }
    region.successor_closed = true;
    for (StateId s : boundary) {
        for (StateId succ : mdp.all_successors(s)) {
            if (!seen.count(succ)) {
                region.successor_closed = false;
                return region;
            }
        }
    }
    return region;
}

ValueFunction restrict_to(const ValueFunction& v, const std::vector<StateId>& states) {
    ValueFunction out;
    for (StateId s : states) out.set(s, v.get(s));
    return out;
}

}  // namespace

KleeneResult kleene_iterate(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                            const std::vector<StateId>& start, std::size_t steps,
                            const KleeneOptions& opts) {
    KleeneResult result;
    result.query = start;

    // The k-th iterate at the query states is exact as long as every state at
    // distance d from the query set holds the true (k-d)-th iterate, which a
    // global sweep over the depth-(steps-1) reachable set guarantees.
    Region region = reachable_within(mdp, start, steps == 0 ? 0 : steps - 1, opts.node_budget);
    result.explored_states = region.states.size();

    ValueFunction cur;
    result.iterates.push_back(restrict_to(cur, start));
    for (std::size_t k = 1; k <= steps; ++k) {
        ValueFunction next;
        bool changed = false;
        for (StateId s : region.states) {
            ExtValue v = bellman_value(mdp, rew, mode, cur, s);
            if (!changed && v != cur.get(s)) changed = true;
            next.set(s, std::move(v));
        }
        cur = std::move(next);
        result.iterates.push_back(restrict_to(cur, start));
        if (!changed && region.successor_closed) {
            // cur is a fixed point of the full operator and a lower bound of
            // the least fixed point, hence equal to it.
            result.verdict = KleeneVerdict::ConvergedExact;
            result.stabilized_at = k;
            if (opts.stop_on_stabilization) break;
        }
    }
    return result;
}

namespace {

void check_successor_closed(const Mdp& mdp, const std::vector<StateId>& domain) {
    std::unordered_set<StateId> in_domain(domain.begin(), domain.end());
    for (StateId s : domain) {
        for (ActionId a : mdp.enabled_actions(s)) {
            for (const auto& e : mdp.successors(s, a).entries()) {
                if (!in_domain.count(e.target))
                    throw DomainNotSuccessorClosed(mdp.state_name(s), mdp.state_name(e.target));
            }
        }
    }
}

}  // namespace

ParkResult park_check(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                      const ValueFunction& candidate, const std::vector<StateId>& domain) {
    check_successor_closed(mdp, domain);
    std::vector<StateId> ordered = domain;
    std::sort(ordered.begin(), ordered.end());
    for (StateId s : ordered) {
        if (!(bellman_value(mdp, rew, mode, candidate, s) <= candidate.get(s)))
            return ParkResult{false, s};
    }
    return ParkResult{true, std::nullopt};
}

MemorylessScheduler extract_min_scheduler(const Mdp& mdp, const RewardFn& rew,
                                          const ValueFunction& v,
                                          const std::vector<StateId>& domain) {
    check_successor_closed(mdp, domain);
    MemorylessScheduler sched;
    for (StateId s : domain) {
        std::vector<ActionId> actions = mdp.enabled_actions(s);  // ascending id
        bool first = true;
        ExtValue best;
        ActionId best_action = 0;
        for (ActionId a : actions) {
            ExtValue sum = rew(s);
            for (const auto& e : mdp.successors(s, a).entries())
                sum += ExtValue(e.prob) * v.get(e.target);
            if (first || sum < best) {  // strict <: ties keep the least action
                best = sum;
                best_action = a;
                first = false;
            }
        }
        sched.set(s, best_action);
    }
    return sched;
}

DivergenceVerdict divergence_probe(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                                   StateId s, const ExtValue& threshold, std::size_t step_cap,
                                   const KleeneOptions& opts) {
    if (threshold.is_infinite()) throw std::invalid_argument("divergence threshold must be finite");
    std::vector<StateId> start{s};
    Region region = reachable_within(mdp, start, step_cap == 0 ? 0 : step_cap - 1, opts.node_budget);

    DivergenceVerdict verdict;
    ValueFunction cur;
    for (std::size_t k = 1; k <= step_cap; ++k) {
        ValueFunction next;
        bool changed = false;
        for (StateId st : region.states) {
            ExtValue v = bellman_value(mdp, rew, mode, cur, st);
            if (!changed && v != cur.get(st)) changed = true;
            next.set(st, std::move(v));
        }
        cur = std::move(next);
        verdict.last_value = cur.get(s);
        if (verdict.last_value > threshold) {
            verdict.exceeded = true;
            verdict.at_step = k;
            return verdict;
        }
        // A proven fixed point below the threshold will never exceed it.
        if (!changed && region.successor_closed) break;
    }
    return verdict;
}

}  // namespace exrew
