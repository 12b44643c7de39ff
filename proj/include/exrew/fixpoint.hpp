#pragma once

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "exrew/expected_reward.hpp"
#include "exrew/mdp.hpp"

namespace exrew {

// A sparse state -> extended-value map with implicit default 0; the lattice
// element the Bellman operators act on. The empty map is the lattice bottom.
class ValueFunction {
public:
    ValueFunction() = default;

    ExtValue get(StateId s) const {
        auto it = values_.find(s);
        return it == values_.end() ? ExtValue::zero() : it->second;
    }
    void set(StateId s, ExtValue v) { values_[s] = std::move(v); }

    const std::unordered_map<StateId, ExtValue>& raw() const { return values_; }

    // Pointwise <= over the union of both supports (default 0 elsewhere).
    bool pointwise_leq(const ValueFunction& other) const;
    bool equal_on(const std::vector<StateId>& states, const ValueFunction& other) const;

private:
    std::unordered_map<StateId, ExtValue> values_;
};

enum class BellmanMode { Min, Max };

// One Bellman step on the given frontier:
//   result(s) = rew(s) + opt_{a in Act(s)} sum_{s'} P(s,a,s') * v(s')
// for s in frontier; all other states keep their value from v. Reads of v
// outside its support yield the default 0.
ValueFunction bellman_apply(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                            const ValueFunction& v, const std::vector<StateId>& frontier);

// The value a single state would get under one Bellman step.
ExtValue bellman_value(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                       const ValueFunction& v, StateId s);

class ResourceCapExceeded : public std::runtime_error {
public:
    explicit ResourceCapExceeded(std::size_t budget)
        : std::runtime_error("state exploration exceeded the node budget of " +
                             std::to_string(budget)),
          budget(budget) {}
    std::size_t budget;
};

enum class KleeneVerdict {
    // Two consecutive iterates agreed on the entire explored region and the
    // region is successor-closed: the iterate is a genuine fixed point below
    // the least fixed point, hence equal to it. Agreement on the query states
    // alone proves nothing (iterates can plateau and rise again), so it never
    // produces this verdict.
    ConvergedExact,
    LowerBound,  // budget exhausted; the last iterate is an exact lower bound
};

struct KleeneResult {
    // iterates[k] is the k-th Kleene iterate restricted to the query states;
    // iterates[0] is the bottom element.
    std::vector<ValueFunction> iterates;
    std::vector<StateId> query;
    KleeneVerdict verdict = KleeneVerdict::LowerBound;
    std::size_t explored_states = 0;
    std::size_t stabilized_at = 0;  // iterate index of the fixed point, when converged

    const ValueFunction& last() const { return iterates.back(); }

    // The exact k-th iterate at s; for k beyond a run that converged exactly,
    // the fixed-point value.
    ExtValue value_at(std::size_t k, StateId s) const;
};

struct KleeneOptions {
    std::size_t node_budget = 5'000'000;
    // Stop early when a true fixed point is reached (sound: all later
    // iterates are identical).
    bool stop_on_stabilization = true;
};

// Computes the Kleene chain iterates 0, Phi(0), ..., Phi^steps(0) restricted
// to the query states, exactly. Internally sweeps the set of states reachable
// from the query set in < steps steps; the restriction to the query states
// equals the true k-th iterate because the k-th iterate at distance-0 states
// only depends on earlier iterates at states within k steps.
KleeneResult kleene_iterate(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                            const std::vector<StateId>& start, std::size_t steps,
                            const KleeneOptions& opts = {});

class DomainNotSuccessorClosed : public std::runtime_error {
public:
    DomainNotSuccessorClosed(const std::string& from, const std::string& escaping)
        : std::runtime_error("domain is not successor-closed: " + from + " reaches " + escaping),
          from(from),
          escaping(escaping) {}
    std::string from;
    std::string escaping;
};

struct ParkResult {
    bool certified = false;
    // First state where one Bellman application exceeds the candidate.
    std::optional<StateId> counterexample;
};

// Park induction: if one Bellman application takes the candidate down (or
// keeps it) pointwise on a successor-closed domain, the candidate upper-bounds
// the least fixed point on that domain. The closure requirement is checked
// first and violations throw, since an escaping state would silently read the
// default 0 and could certify unsoundly.
ParkResult park_check(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                      const ValueFunction& candidate, const std::vector<StateId>& domain);

// For each domain state, the action minimizing rew(s) + sum P * v(s'), ties
// broken by ascending action id (declaration order). With v the exact least
// fixed point of the min-Bellman operator, the induced chain attains it.
// There is deliberately no max-mode counterpart.
MemorylessScheduler extract_min_scheduler(const Mdp& mdp, const RewardFn& rew,
                                          const ValueFunction& v,
                                          const std::vector<StateId>& domain);

struct DivergenceVerdict {
    bool exceeded = false;   // some Kleene iterate at s passed the threshold
    std::size_t at_step = 0; // first iterate index that exceeded, when exceeded
    ExtValue last_value;     // value at the deciding iterate (or at the cap)
};

// One-sided divergence witness: reports whether the Kleene iterates at s pass
// a finite threshold within `step_cap` iterations. A below-threshold verdict
// never decides finiteness.
DivergenceVerdict divergence_probe(const Mdp& mdp, const RewardFn& rew, BellmanMode mode,
                                   StateId s, const ExtValue& threshold, std::size_t step_cap,
                                   const KleeneOptions& opts = {});

}  // namespace exrew
