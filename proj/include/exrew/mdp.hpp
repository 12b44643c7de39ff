#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "exrew/extreal.hpp"

namespace exrew {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

struct Transition {
    StateId target;
    Rational prob;  // always > 0
};

// A finite-support probability distribution over states. Construction merges
// duplicate targets, drops zero-probability entries and checks that the
// probabilities sum to exactly 1.
class Distribution {
public:
    static Distribution singleton(StateId s);
    static Distribution make(std::vector<Transition> entries);

    const std::vector<Transition>& entries() const { return entries_; }

    // Probability of moving to `s`; 0 when s is not in the support.
    Rational probability_of(StateId s) const;

private:
    Distribution() = default;
    std::vector<Transition> entries_;
};

// A countable, finitely-branching Markov decision process. Every state has at
// least one enabled action and every enabled action carries a finite-support
// rational distribution summing to exactly 1.
//
// Implementations must be safe for concurrent read queries. Lazy
// implementations may memoize internally but must behave as pure functions.
class Mdp {
public:
    virtual ~Mdp() = default;

    virtual std::size_t action_count() const = 0;
    virtual std::string action_name(ActionId a) const = 0;

    virtual std::vector<ActionId> enabled_actions(StateId s) const = 0;
    virtual const Distribution& successors(StateId s, ActionId a) const = 0;

    virtual std::string state_name(StateId s) const = 0;

    // Resolves a state by name. Lazy models may intern the state on demand;
    // models whose states have no external names return nullopt.
    virtual std::optional<StateId> find_state(const std::string& name) const = 0;

    // Union of the supports of all enabled actions, deduplicated, in
    // deterministic order.
    std::vector<StateId> all_successors(StateId s) const;
};

// A reward collected upon entering a state.
using RewardFn = std::function<ExtValue(StateId)>;

inline RewardFn zero_rewards() {
    return [](StateId) { return ExtValue::zero(); };
}

// Finite MDP backed by explicit tables. States and actions are declared up
// front; transitions are validated eagerly.
class ExplicitMdp final : public Mdp {
public:
    ExplicitMdp(std::vector<std::string> state_names, std::vector<std::string> action_names);

    StateId state(const std::string& name) const;
    ActionId action(const std::string& name) const;
    std::size_t state_count() const { return state_names_.size(); }

    // Declares `a` enabled at `s` with the given distribution. Each (state,
    // action) pair may be set only once.
    void set_transitions(StateId s, ActionId a, Distribution dist);

    // Checks every state has at least one enabled action; call after loading.
    void validate() const;

    std::size_t action_count() const override { return action_names_.size(); }
    std::string action_name(ActionId a) const override { return action_names_.at(a); }
    std::vector<ActionId> enabled_actions(StateId s) const override;
    const Distribution& successors(StateId s, ActionId a) const override;
    std::string state_name(StateId s) const override { return state_names_.at(s); }
    std::optional<StateId> find_state(const std::string& name) const override;

private:
    std::vector<std::string> state_names_;
    std::vector<std::string> action_names_;
    std::unordered_map<std::string, StateId> state_index_;
    std::unordered_map<std::string, ActionId> action_index_;
    // per state: enabled (action, distribution) pairs in declaration order
    std::vector<std::vector<std::pair<ActionId, Distribution>>> rows_;
};

// Reward table for an explicit MDP; unlisted states default to 0.
class RewardMap {
public:
    RewardMap() = default;
    void set(StateId s, ExtValue v) { values_[s] = std::move(v); }
    ExtValue get(StateId s) const {
        auto it = values_.find(s);
        return it == values_.end() ? ExtValue::zero() : it->second;
    }
    RewardFn as_fn() const {
        return [copy = *this](StateId s) { return copy.get(s); };
    }
    const std::unordered_map<StateId, ExtValue>& raw() const { return values_; }

private:
    std::unordered_map<StateId, ExtValue> values_;
};

}  // namespace exrew
