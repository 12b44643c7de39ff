#include "exrew/mdp.hpp"

#include <algorithm>
#include <map>

namespace exrew {

Distribution Distribution::singleton(StateId s) {
    Distribution d;
    d.entries_.push_back({s, Rational(1)});
    return d;
}

Distribution Distribution::make(std::vector<Transition> entries) {
    // Merge duplicates in first-occurrence order, drop zeros, then check the sum.
    Distribution d;
    for (auto& e : entries) {
        if (e.prob < 0)
            throw std::invalid_argument("negative transition probability");
        if (e.prob == 0) continue;
        auto it = std::find_if(d.entries_.begin(), d.entries_.end(),
                               [&](const Transition& t) { return t.target == e.target; });
        if (it != d.entries_.end())
            it->prob += e.prob;
        else
            d.entries_.push_back(std::move(e));
    }
    Rational sum(0);
    for (const auto& e : d.entries_) sum += e.prob;
    if (sum != 1)
        throw std::invalid_argument("transition probabilities sum to " + rational_str(sum) +
                                    ", expected exactly 1");
    return d;
}

Rational Distribution::probability_of(StateId s) const {
    for (const auto& e : entries_)
        if (e.target == s) return e.prob;
    return Rational(0);
}

std::vector<StateId> Mdp::all_successors(StateId s) const {
    std::vector<StateId> out;
    for (ActionId a : enabled_actions(s)) {
        for (const auto& e : successors(s, a).entries()) {
            if (std::find(out.begin(), out.end(), e.target) == out.end())
                out.push_back(e.target);
        }
    }
    return out;
}

ExplicitMdp::ExplicitMdp(std::vector<std::string> state_names, std::vector<std::string> action_names)
    : state_names_(std::move(state_names)), action_names_(std::move(action_names)) {
    for (StateId i = 0; i < state_names_.size(); ++i) {
        if (!state_index_.emplace(state_names_[i], i).second)
            throw std::invalid_argument("duplicate state name: " + state_names_[i]);
    }
    for (ActionId i = 0; i < action_names_.size(); ++i) {
        if (!action_index_.emplace(action_names_[i], i).second)
            throw std::invalid_argument("duplicate action label: " + action_names_[i]);
    }
    rows_.resize(state_names_.size());
}

StateId ExplicitMdp::state(const std::string& name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) throw std::invalid_argument("unknown state: " + name);
    return it->second;
}

ActionId ExplicitMdp::action(const std::string& name) const {
    auto it = action_index_.find(name);
    if (it == action_index_.end()) throw std::invalid_argument("unknown action: " + name);
    return it->second;
}

void ExplicitMdp::set_transitions(StateId s, ActionId a, Distribution dist) {
    if (s >= rows_.size()) throw std::invalid_argument("state id out of range");
    if (a >= action_names_.size()) throw std::invalid_argument("action id out of range");
    auto& row = rows_[s];
    for (const auto& [act, _] : row)
        if (act == a)
            throw std::invalid_argument("transitions for (" + state_names_[s] + ", " +
                                        action_names_[a] + ") declared twice");
    row.emplace_back(a, std::move(dist));
}

void ExplicitMdp::validate() const {
    for (StateId s = 0; s < rows_.size(); ++s) {
        if (rows_[s].empty())
            throw std::invalid_argument("state " + state_names_[s] + " has no enabled action");
    }
}

std::vector<ActionId> ExplicitMdp::enabled_actions(StateId s) const {
    std::vector<ActionId> out;
    for (const auto& [a, _] : rows_.at(s)) out.push_back(a);
    // Deterministic order: ascending action id, independent of insertion order.
    std::sort(out.begin(), out.end());
    return out;
}

const Distribution& ExplicitMdp::successors(StateId s, ActionId a) const {
    for (const auto& [act, dist] : rows_.at(s))
        if (act == a) return dist;
    throw std::invalid_argument("action " + action_names_.at(a) + " not enabled at " +
                                state_names_.at(s));
}

std::optional<StateId> ExplicitMdp::find_state(const std::string& name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
}

}  // namespace exrew
