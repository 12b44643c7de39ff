#pragma once

#include <memory>
#include <optional>

#include "exrew/mdp.hpp"

namespace exrew {

struct BuiltinModel {
    std::shared_ptr<const Mdp> mdp;
    RewardFn reward;
    StateId initial;
};

// An infinite ladder of columns. Column i has a top state s{i} with two
// actions: L moves to a reward station s{i}L (reward r) which then advances to
// column i+1, and R flips a fair coin between a cash-out state s{i}R (reward
// i+1, then absorbing) and column i+1. `columns` truncates the ladder by
// redirecting the escaping edges of the last column into the absorbing state.
BuiltinModel ladder_model(const ExtValue& r, std::optional<std::uint32_t> columns = std::nullopt);

// A chain where action L advances from s{i} to s{i+1} for free and action R
// cashes out reward i at q{i} before absorbing. Every finite strategy is
// beaten by walking one column further.
BuiltinModel cashout_chain_model(std::optional<std::uint32_t> columns = std::nullopt);

// Materializes the sub-MDP reachable from `start` as an explicit model with a
// reward table; throws ResourceCapExceeded when more than `node_budget` states
// are reachable.
std::pair<std::shared_ptr<ExplicitMdp>, RewardMap> materialize(
    const Mdp& mdp, const RewardFn& rew, const std::vector<StateId>& start,
    std::size_t node_budget = 1'000'000);

}  // namespace exrew
