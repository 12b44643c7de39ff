#pragma once

#include <memory>
#include <unordered_set>
#include <vector>

#include "exrew/fixpoint.hpp"
#include "exrew/mdp.hpp"

namespace exrew {

// Result of redirecting all outgoing transitions of the target states into a
// fresh absorbing sink. Reach probabilities of the base MDP are total expected
// rewards of this instance under the 0/1 reward function.
struct ReachInstance {
    std::shared_ptr<const Mdp> mdp;
    RewardFn reward;        // 1 on target states, 0 elsewhere (including the sink)
    StateId sink;           // the fresh sink state
    std::vector<StateId> targets;
};

// Builds the transformed MDP lazily over the base. A fresh sink is always
// added, even when the base already has an absorbing state; target states and
// the sink move to the sink with probability 1 under every action.
ReachInstance reach_transform(std::shared_ptr<const Mdp> mdp, std::vector<StateId> targets);

struct ReachResult {
    KleeneResult kleene;   // lower-bound iterates of the reach probability
    ReachInstance instance;
};

// Kleene lower bounds on the min/max probability of reaching the target set
// from s; every iterate lies in [0, 1].
ReachResult reach_probability(std::shared_ptr<const Mdp> mdp, std::vector<StateId> targets,
                              StateId s, BellmanMode mode, std::size_t steps,
                              const KleeneOptions& opts = {});

}  // namespace exrew
