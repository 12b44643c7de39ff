#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "exrew/mdp.hpp"

namespace exrew {

// A path is a nonempty state sequence whose consecutive states are connected
// by some enabled action with positive probability.
using Path = std::vector<StateId>;

enum class PathLength { Exact, UpTo };

// All paths of length exactly n (resp. at most n) starting in s. A path of
// length n has n+1 states. Finite because the MDP is finitely branching.
std::vector<Path> enumerate_paths(const Mdp& mdp, StateId s, std::size_t n, PathLength mode);

// A scheduler resolves nondeterminism from the history of visited states.
// The chosen action must be enabled at the last state of the history.
class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual ActionId choose(std::span<const StateId> history) const = 0;
};

class MemorylessScheduler final : public Scheduler {
public:
    MemorylessScheduler() = default;
    void set(StateId s, ActionId a) { choice_[s] = a; }
    ActionId at(StateId s) const;
    bool defined_at(StateId s) const { return choice_.count(s) > 0; }
    ActionId choose(std::span<const StateId> history) const override;
    const std::map<StateId, ActionId>& choices() const { return choice_; }

private:
    std::map<StateId, ActionId> choice_;
};

// A finite table from histories (paths of length < horizon) to actions; used
// only by the brute-force optimization oracle.
class HorizonScheduler final : public Scheduler {
public:
    void set(const Path& history, ActionId a) { choice_[history] = a; }
    ActionId choose(std::span<const StateId> history) const override;

private:
    std::map<Path, ActionId> choice_;
};

// Probability of the path under the scheduler: the product of one-step
// transition probabilities, with the empty product (single-state path) = 1.
Rational path_probability(const Mdp& mdp, const Scheduler& sched, const Path& path);

// Sum of rewards over every state of the path, including the first.
ExtValue path_reward(const RewardFn& rew, const Path& path);

// Expected reward from s after exactly n steps under the scheduler:
// the finite sum over length-n paths of probability * accumulated reward.
ExtValue expected_reward_step(const Mdp& mdp, const RewardFn& rew, const Scheduler& sched,
                              StateId s, std::size_t n);

// The same quantity computed as sum over paths of length <= n of
// probability * reward(last state). Kept separate from expected_reward_step
// so the two routes can be checked against each other.
ExtValue expected_reward_last_state(const Mdp& mdp, const RewardFn& rew, const Scheduler& sched,
                                    StateId s, std::size_t n);

enum class OptMode { Min, Max };

class EnumerationBoundExceeded : public std::runtime_error {
public:
    explicit EnumerationBoundExceeded(std::size_t count)
        : std::runtime_error("horizon scheduler enumeration needs " + std::to_string(count) +
                             " schedulers, over the enumeration bound"),
          count(count) {}
    std::size_t count;
};

// Exact inf/sup of the n-step expected reward over all deterministic
// horizon-n schedulers, by full enumeration. Refuses (rather than
// approximates) when more than `bound` schedulers would be required. Works on
// lazy models too since only the depth-n fringe is ever touched.
ExtValue opt_expected_reward_step_bruteforce(const Mdp& mdp, const RewardFn& rew, StateId s,
                                             std::size_t n, OptMode mode,
                                             std::size_t bound = 1'000'000);

class SchedulerSelectsDisabledAction : public std::runtime_error {
public:
    SchedulerSelectsDisabledAction(const std::string& state, const std::string& action)
        : std::runtime_error("scheduler selects disabled action " + action + " at state " + state) {}
};

// The Markov chain induced by a memoryless scheduler: a view of the base MDP
// in which exactly the scheduled action is enabled at every state. Queries on
// states where the scheduler is undefined, or where it picks a disabled
// action, throw.
std::shared_ptr<const Mdp> induced_mc(std::shared_ptr<const Mdp> mdp, MemorylessScheduler sched);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    bool divergent = false;  // an infinite reward was encountered on some run
};

// Mean truncated path reward over `trials` simulated runs under a memoryless
// scheduler. Fully deterministic for a fixed seed.
MonteCarloEstimate monte_carlo_estimate(const Mdp& mdp, const RewardFn& rew,
                                        const MemorylessScheduler& sched, StateId s,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed);

// Same, with the memoryless policy given as a function — handy for lazy
// models whose state space cannot be enumerated up front.
MonteCarloEstimate monte_carlo_estimate(const Mdp& mdp, const RewardFn& rew,
                                        const std::function<ActionId(StateId)>& policy, StateId s,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed);

}  // namespace exrew
