#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "exrew/mdp.hpp"
#include "exrew/pgcl/ast.hpp"

namespace exrew::pgcl {

// An execution state: a program still to run, a terminated run holding its
// final state, or the absorbing bottom configuration.
struct Configuration {
    enum class Kind { Running, Terminated, Sink };
    Kind kind = Kind::Sink;
    StmtPtr program;     // Running
    ProgramState state;  // Running / Terminated

    static Configuration running(StmtPtr program, ProgramState state);
    static Configuration terminated(ProgramState state);
    static Configuration sink();

    bool operator==(const Configuration& o) const;

    // Canonical rendering; injective, so it doubles as the interning key.
    std::string key() const;
    // Short display label: head statement + state.
    std::string label() const;
};

enum class OpAction : ActionId { N = 0, L = 1, R = 2 };

struct ConfigStep {
    OpAction action;
    std::vector<std::pair<Configuration, Rational>> outcomes;  // positive probs, sum 1
};

// One small step. Every configuration yields exactly one enabled action,
// except a running nondeterministic choice at the head, which yields L and R.
std::vector<ConfigStep> step(const Configuration& c);

// Reward of a configuration: r when the program is tick(r) or a sequence
// whose head statement is tick(r); 0 otherwise, including the sink.
ExtValue rew_pgcl(const Configuration& c);

// The operational MDP over configurations. Structurally equal configurations
// intern to the same state; expansion is on demand and memoized.
class OperationalMdp final : public Mdp {
public:
    OperationalMdp();

    StateId intern(const Configuration& c) const;
    const Configuration& config(StateId s) const;

    std::size_t action_count() const override { return 3; }
    std::string action_name(ActionId a) const override;
    std::vector<ActionId> enabled_actions(StateId s) const override;
    const Distribution& successors(StateId s, ActionId a) const override;
    std::string state_name(StateId s) const override;
    std::optional<StateId> find_state(const std::string& name) const override;

private:
    struct Row {
        std::vector<ActionId> actions;
        std::map<ActionId, Distribution> dists;
    };
    const Row& row(StateId s) const;

    mutable std::mutex mu_;
    mutable std::vector<Configuration> configs_;
    mutable std::unordered_map<std::string, StateId> index_;
    mutable std::unordered_map<StateId, std::unique_ptr<Row>> rows_;
};

// The reward function induced by a postexpectation-like evaluator: X at
// terminated configurations, the tick reward elsewhere.
RewardFn torew(const std::shared_ptr<const OperationalMdp>& mdp,
               std::function<ExtValue(const ProgramState&)> post);

// Deterministic textual dump of the configuration graph reachable from
// `start` within `depth` steps (BFS). `display_vars` lists variables to show
// explicitly even when they are zero.
std::string dump_fragment(const OperationalMdp& mdp, const Configuration& start,
                          std::size_t depth, const std::vector<std::string>& display_vars);

}  // namespace exrew::pgcl
