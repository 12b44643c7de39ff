#include "exrew/reachability.hpp"

#include <atomic>
#include <mutex>

namespace exrew {

namespace {

std::string sink_name(StateId id) {
    StateId nesting = 0xFFFFFFFEu - id;
    return nesting == 0 ? "__reach_sink" : "__reach_sink" + std::to_string(nesting);
}

// Fresh sink ids live in a band at the top of the id space, well above
// anything lazy interners allocate. Nesting a transform bumps to the next
// slot so the sinks stay distinct.
StateId allocate_sink_id(const Mdp& base) {
    for (StateId level = 0; level < 10; ++level) {
        StateId id = 0xFFFFFFFEu - level;
        if (!base.find_state(sink_name(id))) return id;
    }
    throw std::runtime_error("too many nested reach transforms");
}

// Lazy view adding the fresh sink as a new state id; base ids pass through
// unchanged.
class ReachView final : public Mdp {
public:
    ReachView(std::shared_ptr<const Mdp> base, std::vector<StateId> targets, StateId sink_id)
        : base_(std::move(base)),
          targets_(targets.begin(), targets.end()),
          sink_(sink_id),
          to_sink_(Distribution::singleton(sink_id)) {}

    std::size_t action_count() const override { return base_->action_count(); }
    std::string action_name(ActionId a) const override { return base_->action_name(a); }

    std::vector<ActionId> enabled_actions(StateId s) const override {
        if (s == sink_ || targets_.count(s)) {
            // Every action moves to the sink with probability 1.
            std::vector<ActionId> all(base_->action_count());
            for (ActionId a = 0; a < all.size(); ++a) all[a] = a;
            return all;
        }
        return base_->enabled_actions(s);
    }

    const Distribution& successors(StateId s, ActionId a) const override {
        if (s == sink_ || targets_.count(s)) return to_sink_;
        return base_->successors(s, a);
    }

    std::string state_name(StateId s) const override {
        if (s == sink_) return sink_name(sink_);
        return base_->state_name(s);
    }

    std::optional<StateId> find_state(const std::string& name) const override {
        if (name == sink_name(sink_)) return sink_;
        return base_->find_state(name);
    }

private:
    std::shared_ptr<const Mdp> base_;
    std::unordered_set<StateId> targets_;
    StateId sink_;
    Distribution to_sink_;
};

}  // namespace

ReachInstance reach_transform(std::shared_ptr<const Mdp> mdp, std::vector<StateId> targets) {
    StateId sink_id = allocate_sink_id(*mdp);
    ReachInstance inst;
    inst.sink = sink_id;
    inst.targets = targets;
    inst.mdp = std::make_shared<ReachView>(std::move(mdp), targets, sink_id);
    std::unordered_set<StateId> target_set(targets.begin(), targets.end());
    inst.reward = [target_set](StateId s) {
        return target_set.count(s) ? ExtValue(1) : ExtValue::zero();
    };
    return inst;
}

ReachResult reach_probability(std::shared_ptr<const Mdp> mdp, std::vector<StateId> targets,
                              StateId s, BellmanMode mode, std::size_t steps,
                              const KleeneOptions& opts) {
    ReachResult result;
    result.instance = reach_transform(std::move(mdp), std::move(targets));
    result.kleene =
        kleene_iterate(*result.instance.mdp, result.instance.reward, mode, {s}, steps, opts);
    return result;
}

}  // namespace exrew
