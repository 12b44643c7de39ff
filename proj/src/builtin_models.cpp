#include "exrew/builtin_models.hpp"

#include <charconv>
#include <deque>
#include <mutex>
#include <unordered_set>

namespace exrew {

namespace {

constexpr StateId kBottom = 0xFFFFFFF0u;

std::optional<std::uint32_t> parse_index(const std::string& text) {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

// Caches distributions per (state, action) behind a mutex so successors() can
// hand out stable references while staying externally pure.
class LazyDistCache {
public:
    const Distribution& get(StateId s, ActionId a,
                            const std::function<Distribution()>& build) const {
        std::uint64_t key = (static_cast<std::uint64_t>(s) << 8) | a;
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(key);
        if (it == memo_.end())
            it = memo_.emplace(key, std::make_unique<Distribution>(build())).first;
        return *it->second;
    }

private:
    mutable std::mutex mu_;
    mutable std::unordered_map<std::uint64_t, std::unique_ptr<Distribution>> memo_;
};

// Column i: ids 3i (s{i}), 3i+1 (s{i}L), 3i+2 (s{i}R); bottom is a fixed high id.
class LadderMdp final : public Mdp {
public:
    explicit LadderMdp(std::optional<std::uint32_t> columns) : columns_(columns) {
        if (columns_ && *columns_ == 0) throw std::invalid_argument("need at least one column");
    }

    std::size_t action_count() const override { return 3; }
    std::string action_name(ActionId a) const override {
        switch (a) {
            case 0: return "N";
            case 1: return "L";
            case 2: return "R";
        }
        throw std::invalid_argument("bad action id");
    }

    std::vector<ActionId> enabled_actions(StateId s) const override {
        if (s == kBottom) return {0};
        check(s);
        return s % 3 == 0 ? std::vector<ActionId>{1, 2} : std::vector<ActionId>{0};
    }

    const Distribution& successors(StateId s, ActionId a) const override {
        return cache_.get(s, a, [&]() { return build(s, a); });
    }

    std::string state_name(StateId s) const override {
        if (s == kBottom) return "bot";
        check(s);
        std::uint32_t col = s / 3;
        switch (s % 3) {
            case 0: return "s" + std::to_string(col);
            case 1: return "s" + std::to_string(col) + "L";
            default: return "s" + std::to_string(col) + "R";
        }
    }

    std::optional<StateId> find_state(const std::string& name) const override {
        if (name == "bot") return kBottom;
        if (name.size() < 2 || name[0] != 's') return std::nullopt;
        std::string body = name.substr(1);
        std::uint32_t kind = 0;
        if (body.back() == 'L') {
            kind = 1;
            body.pop_back();
        } else if (body.back() == 'R') {
            kind = 2;
            body.pop_back();
        }
        auto col = parse_index(body);
        if (!col || (columns_ && *col >= *columns_)) return std::nullopt;
        return 3 * *col + kind;
    }

    RewardFn reward_fn(const ExtValue& r) const {
        return [r](StateId s) {
            if (s == kBottom) return ExtValue::zero();
            switch (s % 3) {
                case 1: return r;                            // s{i}L
                case 2: return ExtValue(long(s / 3) + 1);    // s{i}R pays i+1
                default: return ExtValue::zero();
            }
        };
    }

private:
    void check(StateId s) const {
        if (columns_ && s / 3 >= *columns_)
            throw std::invalid_argument("state id beyond the truncated ladder");
    }

    // True when column col+1 exists (infinite ladders always advance).
    bool has_next(std::uint32_t col) const { return !columns_ || col + 1 < *columns_; }

    Distribution build(StateId s, ActionId a) const {
        if (s == kBottom) return Distribution::singleton(kBottom);
        check(s);
        std::uint32_t col = s / 3;
        StateId next_top = has_next(col) ? 3 * (col + 1) : kBottom;
        switch (s % 3) {
            case 0:
                if (a == 1) return Distribution::singleton(3 * col + 1);
                if (a == 2)
                    return Distribution::make({{3 * col + 2, make_rational(1, 2)},
                                               {next_top, make_rational(1, 2)}});
                break;
            case 1:
                if (a == 0) return Distribution::singleton(next_top);
                break;
            case 2:
                if (a == 0) return Distribution::singleton(kBottom);
                break;
        }
        throw std::invalid_argument("action " + action_name(a) + " not enabled at " + state_name(s));
    }

    std::optional<std::uint32_t> columns_;
    LazyDistCache cache_;
};

// Column i: ids 2i (s{i}), 2i+1 (q{i}); bottom as above.
class CashoutChainMdp final : public Mdp {
public:
    explicit CashoutChainMdp(std::optional<std::uint32_t> columns) : columns_(columns) {
        if (columns_ && *columns_ == 0) throw std::invalid_argument("need at least one column");
    }

    std::size_t action_count() const override { return 3; }
    std::string action_name(ActionId a) const override {
        switch (a) {
            case 0: return "N";
            case 1: return "L";
            case 2: return "R";
        }
        throw std::invalid_argument("bad action id");
    }

    std::vector<ActionId> enabled_actions(StateId s) const override {
        if (s == kBottom) return {0};
        check(s);
        return s % 2 == 0 ? std::vector<ActionId>{1, 2} : std::vector<ActionId>{0};
    }

    const Distribution& successors(StateId s, ActionId a) const override {
        return cache_.get(s, a, [&]() { return build(s, a); });
    }

    std::string state_name(StateId s) const override {
        if (s == kBottom) return "bot";
        check(s);
        std::uint32_t col = s / 2;
        return (s % 2 == 0 ? "s" : "q") + std::to_string(col);
    }

    std::optional<StateId> find_state(const std::string& name) const override {
        if (name == "bot") return kBottom;
        if (name.size() < 2 || (name[0] != 's' && name[0] != 'q')) return std::nullopt;
        auto col = parse_index(name.substr(1));
        if (!col || (columns_ && *col >= *columns_)) return std::nullopt;
        return 2 * *col + (name[0] == 'q' ? 1 : 0);
    }

    static RewardFn reward_fn() {
        return [](StateId s) {
            if (s != kBottom && s % 2 == 1) return ExtValue(long(s / 2));  // q{i} pays i
            return ExtValue::zero();
        };
    }

private:
    void check(StateId s) const {
        if (columns_ && s / 2 >= *columns_)
            throw std::invalid_argument("state id beyond the truncated chain");
    }

    Distribution build(StateId s, ActionId a) const {
        if (s == kBottom) return Distribution::singleton(kBottom);
        check(s);
        std::uint32_t col = s / 2;
        if (s % 2 == 0) {
            if (a == 1) {
                bool next = !columns_ || col + 1 < *columns_;
                return Distribution::singleton(next ? 2 * (col + 1) : kBottom);
            }
            if (a == 2) return Distribution::singleton(2 * col + 1);
        } else if (a == 0) {
            return Distribution::singleton(kBottom);
        }
        throw std::invalid_argument("action " + action_name(a) + " not enabled at " + state_name(s));
    }

    std::optional<std::uint32_t> columns_;
    LazyDistCache cache_;
};

}  // namespace

BuiltinModel ladder_model(const ExtValue& r, std::optional<std::uint32_t> columns) {
    auto mdp = std::make_shared<LadderMdp>(columns);
    BuiltinModel model;
    model.reward = mdp->reward_fn(r);
    model.mdp = std::move(mdp);
    model.initial = 0;
    return model;
}

BuiltinModel cashout_chain_model(std::optional<std::uint32_t> columns) {
    auto mdp = std::make_shared<CashoutChainMdp>(columns);
    BuiltinModel model;
    model.reward = CashoutChainMdp::reward_fn();
    model.mdp = std::move(mdp);
    model.initial = 0;
    return model;
}

std::pair<std::shared_ptr<ExplicitMdp>, RewardMap> materialize(const Mdp& mdp, const RewardFn& rew,
                                                               const std::vector<StateId>& start,
                                                               std::size_t node_budget) {
    std::vector<StateId> order;
    std::unordered_set<StateId> seen;
    std::deque<StateId> queue;
    for (StateId s : start) {
        if (seen.insert(s).second) {
            order.push_back(s);
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (StateId succ : mdp.all_successors(s)) {
            if (seen.insert(succ).second) {
                if (order.size() >= node_budget)
                    throw std::runtime_error("materialize: more than " +
                                             std::to_string(node_budget) + " reachable states");
                order.push_back(succ);
                queue.push_back(succ);
            }
        }
    }

    std::vector<std::string> state_names;
    state_names.reserve(order.size());
    std::unordered_map<StateId, StateId> remap;
    for (StateId s : order) {
        remap[s] = static_cast<StateId>(state_names.size());
        state_names.push_back(mdp.state_name(s));
    }
    std::vector<std::string> action_names;
    for (ActionId a = 0; a < mdp.action_count(); ++a) action_names.push_back(mdp.action_name(a));

    auto out = std::make_shared<ExplicitMdp>(state_names, action_names);
    for (StateId s : order) {
        for (ActionId a : mdp.enabled_actions(s)) {
            std::vector<Transition> entries;
            for (const auto& e : mdp.successors(s, a).entries())
                entries.push_back({remap.at(e.target), e.prob});
            out->set_transitions(remap.at(s), a, Distribution::make(std::move(entries)));
        }
    }
    out->validate();

    RewardMap rewards;
    for (StateId s : order) {
        ExtValue v = rew(s);
        if (!v.is_zero()) rewards.set(remap.at(s), v);
    }
    return {out, rewards};
}

}  // namespace exrew
