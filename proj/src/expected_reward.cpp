#include "exrew/expected_reward.hpp"

#include <algorithm>
#include <random>

namespace exrew {

std::vector<Path> enumerate_paths(const Mdp& mdp, StateId s, std::size_t n, PathLength mode) {
    std::vector<Path> out;
    Path current{s};
    // Depth-first expansion over the union of action supports.
    std::function<void(std::size_t)> go = [&](std::size_t depth) {
        if (mode == PathLength::UpTo || depth == n) out.push_back(current);
        if (depth == n) return;
        for (StateId succ : mdp.all_successors(current.back())) {
            current.push_back(succ);
            go(depth + 1);
            current.pop_back();
        }
    };
    go(0);
    return out;
}

ActionId MemorylessScheduler::at(StateId s) const {
    auto it = choice_.find(s);
    if (it == choice_.end())
        throw std::out_of_range("memoryless scheduler undefined at state id " + std::to_string(s));
    return it->second;
}

ActionId MemorylessScheduler::choose(std::span<const StateId> history) const {
    if (history.empty()) throw std::invalid_argument("empty history");
    return at(history.back());
}

ActionId HorizonScheduler::choose(std::span<const StateId> history) const {
    auto it = choice_.find(Path(history.begin(), history.end()));
    if (it == choice_.end())
        throw std::out_of_range("horizon scheduler undefined on a history of length " +
                                std::to_string(history.size() - 1));
    return it->second;
}

Rational path_probability(const Mdp& mdp, const Scheduler& sched, const Path& path) {
    if (path.empty()) throw std::invalid_argument("empty path");
    Rational prob(1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        ActionId a = sched.choose(std::span<const StateId>(path.data(), i + 1));
        prob *= mdp.successors(path[i], a).probability_of(path[i + 1]);
        if (prob == 0) return prob;
    }
    return prob;
}

ExtValue path_reward(const RewardFn& rew, const Path& path) {
    if (path.empty()) throw std::invalid_argument("empty path");
    ExtValue total;
    for (StateId s : path) total += rew(s);
    return total;
}

ExtValue expected_reward_step(const Mdp& mdp, const RewardFn& rew, const Scheduler& sched,
                              StateId s, std::size_t n) {
    ExtValue total;
    for (const Path& path : enumerate_paths(mdp, s, n, PathLength::Exact)) {
        Rational p = path_probability(mdp, sched, path);
        if (p == 0) continue;
        total += ExtValue(p) * path_reward(rew, path);
    }
    return total;
}

ExtValue expected_reward_last_state(const Mdp& mdp, const RewardFn& rew, const Scheduler& sched,
                                    StateId s, std::size_t n) {
    ExtValue total;
    for (const Path& path : enumerate_paths(mdp, s, n, PathLength::UpTo)) {
        Rational p = path_probability(mdp, sched, path);
        if (p == 0) continue;
        total += ExtValue(p) * rew(path.back());
    }
    return total;
}

namespace {

// Histories a horizon-n scheduler can be asked about: paths of length < n
// from s, in enumeration order.
std::vector<Path> scheduler_histories(const Mdp& mdp, StateId s, std::size_t n) {
    if (n == 0) return {};
    return enumerate_paths(mdp, s, n - 1, PathLength::UpTo);
}

}  // namespace

ExtValue opt_expected_reward_step_bruteforce(const Mdp& mdp, const RewardFn& rew, StateId s,
                                             std::size_t n, OptMode mode, std::size_t bound) {
    const std::vector<Path> histories = scheduler_histories(mdp, s, n);
    std::vector<std::vector<ActionId>> options;
    options.reserve(histories.size());
    std::size_t count = 1;
    for (const Path& h : histories) {
        options.push_back(mdp.enabled_actions(h.back()));
        if (count > bound / std::max<std::size_t>(options.back().size(), 1))
            throw EnumerationBoundExceeded(bound + 1);
        count *= options.back().size();
    }
    if (count > bound) throw EnumerationBoundExceeded(count);

    const std::vector<Path> paths = enumerate_paths(mdp, s, n, PathLength::Exact);

    std::vector<std::size_t> digits(histories.size(), 0);
    bool first = true;
    ExtValue best;
    for (std::size_t k = 0; k < count; ++k) {
        HorizonScheduler sched;
        for (std::size_t i = 0; i < histories.size(); ++i)
            sched.set(histories[i], options[i][digits[i]]);

        ExtValue value;
        for (const Path& path : paths) {
            Rational p = path_probability(mdp, sched, path);
            if (p == 0) continue;
            value += ExtValue(p) * path_reward(rew, path);
        }
        if (first || (mode == OptMode::Min ? value < best : value > best)) best = value;
        first = false;

        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < options[i].size()) break;
            digits[i] = 0;
        }
    }
    return best;  // at least one scheduler exists (every state has an enabled action)
}

namespace {

class InducedMc final : public Mdp {
public:
    InducedMc(std::shared_ptr<const Mdp> base, MemorylessScheduler sched)
        : base_(std::move(base)), sched_(std::move(sched)) {}

    std::size_t action_count() const override { return base_->action_count(); }
    std::string action_name(ActionId a) const override { return base_->action_name(a); }

    std::vector<ActionId> enabled_actions(StateId s) const override {
        return {scheduled(s)};
    }
    const Distribution& successors(StateId s, ActionId a) const override {
        ActionId chosen = scheduled(s);
        if (a != chosen)
            throw std::invalid_argument("action " + base_->action_name(a) +
                                        " not enabled in induced chain at " + base_->state_name(s));
        return base_->successors(s, chosen);
    }
    std::string state_name(StateId s) const override { return base_->state_name(s); }
    std::optional<StateId> find_state(const std::string& name) const override {
        return base_->find_state(name);
    }

private:
    ActionId scheduled(StateId s) const {
        ActionId a = sched_.at(s);
        auto enabled = base_->enabled_actions(s);
        if (std::find(enabled.begin(), enabled.end(), a) == enabled.end())
            throw SchedulerSelectsDisabledAction(base_->state_name(s), base_->action_name(a));
        return a;
    }

    std::shared_ptr<const Mdp> base_;
    MemorylessScheduler sched_;
};

}  // namespace

std::shared_ptr<const Mdp> induced_mc(std::shared_ptr<const Mdp> mdp, MemorylessScheduler sched) {
    return std::make_shared<InducedMc>(std::move(mdp), std::move(sched));
}

MonteCarloEstimate monte_carlo_estimate(const Mdp& mdp, const RewardFn& rew,
                                        const MemorylessScheduler& sched, StateId s,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed) {
    return monte_carlo_estimate(
        mdp, rew, [&sched](StateId state) { return sched.at(state); }, s, horizon, trials, seed);
}

MonteCarloEstimate monte_carlo_estimate(const Mdp& mdp, const RewardFn& rew,
                                        const std::function<ActionId(StateId)>& policy, StateId s,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed) {
    if (horizon == 0 || trials == 0) throw std::invalid_argument("horizon and trials must be >= 1");
    std::mt19937_64 rng(seed);
    // Uniform draw in [0,1) from the top 53 bits; avoids the
    // implementation-defined std::uniform_real_distribution.
    auto draw = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    MonteCarloEstimate est;
    est.trials = trials;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        StateId cur = s;
        ExtValue total = rew(cur);
        for (std::size_t step = 0; step < horizon; ++step) {
            const Distribution& dist = mdp.successors(cur, policy(cur));
            double u = draw();
            double acc = 0.0;
            StateId next = dist.entries().back().target;
            for (const auto& e : dist.entries()) {
                acc += e.prob.get_d();
                if (u < acc) {
                    next = e.target;
                    break;
                }
            }
            cur = next;
            total += rew(cur);
        }
        if (total.is_infinite()) {
            est.divergent = true;
            continue;
        }
        double v = total.to_double();
        sum += v;
        sumsq += v * v;
    }
    est.mean = sum / static_cast<double>(trials);
    if (trials > 1) {
        double var = (sumsq - sum * sum / static_cast<double>(trials)) /
                     static_cast<double>(trials - 1);
        if (var < 0) var = 0;
        est.std_error = std::sqrt(var / static_cast<double>(trials));
    }
    return est;
}

}  // namespace exrew
