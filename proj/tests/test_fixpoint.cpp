#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "exrew/builtin_models.hpp"
#include "exrew/fixpoint.hpp"
#include "test_util.hpp"

using namespace exrew;

namespace {

ExtValue q(long num, long den = 1) { return ExtValue(make_rational(num, den)); }

struct LadderStates {
    std::vector<StateId> tops, lefts, rights;
    StateId bot;
};

LadderStates ladder_states(const Mdp& m, std::size_t columns) {
    LadderStates ls;
    for (std::size_t i = 0; i < columns; ++i) {
        ls.tops.push_back(*m.find_state("s" + std::to_string(i)));
        ls.lefts.push_back(*m.find_state("s" + std::to_string(i) + "L"));
        ls.rights.push_back(*m.find_state("s" + std::to_string(i) + "R"));
    }
    ls.bot = *m.find_state("bot");
    return ls;
}

// The least fixed point of the min operator on the infinite ladder with
// reward r > 0: tops at i+2, reward stations at r+i+3, cash-outs at i+1.
ValueFunction ladder_min_lfp(const LadderStates& ls, long r, std::size_t columns) {
    ValueFunction v;
    for (std::size_t i = 0; i < columns; ++i) {
        v.set(ls.tops[i], q(static_cast<long>(i) + 2));
        v.set(ls.lefts[i], q(r + static_cast<long>(i) + 3));
        v.set(ls.rights[i], q(static_cast<long>(i) + 1));
    }
    v.set(ls.bot, q(0));
    return v;
}

ValueFunction ladder_max_fixpoint(const LadderStates& ls, std::size_t columns) {
    ValueFunction v;
    for (std::size_t i = 0; i < columns; ++i) {
        v.set(ls.tops[i], ExtValue::infinity());
        v.set(ls.lefts[i], ExtValue::infinity());
        v.set(ls.rights[i], q(static_cast<long>(i) + 1));
    }
    v.set(ls.bot, q(0));
    return v;
}

std::vector<StateId> all_states(const ExplicitMdp& m) {
    std::vector<StateId> out;
    for (StateId s = 0; s < m.state_count(); ++s) out.push_back(s);
    return out;
}

}  // namespace

TEST_CASE("bellman step at the bottom element reproduces the rewards") {
    BuiltinModel model = ladder_model(q(1));
    LadderStates ls = ladder_states(*model.mdp, 4);
    std::vector<StateId> frontier{ls.tops[0], ls.lefts[0], ls.rights[2], ls.bot};
    ValueFunction out =
        bellman_apply(*model.mdp, model.reward, BellmanMode::Min, ValueFunction{}, frontier);
    CHECK(out.get(ls.tops[0]) == q(0));
    CHECK(out.get(ls.lefts[0]) == q(1));
    CHECK(out.get(ls.rights[2]) == q(3));
    CHECK(out.get(ls.bot) == q(0));
}

TEST_CASE("the closed-form candidates are fixed points of both operators") {
    const std::size_t columns = 50;
    BuiltinModel model = ladder_model(q(1));
    LadderStates ls = ladder_states(*model.mdp, columns + 1);

    std::vector<StateId> frontier;
    for (std::size_t i = 0; i < columns; ++i) {
        frontier.push_back(ls.tops[i]);
        frontier.push_back(ls.lefts[i]);
        frontier.push_back(ls.rights[i]);
    }
    frontier.push_back(ls.bot);

    ValueFunction vmin = ladder_min_lfp(ls, 1, columns + 1);
    ValueFunction applied = bellman_apply(*model.mdp, model.reward, BellmanMode::Min, vmin, frontier);
    CHECK(applied.equal_on(frontier, vmin));

    ValueFunction vmax = ladder_max_fixpoint(ls, columns + 1);
    ValueFunction applied_max =
        bellman_apply(*model.mdp, model.reward, BellmanMode::Max, vmax, frontier);
    CHECK(applied_max.equal_on(frontier, vmax));
    // it is also a fixed point of the min operator
    ValueFunction applied_min =
        bellman_apply(*model.mdp, model.reward, BellmanMode::Min, vmax, frontier);
    CHECK(applied_min.equal_on(frontier, vmax));
}

TEST_CASE("first kleene iterate is the reward function") {
    BuiltinModel model = ladder_model(q(1));
    LadderStates ls = ladder_states(*model.mdp, 2);
    KleeneResult res =
        kleene_iterate(*model.mdp, model.reward, BellmanMode::Min, {ls.tops[0], ls.lefts[0]}, 1);
    CHECK(res.iterates.at(1).get(ls.tops[0]) == q(0));
    CHECK(res.iterates.at(1).get(ls.lefts[0]) == q(1));
}

TEST_CASE("kleene iterates on the infinite ladder climb to 2") {
    BuiltinModel model = ladder_model(q(1));
    StateId s0 = *model.mdp->find_state("s0");
    KleeneResult res = kleene_iterate(*model.mdp, model.reward, BellmanMode::Min, {s0}, 80);

    ExtValue prev;
    for (std::size_t k = 0; k < res.iterates.size(); ++k) {
        ExtValue cur = res.iterates[k].get(s0);
        CHECK(prev <= cur);
        CHECK(cur <= q(2));
        prev = cur;
    }
    ExtValue last = res.iterates.back().get(s0);
    CHECK(q(2) < last + q(1, 1000000));
    CHECK(res.verdict == KleeneVerdict::LowerBound);
}

TEST_CASE("lazy-model kleene iterates match brute force on the infinite ladder") {
    for (long r : {0L, 1L, 3L}) {
        BuiltinModel model = ladder_model(q(r));
        KleeneOptions opts;
        opts.stop_on_stabilization = false;
        auto lo = kleene_iterate(*model.mdp, model.reward, BellmanMode::Min, {model.initial}, 6,
                                 opts);
        auto hi = kleene_iterate(*model.mdp, model.reward, BellmanMode::Max, {model.initial}, 6,
                                 opts);
        for (std::size_t n = 0; n <= 5; ++n) {
            CHECK(lo.iterates.at(n + 1).get(model.initial) ==
                  opt_expected_reward_step_bruteforce(*model.mdp, model.reward, model.initial, n,
                                                      OptMode::Min));
            CHECK(hi.iterates.at(n + 1).get(model.initial) ==
                  opt_expected_reward_step_bruteforce(*model.mdp, model.reward, model.initial, n,
                                                      OptMode::Max));
        }
    }
}

TEST_CASE("kleene matches the brute-force horizon optimum exactly") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 40; ++i) {
        auto [mdp, rewards] = testutil::random_model(rng);
        for (StateId s = 0; s < mdp->state_count(); ++s) {
            KleeneOptions opts;
            opts.stop_on_stabilization = false;
            auto min_res = kleene_iterate(*mdp, rewards.as_fn(), BellmanMode::Min, {s}, 4, opts);
            auto max_res = kleene_iterate(*mdp, rewards.as_fn(), BellmanMode::Max, {s}, 4, opts);
            for (std::size_t n = 0; n <= 3; ++n) {
                CHECK(min_res.iterates.at(n + 1).get(s) ==
                      opt_expected_reward_step_bruteforce(*mdp, rewards.as_fn(), s, n, OptMode::Min));
                CHECK(max_res.iterates.at(n + 1).get(s) ==
                      opt_expected_reward_step_bruteforce(*mdp, rewards.as_fn(), s, n, OptMode::Max));
            }
        }
    }
}

TEST_CASE("kleene verdicts distinguish proven fixed points from lower bounds") {
    // On the infinite ladder nothing is ever fully explored, so even all-zero
    // iterates stay a lower-bound claim.
    BuiltinModel model = ladder_model(q(1));
    StateId s0 = *model.mdp->find_state("s0");
    KleeneResult res = kleene_iterate(*model.mdp, zero_rewards(), BellmanMode::Max, {s0}, 25);
    CHECK(res.verdict == KleeneVerdict::LowerBound);
    CHECK(res.last().get(s0) == q(0));

    // A finite truncation is fully explored and its zero fixed point is exact.
    BuiltinModel finite = ladder_model(q(1), 5);
    auto [mdp, rewards] = materialize(*finite.mdp, finite.reward, {finite.initial});
    KleeneResult fin =
        kleene_iterate(*mdp, zero_rewards(), BellmanMode::Max, {mdp->state("s0")}, 25);
    CHECK(fin.verdict == KleeneVerdict::ConvergedExact);
    CHECK(fin.last().get(mdp->state("s0")) == q(0));
    // early stop is sound: the padded accessor keeps answering
    CHECK(fin.value_at(25, mdp->state("s0")) == q(0));
}

TEST_CASE("query-set plateaus do not end the iteration early") {
    // Min iterates at the ladder root go 0, 1/2, 1, 1, 5/4, ...: a genuine
    // plateau at k = 3, 4 that rises again. The sequence must keep climbing
    // to 2 regardless.
    BuiltinModel model = ladder_model(q(1));
    StateId s0 = *model.mdp->find_state("s0");
    KleeneResult res = kleene_iterate(*model.mdp, model.reward, BellmanMode::Min, {s0}, 12);
    CHECK(res.iterates.at(3).get(s0) == q(1));
    CHECK(res.iterates.at(4).get(s0) == q(1));
    CHECK(res.iterates.at(5).get(s0) == q(5, 4));
}

TEST_CASE("kleene respects the node budget") {
    BuiltinModel model = ladder_model(q(1));
    KleeneOptions opts;
    opts.node_budget = 10;
    CHECK_THROWS_AS(
        kleene_iterate(*model.mdp, model.reward, BellmanMode::Min, {model.initial}, 50, opts),
        ResourceCapExceeded);
}

TEST_CASE("park induction accepts the all-infinity candidate") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 20; ++i) {
        auto [mdp, rewards] = testutil::random_model(rng);
        std::vector<StateId> domain = all_states(*mdp);
        ValueFunction inf;
        for (StateId s : domain) inf.set(s, ExtValue::infinity());
        for (BellmanMode mode : {BellmanMode::Min, BellmanMode::Max}) {
            ParkResult res = park_check(*mdp, rewards.as_fn(), mode, inf, domain);
            CHECK(res.certified);
        }
    }
}

TEST_CASE("park induction rejects a candidate one step refutes") {
    // two states: a pays nothing but moves to b, which pays 5; candidate = rewards
    auto m = std::make_shared<ExplicitMdp>(std::vector<std::string>{"a", "b"},
                                           std::vector<std::string>{"go"});
    m->set_transitions(0, 0, Distribution::singleton(1));
    m->set_transitions(1, 0, Distribution::singleton(1));
    m->validate();
    RewardMap rw;
    rw.set(1, q(5));
    ValueFunction candidate;
    candidate.set(0, q(0));
    candidate.set(1, q(5));
    ParkResult res = park_check(*m, rw.as_fn(), BellmanMode::Min, candidate, {0, 1});
    CHECK_FALSE(res.certified);
    REQUIRE(res.counterexample.has_value());
    // the refutation happens where the successor's value leaks in
    CHECK(*res.counterexample == 0);
}

TEST_CASE("park induction requires a successor-closed domain") {
    BuiltinModel model = ladder_model(q(1));
    LadderStates ls = ladder_states(*model.mdp, 2);
    ValueFunction v;
    CHECK_THROWS_AS(
        park_check(*model.mdp, model.reward, BellmanMode::Min, v, {ls.tops[0], ls.lefts[0]}),
        DomainNotSuccessorClosed);
}

TEST_CASE("certified candidates dominate every kleene iterate") {
    const std::size_t columns = 60;
    BuiltinModel model = ladder_model(q(1), columns);
    auto [mdp, rewards] = materialize(*model.mdp, model.reward, {model.initial});
    std::vector<StateId> domain = all_states(*mdp);

    // the closed form of the infinite ladder upper-bounds the truncated one
    ValueFunction candidate;
    for (std::size_t i = 0; i < columns; ++i) {
        candidate.set(mdp->state("s" + std::to_string(i)), q(static_cast<long>(i) + 2));
        candidate.set(mdp->state("s" + std::to_string(i) + "L"), q(static_cast<long>(i) + 4));
        candidate.set(mdp->state("s" + std::to_string(i) + "R"), q(static_cast<long>(i) + 1));
    }
    candidate.set(mdp->state("bot"), q(0));

    ParkResult res = park_check(*mdp, rewards.as_fn(), BellmanMode::Min, candidate, domain);
    CHECK(res.certified);

    KleeneOptions opts;
    opts.stop_on_stabilization = false;
    KleeneResult iter =
        kleene_iterate(*mdp, rewards.as_fn(), BellmanMode::Min, domain, 30, opts);
    for (const ValueFunction& v : iter.iterates) CHECK(v.pointwise_leq(candidate));
}

TEST_CASE("min scheduler extraction on the truncated ladder") {
    // Extraction follows the converged values: with reward 1 on the reward
    // stations, cashing out early is optimal everywhere far from the
    // truncation boundary; with reward 0, walking the top row forever is.
    const std::size_t columns = 110;
    BuiltinModel model = ladder_model(q(1), columns);
    auto [mdp, rewards] = materialize(*model.mdp, model.reward, {model.initial});
    std::vector<StateId> domain = all_states(*mdp);

    KleeneOptions opts;
    KleeneResult iter = kleene_iterate(*mdp, rewards.as_fn(), BellmanMode::Min, domain, 400, opts);
    MemorylessScheduler sched = extract_min_scheduler(*mdp, rewards.as_fn(), iter.last(), domain);
    for (std::size_t i = 0; i < 50; ++i) {
        StateId top = mdp->state("s" + std::to_string(i));
        CHECK(mdp->action_name(sched.at(top)) == "R");
    }

    BuiltinModel zero_model = ladder_model(q(0), columns);
    auto [mdp0, rewards0] = materialize(*zero_model.mdp, zero_model.reward, {zero_model.initial});
    KleeneResult iter0 =
        kleene_iterate(*mdp0, rewards0.as_fn(), BellmanMode::Min, all_states(*mdp0), 40, opts);
    MemorylessScheduler sched0 =
        extract_min_scheduler(*mdp0, rewards0.as_fn(), iter0.last(), all_states(*mdp0));
    for (std::size_t i = 0; i < 50; ++i) {
        StateId top = mdp0->state("s" + std::to_string(i));
        CHECK(mdp0->action_name(sched0.at(top)) == "L");
    }
}

TEST_CASE("extraction breaks ties by declaration order") {
    // both actions lead to the same place with the same value
    auto m = std::make_shared<ExplicitMdp>(std::vector<std::string>{"a", "b"},
                                           std::vector<std::string>{"stay", "also"});
    m->set_transitions(0, 1, Distribution::singleton(1));  // declared first in insertion order
    m->set_transitions(0, 0, Distribution::singleton(1));
    m->set_transitions(1, 0, Distribution::singleton(1));
    m->validate();
    MemorylessScheduler sched =
        extract_min_scheduler(*m, zero_rewards(), ValueFunction{}, {0, 1});
    // tie at state a: the least action id wins regardless of insertion order
    CHECK(m->action_name(sched.at(0)) == "stay");
}

TEST_CASE("extraction on a single-action model returns the unique scheduler") {
    std::mt19937_64 rng(3);
    auto [mdp, rewards] = testutil::random_model(rng, 4, 1);
    std::vector<StateId> domain = all_states(*mdp);
    MemorylessScheduler sched =
        extract_min_scheduler(*mdp, rewards.as_fn(), ValueFunction{}, domain);
    for (StateId s : domain) CHECK(sched.at(s) == mdp->enabled_actions(s)[0]);
}

TEST_CASE("extraction under the exact lfp attains the lfp in the induced chain") {
    std::mt19937_64 rng(59);
    int convergent = 0;
    for (int i = 0; i < 30; ++i) {
        auto [mdp, rewards] = testutil::random_dag_model(rng);
        std::vector<StateId> domain = all_states(*mdp);
        KleeneOptions opts;
        KleeneResult iter =
            kleene_iterate(*mdp, rewards.as_fn(), BellmanMode::Min, domain, 3 * mdp->state_count(),
                           opts);
        if (iter.verdict != KleeneVerdict::ConvergedExact) continue;
        ++convergent;
        MemorylessScheduler sched =
            extract_min_scheduler(*mdp, rewards.as_fn(), iter.last(), domain);
        auto chain = induced_mc(mdp, sched);
        KleeneResult chain_iter =
            kleene_iterate(*chain, rewards.as_fn(), BellmanMode::Min, domain,
                           3 * mdp->state_count(), opts);
        CHECK(chain_iter.verdict == KleeneVerdict::ConvergedExact);
        for (StateId s : domain) CHECK(chain_iter.last().get(s) == iter.last().get(s));
    }
    CHECK(convergent >= 20);  // DAG models stabilize exactly
}

TEST_CASE("divergence probe") {
    // rising max rewards on the ladder blow past any finite threshold
    BuiltinModel model = ladder_model(q(5));
    DivergenceVerdict v = divergence_probe(*model.mdp, model.reward, BellmanMode::Max,
                                           model.initial, q(1000), 500);
    CHECK(v.exceeded);
    CHECK(v.at_step <= 500);

    BuiltinModel chain = cashout_chain_model();
    StateId far = *chain.mdp->find_state("s600");
    DivergenceVerdict w =
        divergence_probe(*chain.mdp, chain.reward, BellmanMode::Max, far, q(1000), 500);
    CHECK(w.exceeded);

    DivergenceVerdict z = divergence_probe(*model.mdp, zero_rewards(), BellmanMode::Max,
                                           model.initial, q(1, 100), 60);
    CHECK_FALSE(z.exceeded);
}
