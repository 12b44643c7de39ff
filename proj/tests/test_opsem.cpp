#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <thread>

#include "exrew/pgcl/opsem.hpp"
#include "exrew/pgcl/parser.hpp"

using namespace exrew;
using namespace exrew::pgcl;

namespace {

Rational rq(long num, long den = 1) { return make_rational(num, den); }

const char* kLoopText =
    "while (x = 0) { {tick(1)} [] {{skip} [1/2] {x := 1}}; y := y + 1 }";

}  // namespace

TEST_CASE("skip steps to a terminated configuration") {
    ProgramState sigma = ProgramState{}.with("x", rq(2));
    auto steps = step(Configuration::running(Stmt::skip(), sigma));
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].action == OpAction::N);
    REQUIRE(steps[0].outcomes.size() == 1);
    CHECK(steps[0].outcomes[0].first == Configuration::terminated(sigma));
    CHECK(steps[0].outcomes[0].second == 1);
}

TEST_CASE("assignment updates the state in one step") {
    StmtPtr assign = parse_program("x := x + 1");
    auto steps = step(Configuration::running(assign, ProgramState{}));
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].outcomes[0].first ==
          Configuration::terminated(ProgramState{}.with("x", rq(1))));
}

TEST_CASE("probabilistic choice splits unless the branches are equal") {
    ProgramState sigma;
    StmtPtr distinct = parse_program("{skip} [1/3] {x := 1}");
    auto steps = step(Configuration::running(distinct, sigma));
    REQUIRE(steps.size() == 1);
    REQUIRE(steps[0].outcomes.size() == 2);
    CHECK(steps[0].outcomes[0].second == rq(1, 3));
    CHECK(steps[0].outcomes[1].second == rq(2, 3));

    // syntactically equal branches collapse to a single probability-1 move
    StmtPtr equal = parse_program("{x := 1} [1/3] {x := 1}");
    auto esteps = step(Configuration::running(equal, sigma));
    REQUIRE(esteps.size() == 1);
    REQUIRE(esteps[0].outcomes.size() == 1);
    CHECK(esteps[0].outcomes[0].second == 1);

    // degenerate probabilities drop the dead branch
    StmtPtr sure = parse_program("{skip} [1] {x := 1}");
    auto ssteps = step(Configuration::running(sure, sigma));
    REQUIRE(ssteps[0].outcomes.size() == 1);
    CHECK(ssteps[0].outcomes[0].first == Configuration::running(Stmt::skip(), sigma));
}

TEST_CASE("nondeterministic choice enables exactly L and R") {
    StmtPtr nd = parse_program("{skip} [] {tick(1)}");
    auto steps = step(Configuration::running(nd, ProgramState{}));
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].action == OpAction::L);
    CHECK(steps[1].action == OpAction::R);

    // also when the choice sits at the head of a sequence
    StmtPtr seq = Stmt::seq(nd, Stmt::skip());
    auto lifted = step(Configuration::running(seq, ProgramState{}));
    REQUIRE(lifted.size() == 2);
    // the lifted successor keeps the continuation
    const Configuration& after_l = lifted[0].outcomes[0].first;
    REQUIRE(after_l.kind == Configuration::Kind::Running);
    CHECK(after_l.program->kind == Stmt::Kind::Seq);
}

TEST_CASE("terminal configurations funnel into the absorbing sink") {
    auto done = step(Configuration::terminated(ProgramState{}));
    REQUIRE(done.size() == 1);
    CHECK(done[0].outcomes[0].first == Configuration::sink());

    auto sink = step(Configuration::sink());
    REQUIRE(sink.size() == 1);
    CHECK(sink[0].outcomes[0].first == Configuration::sink());
}

TEST_CASE("while loop unfolds on a true guard and exits on a false one") {
    StmtPtr loop = parse_program("while (x = 0) { x := 1 }");
    auto entering = step(Configuration::running(loop, ProgramState{}));
    const Configuration& unfolded = entering[0].outcomes[0].first;
    REQUIRE(unfolded.kind == Configuration::Kind::Running);
    CHECK(unfolded.program->kind == Stmt::Kind::Seq);
    CHECK(stmt_equal(unfolded.program->b, loop));

    ProgramState done = ProgramState{}.with("x", rq(1));
    auto exiting = step(Configuration::running(loop, done));
    CHECK(exiting[0].outcomes[0].first == Configuration::terminated(done));
}

TEST_CASE("every configuration has one action, nondeterministic heads two") {
    std::vector<std::string> programs = {
        "skip", "tick(2)", "x := 1", "skip; skip", "{skip} [1/2] {x := 1}",
        "if (x = 0) {skip} else {skip}", "while (x = 0) {x := 1}",
        "{skip} [] {skip}", "{{skip} [] {skip}}; x := 1",
    };
    for (const auto& text : programs) {
        StmtPtr prog = parse_program(text);
        auto steps = step(Configuration::running(prog, ProgramState{}));
        const Stmt* head = prog.get();
        while (head->kind == Stmt::Kind::Seq) head = head->a.get();
        std::size_t expected = head->kind == Stmt::Kind::Nondet ? 2 : 1;
        CHECK(steps.size() == expected);
        for (const auto& st : steps) {
            Rational total(0);
            for (const auto& [_, p] : st.outcomes) total += p;
            CHECK(total == 1);
        }
    }
}

TEST_CASE("rewards sit on tick heads only") {
    ProgramState sigma;
    StmtPtr tick = Stmt::tick(ExtValue(rq(3, 2)));
    CHECK(rew_pgcl(Configuration::running(tick, sigma)) == ExtValue(rq(3, 2)));
    // also when the tick heads a (nested) sequence
    StmtPtr seq = Stmt::seq(Stmt::seq(tick, Stmt::skip()), Stmt::skip());
    CHECK(rew_pgcl(Configuration::running(seq, sigma)) == ExtValue(rq(3, 2)));
    CHECK(rew_pgcl(Configuration::running(Stmt::skip(), sigma)) == ExtValue::zero());
    CHECK(rew_pgcl(Configuration::sink()) == ExtValue::zero());
    CHECK(rew_pgcl(Configuration::terminated(sigma)) == ExtValue::zero());
    // infinite tick rewards are legal
    CHECK(rew_pgcl(Configuration::running(Stmt::tick(ExtValue::infinity()), sigma)) ==
          ExtValue::infinity());
}

TEST_CASE("interning maps structurally equal configurations to one state") {
    auto mdp = std::make_shared<OperationalMdp>();
    StmtPtr p1 = parse_program("x := 1; skip");
    StmtPtr p2 = parse_program("x := 1; skip");
    ProgramState a = ProgramState{}.with("y", rq(2)).with("z", rq(0));
    ProgramState b = ProgramState{}.with("y", rq(2));
    CHECK(mdp->intern(Configuration::running(p1, a)) ==
          mdp->intern(Configuration::running(p2, b)));
    CHECK(mdp->intern(Configuration::running(p1, a)) !=
          mdp->intern(Configuration::running(p1, ProgramState{})));
}

TEST_CASE("from a terminated configuration exactly two states are reachable") {
    auto mdp = std::make_shared<OperationalMdp>();
    StateId done = mdp->intern(Configuration::terminated(ProgramState{}.with("x", rq(1))));
    std::vector<StateId> frontier{done};
    std::set<StateId> seen{done};
    for (int i = 0; i < 5; ++i) {
        std::vector<StateId> next;
        for (StateId s : frontier)
            for (StateId t : mdp->all_successors(s))
                if (seen.insert(t).second) next.push_back(t);
        frontier = next;
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("torew puts the postexpectation on terminated states") {
    auto mdp = std::make_shared<OperationalMdp>();
    auto post_y = [](const ProgramState& s) { return ExtValue(s.get("y")); };
    RewardFn rew = torew(mdp, post_y);

    ProgramState tau = ProgramState{}.with("y", rq(7));
    CHECK(rew(mdp->intern(Configuration::terminated(tau))) == ExtValue(rq(7)));
    CHECK(rew(mdp->intern(Configuration::sink())) == ExtValue::zero());
    StmtPtr tick = Stmt::tick(ExtValue(rq(2)));
    CHECK(rew(mdp->intern(Configuration::running(tick, tau))) == ExtValue(rq(2)));

    // with the zero postexpectation, torew collapses to the tick rewards
    RewardFn plain = torew(mdp, [](const ProgramState&) { return ExtValue::zero(); });
    CHECK(plain(mdp->intern(Configuration::terminated(tau))) == ExtValue::zero());
    CHECK(plain(mdp->intern(Configuration::running(tick, tau)))== ExtValue(rq(2)));
}

TEST_CASE("concurrent queries observe pure-function behavior") {
    // Lazy expansion memoizes internally; parallel readers must agree with a
    // sequential reference run.
    auto mdp = std::make_shared<OperationalMdp>();
    StmtPtr prog = parse_program(kLoopText);
    Configuration start = Configuration::running(prog, ProgramState{});

    auto reference = std::make_shared<OperationalMdp>();
    std::string expected = dump_fragment(*reference, start, 8, {"x", "y"});

    std::vector<std::thread> workers;
    std::vector<std::string> results(4);
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&, t] { results[t] = dump_fragment(*mdp, start, 8, {"x", "y"}); });
    }
    for (auto& w : workers) w.join();
    for (const auto& r : results) CHECK(r == expected);
}

TEST_CASE("the reachable fragment of the loop example") {
    auto mdp = std::make_shared<OperationalMdp>();
    StmtPtr prog = parse_program(kLoopText);
    Configuration start = Configuration::running(prog, ProgramState{});

    std::string dump = dump_fragment(*mdp, start, 6, {"x", "y"});

    // depth layers: 1 root, 1 unfolded body, 2 choice branches, 3 after the
    // probabilistic split (with the two equal-label assign configs merged),
    // then the loop head at y=1 wraps around
    CHECK(dump.find("node 0 depth 0 \"while (x = 0) { ... } | x=0,y=0\"") != std::string::npos);
    CHECK(dump.find("\"tick(1); ...; ... | x=0,y=0\"") != std::string::npos);
    CHECK(dump.find("\"{...} [1/2] {...}; ...; ... | x=0,y=0\"") != std::string::npos);
    CHECK(dump.find("\"y := y + 1; ... | x=0,y=0\"") != std::string::npos);
    CHECK(dump.find("\"y := y + 1; ... | x=1,y=0\"") != std::string::npos);
    CHECK(dump.find("\"while (x = 0) { ... } | x=0,y=1\"") != std::string::npos);
    CHECK(dump.find("\"while (x = 0) { ... } | x=1,y=1\"") != std::string::npos);
    CHECK(dump.find("\"done | x=1,y=1\"") != std::string::npos);
    // the tick path and the skip path share the interned assignment node
    CHECK(dump.find("edge 2 N 1 4") != std::string::npos);
    CHECK(dump.find("edge 5 N 1 4") != std::string::npos);

    // rewards along the fragment: exactly the tick-headed configuration pays
    auto post_y = [](const ProgramState& s) { return ExtValue(s.get("y")); };
    RewardFn rew = torew(mdp, post_y);
    StateId tick_head = *mdp->find_state(
        Configuration::running(Stmt::seq(Stmt::seq(Stmt::tick(ExtValue(rq(1))),
                                                   parse_program("y := y + 1")),
                                         prog),
                               ProgramState{})
            .key());
    CHECK(rew(tick_head) == ExtValue(rq(1)));
    CHECK(rew(mdp->intern(start)) == ExtValue::zero());
    CHECK(rew(mdp->intern(Configuration::terminated(
              ProgramState{}.with("x", rq(1)).with("y", rq(1))))) == ExtValue(rq(1)));
}
