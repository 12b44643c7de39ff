#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "exrew/pgcl/expectation.hpp"
#include "exrew/pgcl/parser.hpp"
#include "pgcl_test_util.hpp"

using namespace exrew;
using namespace exrew::pgcl;

using namespace exrew::pgcl::testgen;

TEST_CASE("program state basics") {
    ProgramState s;
    CHECK(s.get("x") == 0);
    ProgramState s2 = s.with("x", rq(3, 2));
    CHECK(s2.get("x") == rq(3, 2));
    CHECK(s2.get("y") == 0);
    CHECK(s.get("x") == 0);  // immutable

    // writing zero drops the entry: states are support-insensitive
    ProgramState with_zero = s2.with("y", rq(0));
    CHECK(with_zero == s2);
    CHECK(with_zero.str() == "x=3/2");

    ProgramState parsed = ProgramState::parse("x=3/2,y=0");
    CHECK(parsed == s2);
    CHECK(ProgramState::parse("") == ProgramState{});
    CHECK_THROWS_AS(ProgramState::parse("x"), std::invalid_argument);
}

TEST_CASE("arithmetic evaluation") {
    ProgramState s = ProgramState{}.with("y", rq(0));
    CHECK(eval_aexpr(*parse_aexpr("x"), ProgramState{}) == 0);
    CHECK(eval_aexpr(*parse_aexpr("y + 1"), s) == 1);
    CHECK(eval_aexpr(*parse_aexpr("1 - 2"), s) == 0);  // monus clamps
    CHECK(eval_aexpr(*parse_aexpr("2 * (3 - 1) + 1/2"), s) == rq(9, 2));
    CHECK(eval_aexpr(*parse_aexpr("1 - 1/2 - 1/4"), s) == rq(1, 4));
}

TEST_CASE("boolean evaluation") {
    ProgramState s = ProgramState{}.with("x", rq(1));
    CHECK(eval_bexpr(*parse_bexpr("x = 1"), s));
    CHECK(eval_bexpr(*parse_bexpr("x != 0"), s));
    CHECK(eval_bexpr(*parse_bexpr("x <= 1 && x >= 1"), s));
    CHECK(eval_bexpr(*parse_bexpr("x < 1 || true"), s));
    CHECK_FALSE(eval_bexpr(*parse_bexpr("!(x = 1)"), s));
    CHECK(eval_bexpr(*parse_bexpr("(x + 1) = 2"), s));
    CHECK(eval_bexpr(*parse_bexpr("(x = 1) && (0 = 0)"), s));
}

TEST_CASE("parses the statement forms") {
    CHECK(parse_program("skip")->kind == Stmt::Kind::Skip);
    CHECK(parse_program("tick(1/2)")->reward == ExtValue(rq(1, 2)));
    CHECK(parse_program("tick(inf)")->reward == ExtValue::infinity());

    StmtPtr assign = parse_program("x := y + 1");
    CHECK(assign->kind == Stmt::Kind::Assign);
    CHECK(assign->var == "x");

    StmtPtr seq = parse_program("skip; x := 1; skip");
    CHECK(seq->kind == Stmt::Kind::Seq);
    CHECK(seq->b->kind == Stmt::Kind::Seq);  // right-folded

    StmtPtr prob = parse_program("{skip} [1/3] {x := 1}");
    CHECK(prob->kind == Stmt::Kind::Prob);
    CHECK(prob->prob == rq(1, 3));

    StmtPtr nd = parse_program("{skip} [] {tick(1)}");
    CHECK(nd->kind == Stmt::Kind::Nondet);

    StmtPtr ite = parse_program("if (x = 0) {skip} else {x := 1}");
    CHECK(ite->kind == Stmt::Kind::If);

    StmtPtr loop = parse_program("while (x = 0) {x := 1}");
    CHECK(loop->kind == Stmt::Kind::While);
}

TEST_CASE("parses the looping reward-collection example") {
    StmtPtr prog = parse_program(
        "while (x = 0) { {tick(1)} [] {{skip} [1/2] {x := 1}}; y := y + 1 }");
    REQUIRE(prog->kind == Stmt::Kind::While);
    const Stmt& body = *prog->a;
    REQUIRE(body.kind == Stmt::Kind::Seq);
    CHECK(body.a->kind == Stmt::Kind::Nondet);
    CHECK(body.a->a->kind == Stmt::Kind::Tick);
    CHECK(body.a->b->kind == Stmt::Kind::Prob);
    CHECK(body.b->kind == Stmt::Kind::Assign);
    CHECK(stmt_variables(*prog) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("parse errors carry a location") {
    auto loc = [](const std::string& text) {
        try {
            parse_program(text);
            FAIL("expected a parse error");
            return std::pair<std::size_t, std::size_t>{0, 0};
        } catch (const ParseError& e) {
            return std::pair<std::size_t, std::size_t>{e.line, e.column};
        }
    };
    CHECK(loc("skip;\n skup").first == 2);
    CHECK(loc("x :=") == std::pair<std::size_t, std::size_t>{1, 5});
    CHECK(loc("tick(2/0)") == std::pair<std::size_t, std::size_t>{1, 6});
    CHECK(loc("{skip} [3/2] {skip}").first == 1);  // probability outside [0,1]
}

TEST_CASE("parse of pretty-print is the identity on random programs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 400; ++i) {
        StmtPtr prog = random_stmt(rng, 4, true);
        std::string text = stmt_str(*prog);
        StmtPtr back = parse_program(text);
        CHECK(stmt_equal(prog, back));
        // and printing is idempotent through a parse
        CHECK(stmt_str(*back) == text);
    }
}

TEST_CASE("pretty-print preserves left-nested sequences") {
    StmtPtr left = Stmt::seq(Stmt::seq(Stmt::skip(), Stmt::tick(ExtValue(rq(1)))), Stmt::skip());
    StmtPtr right = Stmt::seq(Stmt::skip(), Stmt::seq(Stmt::tick(ExtValue(rq(1))), Stmt::skip()));
    CHECK_FALSE(stmt_equal(left, right));
    CHECK(stmt_str(*left) != stmt_str(*right));
    CHECK(stmt_equal(parse_program(stmt_str(*left)), left));
    CHECK(stmt_equal(parse_program(stmt_str(*right)), right));
}

TEST_CASE("expectation parsing") {
    Expectation e = parse_expectation("[x = 0] * (y + 2) + [x != 0] * y");
    ProgramState zero;
    CHECK(e.eval(zero) == ExtValue(rq(2)));
    ProgramState x1y3 = ProgramState{}.with("x", rq(1)).with("y", rq(3));
    CHECK(e.eval(x1y3) == ExtValue(rq(3)));

    CHECK(parse_expectation("inf").eval(zero) == ExtValue::infinity());
    CHECK(parse_expectation("min(3, 2)").eval(zero) == ExtValue(rq(2)));
    CHECK(parse_expectation("max(x, 1)").eval(x1y3) == ExtValue(rq(1)));
    CHECK(parse_expectation("0 * inf").eval(zero) == ExtValue(rq(0)));
}
