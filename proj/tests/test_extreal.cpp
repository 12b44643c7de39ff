#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "exrew/extreal.hpp"

using namespace exrew;

namespace {

ExtValue q(long num, long den = 1) { return ExtValue(make_rational(num, den)); }

ExtValue random_value(std::mt19937_64& rng) {
    if (rng() % 8 == 0) return ExtValue::infinity();
    long num = static_cast<long>(rng() % 20);
    long den = static_cast<long>(rng() % 7) + 1;
    return q(num, den);
}

}  // namespace

TEST_CASE("addition absorbs infinity") {
    CHECK(q(1) + ExtValue::infinity() == ExtValue::infinity());
    CHECK(ExtValue::infinity() + q(1) == ExtValue::infinity());
    CHECK(q(0) + q(0) == q(0));
    CHECK(q(1, 2) + q(1, 3) == q(5, 6));
}

TEST_CASE("multiplication annihilates at zero even against infinity") {
    CHECK(q(0) * ExtValue::infinity() == q(0));
    CHECK(ExtValue::infinity() * q(0) == q(0));
    CHECK(q(2) * ExtValue::infinity() == ExtValue::infinity());
    CHECK(q(1) * q(7, 3) == q(7, 3));
    CHECK(q(1) * ExtValue::infinity() == ExtValue::infinity());
}

TEST_CASE("total order") {
    CHECK(q(1, 3) < q(1, 2));
    CHECK(q(1000000) < ExtValue::infinity());
    CHECK_FALSE(ExtValue::infinity() < ExtValue::infinity());
    CHECK(ExtValue::infinity() <= ExtValue::infinity());
    CHECK(min(q(3), ExtValue::infinity()) == q(3));
    CHECK(max(q(3), ExtValue::infinity()) == ExtValue::infinity());
}

TEST_CASE("no negative values representable") {
    CHECK_THROWS_AS(ExtValue(make_rational(-1, 2)), std::invalid_argument);
}

TEST_CASE("algebraic laws on random values") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        ExtValue a = random_value(rng), b = random_value(rng), c = random_value(rng);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(q(0) * a == q(0));
        // totality and antisymmetry of the order
        CHECK((a <= b || b <= a));
        if (a <= b && b <= a) CHECK(a == b);
    }
}

TEST_CASE("rendering round-trips") {
    CHECK(q(1, 2).str() == "1/2");
    CHECK(q(5).str() == "5");
    CHECK(ExtValue::infinity().str() == "inf");
    CHECK(ExtValue::parse("1/2") == q(1, 2));
    CHECK(ExtValue::parse("10/4") == q(5, 2));
    CHECK(ExtValue::parse("inf") == ExtValue::infinity());
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        ExtValue v = random_value(rng);
        CHECK(ExtValue::parse(v.str()) == v);
    }
    CHECK_THROWS_AS(ExtValue::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(ExtValue::parse("abc"), std::invalid_argument);
    CHECK_THROWS_AS(ExtValue::parse("-3"), std::invalid_argument);
}

TEST_CASE("bounded_sup on partial sums of (1/2)^(i+1) * (i+1)") {
    // partial sums approach 2 but never reach it at finite budgets
    auto partial = [](std::size_t n) {
        Rational sum(0);
        for (std::size_t i = 0; i <= n; ++i)
            sum += make_rational(static_cast<long>(i) + 1) /
                   (Rational(1) << static_cast<unsigned long>(i + 1));
        return ExtValue(sum);
    };
    SupResult r = bounded_sup(partial, 30);
    CHECK_FALSE(r.exact);
    CHECK(r.value < q(2));
    CHECK(q(2) < r.value + q(1, 1000000));
}

TEST_CASE("bounded_sup stabilization and absorption") {
    SupResult zero = bounded_sup([](std::size_t) { return ExtValue::zero(); }, 5);
    CHECK(zero.exact);
    CHECK(zero.value == q(0));

    SupResult inf = bounded_sup(
        [](std::size_t i) { return i >= 2 ? ExtValue::infinity() : ExtValue(long(i)); }, 10);
    CHECK(inf.exact);
    CHECK(inf.value == ExtValue::infinity());
    CHECK(inf.terms == 3);

    CHECK_THROWS_AS(
        bounded_sup([](std::size_t i) { return ExtValue(long(10 - i)); }, 5),
        MonotonicityViolation);
}
