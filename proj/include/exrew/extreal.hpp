#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace exrew {

// Exact arbitrary-precision rational. All probabilities, rewards and program
// values in this library are rationals; nothing in the core ever rounds.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);

// Parses "p", "-p", "p/q" with arbitrary-precision integers.
Rational parse_rational(const std::string& text);

// Canonical rendering: "p" when the denominator is 1, else "p/q".
std::string rational_str(const Rational& q);

// An extended nonnegative real: an exact rational >= 0, or infinity.
//
// Arithmetic conventions: a + inf = inf + a = inf, and 0 * inf = inf * 0 = 0.
// The order is total, with every finite value below infinity. Values are
// immutable once constructed and safe to share across threads.
class ExtValue {
public:
    ExtValue() : finite_(0) {}
    ExtValue(const Rational& q);  // throws std::invalid_argument on negative
    ExtValue(long n);

    static ExtValue infinity();
    static ExtValue zero() { return ExtValue(); }

    bool is_infinite() const { return infinite_; }
    bool is_zero() const { return !infinite_ && finite_ == 0; }

    // Only valid on finite values.
    const Rational& finite_value() const;

    friend ExtValue operator+(const ExtValue& a, const ExtValue& b);
    friend ExtValue operator*(const ExtValue& a, const ExtValue& b);
    ExtValue& operator+=(const ExtValue& o) { return *this = *this + o; }

    friend bool operator==(const ExtValue& a, const ExtValue& b);
    friend bool operator!=(const ExtValue& a, const ExtValue& b) { return !(a == b); }
    friend bool operator<(const ExtValue& a, const ExtValue& b);
    friend bool operator<=(const ExtValue& a, const ExtValue& b);
    friend bool operator>(const ExtValue& a, const ExtValue& b) { return b < a; }
    friend bool operator>=(const ExtValue& a, const ExtValue& b) { return b <= a; }

    // inf maps to +infinity; intended for reporting only, never for the lattice.
    double to_double() const;

    // Renders "p/q" / "p" for finite values and "inf" for infinity; parse is
    // the exact inverse on canonical forms and accepts non-canonical "p/q".
    std::string str() const;
    static ExtValue parse(const std::string& text);

private:
    bool infinite_ = false;
    Rational finite_;
};

ExtValue min(const ExtValue& a, const ExtValue& b);
ExtValue max(const ExtValue& a, const ExtValue& b);

// Thrown by bounded_sup when the generator violates its monotonicity contract.
class MonotonicityViolation : public std::logic_error {
public:
    explicit MonotonicityViolation(std::size_t index)
        : std::logic_error("generator decreased at index " + std::to_string(index)),
          index(index) {}
    std::size_t index;
};

struct SupResult {
    ExtValue value;
    bool exact = false;  // stabilized (two equal consecutive terms) or hit infinity
    std::size_t terms = 0;
};

// Evaluates a nondecreasing sequence for up to `budget` terms and returns the
// last term. The result is flagged exact when the sequence visibly stabilized
// (last two terms equal, or an infinite term absorbed the supremum); otherwise
// it is only a lower bound on the supremum. A decreasing step throws.
SupResult bounded_sup(const std::function<ExtValue(std::size_t)>& term, std::size_t budget);

}  // namespace exrew
