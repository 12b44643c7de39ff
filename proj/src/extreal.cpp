#include "exrew/extreal.hpp"

#include <limits>

namespace exrew {

Rational make_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    Rational q;
    if (q.set_str(text, 10) != 0)
        throw std::invalid_argument("malformed rational literal: '" + text + "'");
    if (q.get_den() == 0) throw std::invalid_argument("rational with zero denominator: '" + text + "'");
    q.canonicalize();
    return q;
}

std::string rational_str(const Rational& q) {
    return q.get_str();
}

ExtValue::ExtValue(const Rational& q) : finite_(q) {
    if (finite_ < 0) throw std::invalid_argument("negative value in nonnegative domain: " + q.get_str());
}

ExtValue::ExtValue(long n) : finite_(n) {
    if (n < 0) throw std::invalid_argument("negative value in nonnegative domain");
}

ExtValue ExtValue::infinity() {
    ExtValue v;
    v.infinite_ = true;
    return v;
}

const Rational& ExtValue::finite_value() const {
    if (infinite_) throw std::logic_error("finite_value() on infinity");
    return finite_;
}

ExtValue operator+(const ExtValue& a, const ExtValue& b) {
    if (a.infinite_ || b.infinite_) return ExtValue::infinity();
    return ExtValue(Rational(a.finite_ + b.finite_));
}

ExtValue operator*(const ExtValue& a, const ExtValue& b) {
    // 0 * inf = inf * 0 = 0 takes precedence over absorption.
    if (a.is_zero() || b.is_zero()) return ExtValue::zero();
    if (a.infinite_ || b.infinite_) return ExtValue::infinity();
    return ExtValue(Rational(a.finite_ * b.finite_));
}

bool operator==(const ExtValue& a, const ExtValue& b) {
    if (a.infinite_ != b.infinite_) return false;
    return a.infinite_ || a.finite_ == b.finite_;
}

bool operator<(const ExtValue& a, const ExtValue& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.finite_ < b.finite_;
}

bool operator<=(const ExtValue& a, const ExtValue& b) {
    return a < b || a == b;
}

double ExtValue::to_double() const {
    if (infinite_) return std::numeric_limits<double>::infinity();
    return finite_.get_d();
}

std::string ExtValue::str() const {
    return infinite_ ? "inf" : rational_str(finite_);
}

ExtValue ExtValue::parse(const std::string& text) {
    if (text == "inf") return infinity();
    return ExtValue(parse_rational(text));
}

ExtValue min(const ExtValue& a, const ExtValue& b) { return a <= b ? a : b; }
ExtValue max(const ExtValue& a, const ExtValue& b) { return a <= b ? b : a; }

SupResult bounded_sup(const std::function<ExtValue(std::size_t)>& term, std::size_t budget) {
    SupResult r;
    bool have_prev = false;
    ExtValue prev;
    for (std::size_t i = 0; i < budget; ++i) {
        ExtValue cur = term(i);
        if (have_prev && cur < prev) throw MonotonicityViolation(i);
        r.terms = i + 1;
        if (cur.is_infinite()) {
            r.value = cur;
            r.exact = true;  // infinity absorbs the supremum
            return r;
        }
        r.exact = have_prev && cur == prev;
        r.value = cur;
        prev = cur;
        have_prev = true;
    }
    return r;
}

}  // namespace exrew
