#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polyinv/errors.hpp"

namespace polyinv {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rational& q) { return numerator(q); }
inline Int rat_den(const Rational& q) { return denominator(q); }

inline Rational make_rational(const Int& num, const Int& den) {
    if (den == 0) throw InputError("rational with zero denominator");
    return Rational(num, den);
}

// Parses "a/b", "a" or "-a/b". Whitespace is not accepted.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw InputError("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        return make_rational(num, den);
    } catch (const std::exception&) {
        throw InputError("malformed rational literal: " + s);
    }
}

// Reduced form, "/1" omitted.
inline std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << rat_num(q);
    if (rat_den(q) != 1) os << "/" << rat_den(q);
    return os.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Largest integer <= q.
inline Int rat_floor(const Rational& q) {
    Int n = rat_num(q), d = rat_den(q);
    Int f = n / d;
    if (n < 0 && f * d != n) --f;
    return f;
}

inline Int rat_ceil(const Rational& q) { return -rat_floor(-q); }

inline Int int_gcd(Int a, Int b) { return boost::multiprecision::gcd(a, b); }
inline Int int_lcm(Int a, Int b) {
    if (a == 0 || b == 0) return 0;
    return a / int_gcd(a, b) * b;
}

inline Int int_pow(const Int& base, unsigned exp) {
    Int r = 1, b = base;
    unsigned e = exp;
    while (e) {
        if (e & 1u) r *= b;
        b *= b;
        e >>= 1u;
    }
    return r;
}

// Best rational approximation to q with denominator <= max_den, via the
// Stern-Brocot descent. Exact when q itself qualifies.
inline Rational round_to_denominator(const Rational& q, const Int& max_den) {
    if (rat_den(q) <= max_den) return q;
    Int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Rational x = q;
    Int num = rat_num(q), den = rat_den(q);
    // continued fraction expansion with convergent/semiconvergent cut-off
    Int a_num = num, a_den = den;
    while (true) {
        Int a = a_num / a_den;
        if (a_num < 0 && a * a_den != a_num) --a;
        Int p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) {
            // best semiconvergent
            Int k = (max_den - q0) / q1;
            Int ps = k * p1 + p0, qs = k * q1 + q0;
            Rational semi = qs > 0 ? Rational(ps, qs) : Rational(p1, q1);
            Rational conv(p1, q1);
            if (q1 == 0) return semi;
            return boost::multiprecision::abs(semi - q) < boost::multiprecision::abs(conv - q)
                       ? semi
                       : conv;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Int r = a_num - a * a_den;
        if (r == 0) return Rational(p1, q1);
        a_num = a_den;
        a_den = r;
    }
}

inline Int denominators_lcm(const std::vector<Rational>& xs) {
    Int l = 1;
    for (const auto& x : xs) l = int_lcm(l, rat_den(x));
    return l;
}

// "num/den or bottom" -- the value of a valuation that may be
// indistinguishable from infinity at finite precision.
using MaybeRational = std::optional<Rational>;

}  // namespace polyinv
