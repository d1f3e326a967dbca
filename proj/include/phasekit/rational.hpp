#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "phasekit/errors.hpp"

namespace phasekit {

/// Arbitrary precision rational, always kept in lowest terms with a
/// positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw DomainError("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline int sign(const Rational& r) { return sgn(r); }

inline double to_double(const Rational& r) { return r.get_d(); }

/// "n" for integers, "n/d" otherwise.
inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Exact conversion of a finite double.
inline Rational from_double(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite value cannot be rationalized");
    Rational r(v);
    r.canonicalize();
    return r;
}

/// Parses "n", "-n", "n/d" or a decimal literal such as "2.5" or "-1e-3".
/// Decimals are converted exactly from their digits.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw DomainError("malformed rational '" + std::string(text) + "'");
    };
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) return fail();

    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in '" + s + "'");
        Rational r = num / den;
        r.canonicalize();
        return r;
    }

    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') {
        negative = s[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) return fail();
    long exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') return fail();
        ++i;
        std::string exp_text = s.substr(i);
        if (exp_text.empty()) return fail();
        std::size_t used = 0;
        try {
            exponent = std::stol(exp_text, &used);
        } catch (const std::exception&) {
            return fail();
        }
        if (used != exp_text.size()) return fail();
    }
    Integer mant(digits, 10);
    long scale = exponent - frac_digits;
    Integer pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational r = scale >= 0 ? Rational(mant * pow10) : Rational(mant, pow10);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

/// Exact square root when r is the square of a rational.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
    if (r < 0) return std::nullopt;
    const Integer& n = r.get_num();
    const Integer& d = r.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
    Integer sn, sd;
    mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
    Rational out(sn, sd);
    out.canonicalize();
    return out;
}

inline Rational pow(const Rational& base, unsigned exponent) {
    Rational out = 1;
    for (unsigned i = 0; i < exponent; ++i) out *= base;
    return out;
}

/// Formats a double with 12 significant digits; used for every approximate
/// number that leaves the library as text.
inline std::string format_double(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace phasekit
