#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phasekit/errors.hpp"
#include "phasekit/rational.hpp"

namespace phasekit {

/// Exponent pair of x^i y^j.
struct Monomial {
    unsigned i = 0;
    unsigned j = 0;

    unsigned degree() const { return i + j; }
    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic order with x > y, largest first.
struct GradedLexDesc {
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.degree() != b.degree()) return a.degree() > b.degree();
        return a.i > b.i;
    }
};

/// Bivariate polynomial in x, y with exact rational coefficients.
/// Zero coefficients are never stored, so equality is structural.
class BiPoly {
public:
    using TermMap = std::map<Monomial, Rational, GradedLexDesc>;

    BiPoly() = default;
    BiPoly(const Rational& c) { add_term({0, 0}, c); }  // NOLINT: implicit on purpose
    BiPoly(long c) : BiPoly(Rational(c)) {}              // NOLINT

    static BiPoly x() { return monomial(1, 1, 0); }
    static BiPoly y() { return monomial(1, 0, 1); }
    static BiPoly monomial(const Rational& c, unsigned i, unsigned j) {
        BiPoly p;
        p.add_term({i, j}, c);
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }

    /// -1 for the zero polynomial.
    int total_degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.begin()->first.degree()); }
    int degree_x() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.i));
        return d;
    }
    int degree_y() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.j));
        return d;
    }
    /// Lowest total degree present; -1 for zero.
    int order() const {
        int d = -1;
        for (const auto& [m, c] : terms_)
            if (d < 0 || static_cast<int>(m.degree()) < d) d = static_cast<int>(m.degree());
        return d;
    }

    Rational coeff(unsigned i, unsigned j) const {
        auto it = terms_.find({i, j});
        return it == terms_.end() ? Rational(0) : it->second;
    }
    std::pair<Monomial, Rational> leading_term() const {
        if (terms_.empty()) throw DomainError("leading term of zero polynomial");
        return *terms_.begin();
    }
    Rational leading_coeff() const { return terms_.empty() ? Rational(0) : terms_.begin()->second; }

    void add_term(Monomial m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    BiPoly& operator+=(const BiPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    BiPoly& operator-=(const BiPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    BiPoly& operator*=(const BiPoly& o) {
        *this = *this * o;
        return *this;
    }
    friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
    friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
    friend BiPoly operator-(const BiPoly& a) {
        BiPoly out;
        for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, -c);
        return out;
    }
    friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
        BiPoly out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) out.add_term({ma.i + mb.i, ma.j + mb.j}, ca * cb);
        return out;
    }
    friend BiPoly operator*(const Rational& s, const BiPoly& p) {
        BiPoly out;
        if (s == 0) return out;
        for (const auto& [m, c] : p.terms_) out.terms_.emplace(m, s * c);
        return out;
    }
    friend BiPoly operator*(long s, const BiPoly& p) { return Rational(s) * p; }
    friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.terms_ == b.terms_; }

    BiPoly pow(long exponent) const {
        if (exponent < 0) throw DomainError("negative exponent in polynomial power");
        BiPoly result(1), base = *this;
        auto e = static_cast<unsigned long>(exponent);
        while (e) {
            if (e & 1u) result *= base;
            e >>= 1u;
            if (e) base = base * base;
        }
        return result;
    }

    BiPoly diff_x() const {
        BiPoly out;
        for (const auto& [m, c] : terms_)
            if (m.i > 0) out.add_term({m.i - 1, m.j}, c * m.i);
        return out;
    }
    BiPoly diff_y() const {
        BiPoly out;
        for (const auto& [m, c] : terms_)
            if (m.j > 0) out.add_term({m.i, m.j - 1}, c * m.j);
        return out;
    }

    Rational eval(const Rational& x, const Rational& y) const {
        int dx = degree_x(), dy = degree_y();
        if (dx < 0) return 0;
        std::vector<Rational> xp{Rational(1)}, yp{Rational(1)};
        for (int k = 1; k <= dx; ++k) xp.push_back(xp.back() * x);
        for (int k = 1; k <= dy; ++k) yp.push_back(yp.back() * y);
        Rational acc = 0;
        for (const auto& [m, c] : terms_) acc += c * xp[m.i] * yp[m.j];
        return acc;
    }

    double eval(double x, double y) const {
        int dy = degree_y();
        if (dy < 0) return 0.0;
        int dx = degree_x();
        std::vector<double> dense(static_cast<std::size_t>((dx + 1) * (dy + 1)), 0.0);
        for (const auto& [m, c] : terms_) dense[m.j * static_cast<unsigned>(dx + 1) + m.i] = c.get_d();
        double acc = 0.0;
        for (int j = dy; j >= 0; --j) {
            double row = 0.0;
            for (int i = dx; i >= 0; --i) row = row * x + dense[static_cast<std::size_t>(j * (dx + 1) + i)];
            acc = acc * y + row;
        }
        return acc;
    }

    /// p(X(x,y), Y(x,y)).
    BiPoly substitute(const BiPoly& X, const BiPoly& Y) const {
        int dx = degree_x(), dy = degree_y();
        if (dx < 0) return {};
        std::vector<BiPoly> xp{BiPoly(1)}, yp{BiPoly(1)};
        for (int k = 1; k <= dx; ++k) xp.push_back(xp.back() * X);
        for (int k = 1; k <= dy; ++k) yp.push_back(yp.back() * Y);
        BiPoly out;
        for (const auto& [m, c] : terms_) out += c * (xp[m.i] * yp[m.j]);
        return out;
    }

    BiPoly homogeneous_part(unsigned d) const {
        BiPoly out;
        for (const auto& [m, c] : terms_)
            if (m.degree() == d) out.terms_.emplace(m, c);
        return out;
    }

    /// Divides every term by x^i y^j; throws if some term is not divisible.
    BiPoly divide_monomial(unsigned i, unsigned j) const {
        BiPoly out;
        for (const auto& [m, c] : terms_) {
            if (m.i < i || m.j < j) throw DomainError("monomial division is not exact");
            out.terms_.emplace(Monomial{m.i - i, m.j - j}, c);
        }
        return out;
    }

    /// Largest i such that x^i divides every term (0 for the zero polynomial).
    unsigned x_valuation() const {
        if (terms_.empty()) return 0;
        unsigned v = ~0u;
        for (const auto& [m, c] : terms_) v = std::min(v, m.i);
        return v;
    }
    unsigned y_valuation() const {
        if (terms_.empty()) return 0;
        unsigned v = ~0u;
        for (const auto& [m, c] : terms_) v = std::min(v, m.j);
        return v;
    }

    /// Scales to integer coefficients with gcd 1 and positive leading
    /// coefficient. Zero stays zero.
    BiPoly primitive() const {
        if (terms_.empty()) return {};
        Integer den_lcm = 1, num_gcd = 0;
        for (const auto& [m, c] : terms_) {
            mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
            mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
        }
        Rational scale(den_lcm, num_gcd);
        scale.canonicalize();
        if (leading_coeff() < 0) scale = -scale;
        return scale * *this;
    }

    /// Scales so the graded-lex leading coefficient is 1.
    BiPoly monic() const {
        if (terms_.empty()) return {};
        Rational inv = 1 / leading_coeff();
        return inv * *this;
    }

    /// Canonical text, e.g. "-1/2*x^3 + x*y".
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            Rational mag = abs(c);
            bool neg = c < 0;
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            std::string mono;
            auto append = [&](const char* var, unsigned e) {
                if (e == 0) return;
                if (!mono.empty()) mono += "*";
                mono += var;
                if (e > 1) mono += "^" + std::to_string(e);
            };
            append("x", m.i);
            append("y", m.j);
            if (mono.empty())
                out += phasekit::to_string(mag);
            else if (mag == 1)
                out += mono;
            else
                out += phasekit::to_string(mag) + "*" + mono;
            first = false;
        }
        return out;
    }

private:
    TermMap terms_;
};

/// Multivariate division by the graded-lex leading term. Returns the
/// quotient when the division leaves no remainder.
inline std::optional<BiPoly> divide_exact(const BiPoly& p, const BiPoly& q) {
    if (q.is_zero()) throw DomainError("division by zero polynomial");
    BiPoly rem = p, quot;
    auto [lm, lc] = q.leading_term();
    while (!rem.is_zero()) {
        // When q | p, the leading term of every intermediate remainder is
        // divisible by lm(q).
        auto [m, c] = rem.leading_term();
        if (m.i < lm.i || m.j < lm.j) return std::nullopt;
        BiPoly t = BiPoly::monomial(c / lc, m.i - lm.i, m.j - lm.j);
        quot += t;
        rem -= t * q;
    }
    return quot;
}

/// Dense double evaluator for repeated numeric evaluation of a fixed
/// polynomial (Horner in x per row, then in y).
class DensePoly {
public:
    DensePoly() = default;
    explicit DensePoly(const BiPoly& p) : nx_(p.degree_x() + 1), ny_(p.degree_y() + 1) {
        if (nx_ <= 0) {
            nx_ = ny_ = 0;
            return;
        }
        c_.assign(static_cast<std::size_t>(nx_ * ny_), 0.0);
        for (const auto& [m, c] : p.terms()) c_[m.j * static_cast<unsigned>(nx_) + m.i] = c.get_d();
    }
    double operator()(double x, double y) const {
        double acc = 0.0;
        for (int j = ny_ - 1; j >= 0; --j) {
            double row = 0.0;
            const double* r = c_.data() + static_cast<std::size_t>(j * nx_);
            for (int i = nx_ - 1; i >= 0; --i) row = row * x + r[i];
            acc = acc * y + row;
        }
        return acc;
    }

private:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> c_;
};

}  // namespace phasekit
