#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "phasekit/bipoly.hpp"
#include "phasekit/gcd.hpp"
#include "phasekit/linalg.hpp"

namespace phasekit {

using Vec2 = std::array<double, 2>;

namespace detail {

/// Reduces n/d by their gcd and makes d monic.
inline std::pair<BiPoly, BiPoly> reduce_fraction(const BiPoly& n, const BiPoly& d) {
    if (d.is_zero()) throw ZeroDenominatorError("denominator is the zero polynomial");
    if (n.is_zero()) return {BiPoly(), BiPoly(1)};
    BiPoly g = gcd(n, d);
    auto nn = divide_exact(n, g);
    auto dd = divide_exact(d, g);
    if (!nn || !dd) throw InternalInconsistencyError("gcd does not divide its arguments");
    Rational s = 1 / dd->leading_coeff();
    return {s * *nn, s * *dd};
}

}  // namespace detail

/// x' = p/q, y' = r/s with each fraction reduced and q, s monic.
class RationalField {
public:
    RationalField(const BiPoly& p, const BiPoly& q, const BiPoly& r, const BiPoly& s) {
        std::tie(p_, q_) = detail::reduce_fraction(p, q);
        std::tie(r_, s_) = detail::reduce_fraction(r, s);
    }

    const BiPoly& p() const { return p_; }
    const BiPoly& q() const { return q_; }
    const BiPoly& r() const { return r_; }
    const BiPoly& s() const { return s_; }

    /// Exact value at a point; throws off the domain.
    std::array<Rational, 2> eval(const Rational& x, const Rational& y) const {
        Rational qv = q_.eval(x, y), sv = s_.eval(x, y);
        if (qv == 0 || sv == 0) throw UndefinedPointError("rational field undefined at point");
        return {p_.eval(x, y) / qv, r_.eval(x, y) / sv};
    }

    friend bool operator==(const RationalField&, const RationalField&) = default;

private:
    BiPoly p_, q_, r_, s_;
};

enum class Provenance { cdk, sprott, general };

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::cdk: return "cdk";
        case Provenance::sprott: return "sprott";
        case Provenance::general: return "general";
    }
    return "?";
}

/// Fast double evaluator for a polynomial field.
struct NumericField {
    DensePoly P, Q;
    Vec2 operator()(const Vec2& z) const { return {P(z[0], z[1]), Q(z[0], z[1])}; }
};

/// Polynomial field x' = P, y' = Q obtained from a rational one by the time
/// change dt = time_factor * dtau.
struct PolyField {
    BiPoly P, Q;
    BiPoly time_factor = BiPoly(1);
    Provenance provenance = Provenance::general;
    /// (a, b) when provenance is cdk.
    std::optional<std::pair<Rational, Rational>> params;

    int degree() const { return std::max(P.total_degree(), Q.total_degree()); }
    bool is_zero() const { return P.is_zero() && Q.is_zero(); }
    NumericField numeric() const { return {DensePoly(P), DensePoly(Q)}; }
    Vec2 operator()(const Vec2& z) const { return {P.eval(z[0], z[1]), Q.eval(z[0], z[1])}; }
};

inline PolyField make_field(BiPoly P, BiPoly Q) { return PolyField{std::move(P), std::move(Q)}; }

inline void require_positive(const Rational& a, const Rational& b) {
    if (a <= 0 || b <= 0) throw DomainError("parameters a and b must be positive");
}

/// x' = xy/(x^2+y^2) - a x, y' = y^2/(x^2+y^2) - b y + b - 1.
inline RationalField cdk_rational_field(const Rational& a, const Rational& b) {
    require_positive(a, b);
    BiPoly x = BiPoly::x(), y = BiPoly::y();
    BiPoly rho = x * x + y * y;
    BiPoly p = x * y - a * (x * rho);
    BiPoly r = y * y - (b * y - (b - 1) * BiPoly(1)) * rho;
    return RationalField(p, rho, r, rho);
}

/// Multiplies through by the lcm of the denominators and removes any common
/// factor left between the time factor and the new components.
inline PolyField desingularize(const RationalField& f) {
    BiPoly l = lcm(f.q(), f.s()).monic();
    auto qbar = divide_exact(l, f.q());
    auto sbar = divide_exact(l, f.s());
    if (!qbar || !sbar) throw InternalInconsistencyError("lcm is not a multiple of a denominator");
    PolyField out;
    out.P = *qbar * f.p();
    out.Q = *sbar * f.r();
    out.time_factor = l;
    BiPoly g = out.P.is_zero() && out.Q.is_zero() ? l.primitive() : gcd(l, gcd(out.P, out.Q));
    if (!g.is_constant()) {
        out.P = *divide_exact(out.P, g);
        out.Q = *divide_exact(out.Q, g);
        out.time_factor = *divide_exact(out.time_factor, g);
    }
    return out;
}

inline PolyField cdk_field(const Rational& a, const Rational& b) {
    PolyField f = desingularize(cdk_rational_field(a, b));
    f.provenance = Provenance::cdk;
    f.params = std::pair(a, b);
    return f;
}

/// The logarithmic system x' = (ln x^2)/2 - y, y' = (ln x^2)/2 + x and the
/// same field multiplied by x^2, which extends continuously to x = 0.
struct SprottField {
    /// Multiplied field, defined everywhere.
    Vec2 operator()(const Vec2& z) const {
        double x = z[0];
        if (x == 0.0) return {0.0, 0.0};
        double x2 = x * x;
        double l = 0.5 * std::log(x2);
        return {x2 * (l - z[1]), x2 * (l + x)};
    }

    Vec2 original(const Vec2& z) const {
        if (z[0] == 0.0) throw UndefinedPointError("logarithmic field undefined on x = 0");
        double l = 0.5 * std::log(z[0] * z[0]);
        return {l - z[1], l + z[0]};
    }

    /// Jacobian of the original field at z (x != 0).
    Mat2d original_jacobian(const Vec2& z) const {
        if (z[0] == 0.0) throw UndefinedPointError("logarithmic field undefined on x = 0");
        return {1.0 / z[0], -1.0, 1.0 / z[0] + 1.0, 0.0};
    }
};

inline SprottField sprott_field() { return {}; }

}  // namespace phasekit
