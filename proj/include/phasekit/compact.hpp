#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phasekit/dynamics.hpp"
#include "phasekit/equilibria.hpp"
#include "phasekit/upoly.hpp"

namespace phasekit {

/// Poincare charts. U1/V1 look along +x/-x, U2/V2 along +y/-y.
enum class ChartId { U1, U2, V1, V2 };

inline const char* chart_name(ChartId c) {
    switch (c) {
        case ChartId::U1: return "U1";
        case ChartId::U2: return "U2";
        case ChartId::V1: return "V1";
        case ChartId::V2: return "V2";
    }
    return "?";
}

/// Chart field in coordinates (u, v), divisor v = 0. With d the degree of f,
///   U1: u = y/x, v = 1/x,  u' = v^d (Q - u P),  v' = -v^(d+1) P
///   U2: u = x/y, v = 1/y,  u' = v^d (P - u Q),  v' = -v^(d+1) Q
/// (P, Q evaluated at the preimage), i.e. v^(d-1) times the pushforward.
/// V charts are (-1)^(d-1) times the U charts.
inline PolyField compactify_chart(const PolyField& f, ChartId c) {
    int d = f.degree();
    if (d < 0) return PolyField{};
    BiPoly u = BiPoly::x(), v = BiPoly::y();
    // v^d * p(1/v, u/v) (U1) or v^d * p(u/v, 1/v) (U2), built term by term
    bool first = c == ChartId::U1 || c == ChartId::V1;
    auto hat = [&](const BiPoly& p) {
        BiPoly out;
        for (const auto& [m, coef] : p.terms()) {
            unsigned du = first ? m.j : m.i;
            unsigned dv = static_cast<unsigned>(d) - m.degree();
            out.add_term({du, dv}, coef);
        }
        return out;
    };
    BiPoly Ph = hat(f.P), Qh = hat(f.Q);
    PolyField g;
    g.provenance = f.provenance;
    g.params = f.params;
    if (first) {
        g.P = Qh - u * Ph;
        g.Q = -1 * (v * Ph);
    } else {
        g.P = Ph - u * Qh;
        g.Q = -1 * (v * Qh);
    }
    if ((c == ChartId::V1 || c == ChartId::V2) && d % 2 == 0) {
        g.P = -1 * g.P;
        g.Q = -1 * g.Q;
    }
    return g;
}

/// The u-component restricted to the divisor v = 0.
inline UPoly infinity_polynomial(const PolyField& f, ChartId c) {
    PolyField g = compactify_chart(f, c);
    std::vector<Rational> coeffs;
    for (const auto& [m, v] : g.P.terms()) {
        if (m.j != 0) continue;
        if (coeffs.size() <= m.i) coeffs.resize(m.i + 1, Rational(0));
        coeffs[m.i] += v;
    }
    return UPoly(coeffs);
}

struct InfinitePoint {
    ChartId chart = ChartId::U1;
    Coord u;
    Classification kind;
    /// classification of the antipodal point (V chart)
    Classification antipode_kind;
    Mat2d jacobian{};
    std::optional<Mat2q> exact_jacobian;
    /// "+x", "+y" for the axis points, "(1,u)" style otherwise
    std::string direction_label;
    /// direction angle in the plane, antipode at theta + pi
    double theta = 0.0;
};

struct InfinityAnalysis {
    int degree = 0;
    std::vector<InfinitePoint> points;
    /// every point at infinity is stationary
    bool continuum = false;
    /// transverse eigenvalue along the continuum as a function of u (U1 chart)
    UPoly continuum_transverse;
    /// same for the U2 chart at u = 0, where U1 does not reach
    Rational continuum_transverse_y;
};

namespace detail {

inline StationaryPoint chart_point(const PolyField& g, const RealRoot& r) {
    if (r.exact) return exact_point(g, *r.exact, Rational(0));
    StationaryPoint s;
    s.x = Coord::approx(r.value, r.error_bound);
    s.y = Coord::of(0);
    s.jacobian = jacobian_at(g, Vec2{r.value, 0.0});
    s.eigenvalues = eigenvalues(s.jacobian);
    s.kind = classify_linear(s.jacobian);
    return s;
}

inline std::string direction_label(ChartId c, const RealRoot& r) {
    if (r.exact && *r.exact == 0) return c == ChartId::U1 ? "+x" : "+y";
    std::string u = r.exact ? to_string(*r.exact) : format_double(r.value);
    return c == ChartId::U1 ? "(1," + u + ")" : "(" + u + ",1)";
}

}  // namespace detail

/// Stationary points on the circle at infinity. Directions are taken from
/// U1 (all roots) and U2 (its root u = 0 only, the others are U1 points);
/// each point is reported once with the kind at its antipode.
inline InfinityAnalysis infinite_stationary_points(const PolyField& f) {
    InfinityAnalysis out;
    out.degree = f.degree();
    UPoly F = infinity_polynomial(f, ChartId::U1);
    UPoly G = infinity_polynomial(f, ChartId::U2);
    PolyField u1 = compactify_chart(f, ChartId::U1), v1 = compactify_chart(f, ChartId::V1);
    PolyField u2 = compactify_chart(f, ChartId::U2), v2 = compactify_chart(f, ChartId::V2);
    if (F.is_zero() && G.is_zero()) {
        out.continuum = true;
        // dv'/dv on v = 0
        std::vector<Rational> tr;
        for (const auto& [m, v] : u1.Q.terms()) {
            if (m.j != 1) continue;
            if (tr.size() <= m.i) tr.resize(m.i + 1, Rational(0));
            tr[m.i] += v;
        }
        out.continuum_transverse = UPoly(tr);
        out.continuum_transverse_y = u2.Q.coeff(0, 1);
        return out;
    }
    auto add = [&](ChartId c, const PolyField& g, const PolyField& anti, const RealRoot& r) {
        InfinitePoint p;
        p.chart = c;
        StationaryPoint s = detail::chart_point(g, r);
        p.u = s.x;
        p.kind = s.kind;
        p.jacobian = s.jacobian;
        p.exact_jacobian = s.exact_jacobian;
        p.antipode_kind = detail::chart_point(anti, r).kind;
        p.direction_label = detail::direction_label(c, r);
        p.theta = c == ChartId::U1 ? std::atan(r.value) : std::numbers::pi / 2 - std::atan(r.value);
        out.points.push_back(p);
    };
    if (!F.is_zero())
        for (const auto& r : real_roots(F)) add(ChartId::U1, u1, v1, r);
    // the y-direction itself
    if (G.is_zero() || G.eval(Rational(0)) == 0) {
        RealRoot r0;
        r0.exact = Rational(0);
        add(ChartId::U2, u2, v2, r0);
    }
    std::stable_sort(out.points.begin(), out.points.end(), [](const auto& l, const auto& r) { return l.theta < r.theta; });
    return out;
}

/// Plane point to the open unit disc, z / sqrt(1 + |z|^2).
inline Vec2 to_disc(const Vec2& z) {
    double s = std::sqrt(1.0 + z[0] * z[0] + z[1] * z[1]);
    if (!std::isfinite(s)) {
        double n = std::hypot(z[0], z[1]);
        return {z[0] / n, z[1] / n};
    }
    return {z[0] / s, z[1] / s};
}

/// Inverse of to_disc; nullopt for points on (or beyond) the boundary,
/// which stand for infinity.
inline std::optional<Vec2> from_disc(const Vec2& w) {
    double r2 = w[0] * w[0] + w[1] * w[1];
    if (r2 >= 1.0) return std::nullopt;
    double s = std::sqrt(1.0 - r2);
    return Vec2{w[0] / s, w[1] / s};
}

}  // namespace phasekit
