#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phasekit/dynamics.hpp"
#include "phasekit/equilibria.hpp"
#include "phasekit/gcd.hpp"
#include "phasekit/newton.hpp"
#include "phasekit/upoly.hpp"

namespace phasekit {

enum class Direction { pos_x, neg_x, pos_y, neg_y };

inline const char* direction_name(Direction d) {
    switch (d) {
        case Direction::pos_x: return "+x";
        case Direction::neg_x: return "-x";
        case Direction::pos_y: return "+y";
        case Direction::neg_y: return "-y";
    }
    return "?";
}

inline bool is_x_direction(Direction d) { return d == Direction::pos_x || d == Direction::neg_x; }

/// One directional quasi-homogeneous blow-up. In an x-chart the exceptional
/// coordinate is xbar (first variable) and the divisor is xbar = 0; in a
/// y-chart it is ybar (second variable).
///
/// With phi the substitution and D its Jacobian matrix,
///   D * field * cancelled_factor == time_scale * (P, Q) o phi
/// holds as a polynomial identity.
struct BlowupChart {
    Direction direction = Direction::pos_x;
    NewtonWeights weights;
    /// weighted degree of the lowest quasi-homogeneous part
    long degree = 0;
    PolyField field;
    BiPoly subst_x, subst_y;
    BiPoly cancelled_factor;
    BiPoly time_scale;
};

namespace detail {

inline std::optional<unsigned> valuation(const BiPoly& p, bool in_x) {
    if (p.is_zero()) return std::nullopt;
    return in_x ? p.x_valuation() : p.y_valuation();
}

}  // namespace detail

/// Blow-up of the origin in one direction:
///   +-x: x = +-xbar^alpha, y = xbar^beta ybar
///   +-y: x = xbar ybar^alpha, y = +-ybar^beta
/// The pulled-back field is multiplied by the weight of the blown-up
/// coordinate (so no fractions appear) and divided by the power of the
/// exceptional coordinate fixed by the weighted degree.
inline BlowupChart blowup_directional(const PolyField& f, Direction dir, NewtonWeights w) {
    if (f.P.coeff(0, 0) != 0 || f.Q.coeff(0, 0) != 0) throw PreconditionError("origin is not a stationary point");
    if (w.alpha <= 0 || w.beta <= 0) throw DomainError("weights must be positive");
    BlowupChart c;
    c.direction = dir;
    c.weights = w;
    c.field.provenance = f.provenance;
    c.field.params = f.params;
    auto al = static_cast<unsigned>(w.alpha), be = static_cast<unsigned>(w.beta);
    Rational s = (dir == Direction::neg_x || dir == Direction::neg_y) ? -1 : 1;
    bool xdir = is_x_direction(dir);
    long d = f.is_zero() ? 0 : quasi_degree(f.P, f.Q, w);
    c.degree = d;

    BiPoly F1, F2;
    if (xdir) {
        c.subst_x = BiPoly::monomial(s, al, 0);
        c.subst_y = BiPoly::monomial(1, be, 1);
        BiPoly Pp = f.P.substitute(c.subst_x, c.subst_y), Qp = f.Q.substitute(c.subst_x, c.subst_y);
        F1 = s * Pp * BiPoly::monomial(1, be, 0);
        F2 = Rational(w.alpha) * Qp * BiPoly::monomial(1, al - 1, 0) -
             Rational(w.beta) * s * Pp * BiPoly::monomial(1, be - 1, 1);
        c.time_scale = BiPoly::monomial(w.alpha, al + be - 1, 0);
    } else {
        c.subst_x = BiPoly::monomial(1, 1, al);
        c.subst_y = BiPoly::monomial(s, 0, be);
        BiPoly Pp = f.P.substitute(c.subst_x, c.subst_y), Qp = f.Q.substitute(c.subst_x, c.subst_y);
        F1 = Rational(w.beta) * Pp * BiPoly::monomial(1, 0, be - 1) -
             Rational(w.alpha) * s * Qp * BiPoly::monomial(1, 1, al - 1);
        F2 = s * Qp * BiPoly::monomial(1, 0, al);
        c.time_scale = BiPoly::monomial(w.beta, 0, al + be - 1);
    }
    long target = w.alpha - 1 + w.beta + d;
    unsigned E = target > 0 ? static_cast<unsigned>(target) : 0u;
    for (auto v : {detail::valuation(F1, xdir), detail::valuation(F2, xdir)})
        if (v) E = std::min(E, *v);
    c.cancelled_factor = xdir ? BiPoly::monomial(1, E, 0) : BiPoly::monomial(1, 0, E);
    c.field.P = xdir ? F1.divide_monomial(E, 0) : F1.divide_monomial(0, E);
    c.field.Q = xdir ? F2.divide_monomial(E, 0) : F2.divide_monomial(0, E);
    return c;
}

/// Unresolved blow-up; carries the charts computed so far.
class BlowupUnresolvedError : public UnresolvedError {
public:
    BlowupUnresolvedError(const std::string& msg, std::vector<BlowupChart> partial)
        : UnresolvedError(msg), charts(std::move(partial)) {}
    std::vector<BlowupChart> charts;
};

struct DivisorPoint {
    /// coordinate along the divisor (ybar in x-charts, xbar in y-charts)
    RealRoot t;
    StationaryPoint point;
};

struct DivisorAnalysis {
    std::vector<DivisorPoint> points;
    int complex_roots = 0;
    /// every point of the divisor is stationary
    bool continuum = false;
    UPoly divisor_polynomial;
};

/// Restriction of the tangential component to the divisor.
inline UPoly divisor_polynomial(const BlowupChart& c) {
    bool xdir = is_x_direction(c.direction);
    const BiPoly& tang = xdir ? c.field.Q : c.field.P;
    std::vector<Rational> coeffs;
    for (const auto& [m, v] : tang.terms()) {
        unsigned e = xdir ? m.i : m.j, t = xdir ? m.j : m.i;
        if (e != 0) continue;
        if (coeffs.size() <= t) coeffs.resize(t + 1, Rational(0));
        coeffs[t] += v;
    }
    return UPoly(coeffs);
}

/// Stationary points of a chart on its exceptional divisor.
inline DivisorAnalysis divisor_stationary_points(const BlowupChart& c) {
    DivisorAnalysis out;
    out.divisor_polynomial = divisor_polynomial(c);
    bool xdir = is_x_direction(c.direction);
    if (out.divisor_polynomial.is_zero()) {
        out.continuum = true;
        DivisorPoint dp;
        dp.point.kind = {Kind::degenerate_curve};
        dp.point.label = "divisor";
        out.points.push_back(dp);
        return out;
    }
    out.complex_roots = complex_root_count(out.divisor_polynomial);
    for (const auto& r : real_roots(out.divisor_polynomial)) {
        DivisorPoint dp;
        dp.t = r;
        if (r.exact) {
            Rational x0 = xdir ? Rational(0) : *r.exact, y0 = xdir ? *r.exact : Rational(0);
            dp.point = exact_point(c.field, x0, y0);
        } else {
            Vec2 z = xdir ? Vec2{0.0, r.value} : Vec2{r.value, 0.0};
            dp.point.x = xdir ? Coord::of(0) : Coord::approx(r.value, r.error_bound);
            dp.point.y = xdir ? Coord::approx(r.value, r.error_bound) : Coord::of(0);
            dp.point.jacobian = jacobian_at(c.field, z);
            dp.point.eigenvalues = eigenvalues(dp.point.jacobian);
            dp.point.kind = classify_linear(dp.point.jacobian);
        }
        out.points.push_back(dp);
    }
    return out;
}

enum class SectorType { elliptic, hyperbolic, parabolic_in, parabolic_out };

inline const char* sector_name(SectorType s) {
    switch (s) {
        case SectorType::elliptic: return "elliptic";
        case SectorType::hyperbolic: return "hyperbolic";
        case SectorType::parabolic_in: return "parabolic_in";
        case SectorType::parabolic_out: return "parabolic_out";
    }
    return "?";
}

inline bool is_parabolic(SectorType s) { return s == SectorType::parabolic_in || s == SectorType::parabolic_out; }

/// A sector between two characteristic directions. Directions are quasi
/// angles in [-pi/2, 3pi/2): theta = atan(ybar) in the +x chart,
/// pi - atan(ybar) in the -x chart, pi/2 and -pi/2 for the y-charts.
struct Sector {
    SectorType type = SectorType::hyperbolic;
    double from = 0.0;
    double to = 0.0;
};

/// A singular direction: a stationary point on the divisor circle.
struct CharacteristicDirection {
    double theta = 0.0;
    Direction chart = Direction::pos_x;
    DivisorPoint point;
    /// local structure on the physical side, below and above theta
    SectorType low = SectorType::hyperbolic;
    SectorType high = SectorType::hyperbolic;
    /// sectors born inside a nilpotent divisor point (after recursion)
    std::vector<SectorType> inner;
    /// nilpotent divisor point the flow passes by; not a sector boundary
    bool transparent = false;
};

struct SectorDecomposition {
    NewtonWeights weights;
    long degree = 0;
    std::vector<BlowupChart> charts;
    std::vector<DivisorAnalysis> divisors;
    std::vector<CharacteristicDirection> directions;
    /// sectors before parabolic regions were absorbed into elliptic ones
    std::vector<Sector> raw_sectors;
    std::vector<Sector> sectors;
    bool homoclinic = false;
    int index = 0;
    /// the whole divisor is stationary (all orbits reach the point radially)
    bool dicritical = false;

    int count(SectorType t) const {
        return static_cast<int>(std::count_if(sectors.begin(), sectors.end(), [&](const Sector& s) { return s.type == t; }));
    }
    int elliptic() const { return count(SectorType::elliptic); }
    int hyperbolic() const { return count(SectorType::hyperbolic); }
    int parabolic() const { return count(SectorType::parabolic_in) + count(SectorType::parabolic_out); }
};

namespace detail {

/// Sign of the lowest-order term of p at t0 from above (side = +1) or
/// below (side = -1).
inline int side_sign(const UPoly& p, const Rational& t0, double t0d, bool exact, int side) {
    if (exact) {
        UPoly q = p;
        for (int k = 0; k <= p.degree(); ++k) {
            Rational v = q.eval(t0);
            if (v != 0) {
                int s = sgn(v);
                return (k % 2 == 1 && side < 0) ? -s : s;
            }
            q = q.derivative();
        }
        return 0;
    }
    // irrational roots are simple (squarefree part) unless repeated; probe
    double eps = 1e-7 * std::max(1.0, std::fabs(t0d));
    double v = p.eval(t0d + side * eps);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

inline double wrap_theta(double th) {
    const double two_pi = 2 * std::numbers::pi;
    while (th < -std::numbers::pi / 2) th += two_pi;
    while (th >= 1.5 * std::numbers::pi) th -= two_pi;
    return th;
}

inline double chart_theta(Direction d, double t) {
    switch (d) {
        case Direction::pos_x: return std::atan(t);
        case Direction::neg_x: return wrap_theta(std::numbers::pi - std::atan(t));
        case Direction::pos_y: return std::numbers::pi / 2;
        case Direction::neg_y: return -std::numbers::pi / 2;
    }
    return 0.0;
}

/// True when increasing the divisor coordinate decreases theta.
inline bool chart_reversed(Direction d) { return d == Direction::neg_x || d == Direction::pos_y; }

}  // namespace detail

SectorDecomposition classify_nilpotent_origin(const PolyField& f, int depth = 0);

namespace detail {

/// Centre-manifold test at an exact semi-hyperbolic divisor point: does the
/// reduced flow on the physical side (e > 0) move towards the point?
inline bool cm_moves_inward(const BlowupChart& c, const Rational& t0, const Mat2q& J) {
    bool xdir = is_x_direction(c.direction);
    Rational x0 = xdir ? Rational(0) : t0, y0 = xdir ? t0 : Rational(0);
    auto cm = center_manifold_flow_adaptive(c.field, x0, y0);
    // the exceptional component of the kernel vector fixes which sign of u
    // lies on the physical side; inward iff g_m sigma^(m+1) < 0
    auto v0 = kernel_vector(J);
    int sigma = (xdir ? v0[0] : v0[1]) > 0 ? 1 : -1;
    int s = sgn(cm.coefficient) * ((cm.order + 1) % 2 == 0 ? 1 : sigma);
    return s < 0;
}

/// Same test at an irrational point. The reduced flow has the sign of the
/// transverse component along the curve where the tangential component
/// vanishes; that curve is followed by Newton's method for a few small e.
inline bool curve_moves_inward(const BlowupChart& c, double t0) {
    bool xdir = is_x_direction(c.direction);
    const BiPoly& Ft = xdir ? c.field.Q : c.field.P;
    BiPoly G = xdir ? c.field.P.divide_monomial(1, 0) : c.field.Q.divide_monomial(0, 1);
    BiPoly dFt = xdir ? Ft.diff_y() : Ft.diff_x();
    auto at = [&](const BiPoly& p, double t, double e) { return xdir ? p.eval(e, t) : p.eval(t, e); };
    double scale = 0.0;
    for (const auto& [m, v] : G.terms()) scale += std::fabs(v.get_d());
    int sign_seen = 0, votes = 0;
    for (double e : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
        double t = t0;
        for (int it = 0; it < 50; ++it) {
            double step = at(Ft, t, e) / at(dFt, t, e);
            t -= step;
            if (std::fabs(step) < 1e-17 * std::max(1.0, std::fabs(t))) break;
        }
        double g = at(G, t, e);
        if (std::fabs(g) < 1e-12 * scale) continue;
        int sg = g > 0 ? 1 : -1;
        if (sign_seen != 0 && sg != sign_seen) throw UnresolvedError("reduced flow sign not settled near an irrational divisor point");
        sign_seen = sg;
        ++votes;
    }
    if (votes < 2) throw UnresolvedError("reduced flow too flat near an irrational divisor point");
    return sign_seen < 0;
}

/// Local sector structure on the physical side of one divisor point.
inline void resolve_divisor_point(const BlowupChart& c, CharacteristicDirection& cd, const UPoly& h, int depth) {
    bool xdir = is_x_direction(c.direction);
    const DivisorPoint& dp = cd.point;
    bool exact = dp.t.exact.has_value();
    Rational t0 = exact ? *dp.t.exact : Rational(0);
    double t0d = dp.t.value;
    // transverse eigenvalue and tangential derivative
    Rational lam_q = 0, mu_q = 0;
    double lam, mu;
    if (exact) {
        Mat2q J = *dp.point.exact_jacobian;
        lam_q = xdir ? J.a : J.d;
        mu_q = xdir ? J.d : J.a;
        lam = lam_q.get_d();
        mu = mu_q.get_d();
    } else {
        lam = xdir ? dp.point.jacobian.a : dp.point.jacobian.d;
        mu = xdir ? dp.point.jacobian.d : dp.point.jacobian.a;
    }
    bool lam_zero = exact ? lam_q == 0 : std::fabs(lam) < 1e-12;
    bool mu_zero = exact ? mu_q == 0 : std::fabs(mu) < 1e-12;
    SectorType lo, hi;
    if (!lam_zero) {
        int above = side_sign(h, t0, t0d, exact, +1), below = side_sign(h, t0, t0d, exact, -1);
        bool approach_hi = above < 0, approach_lo = below > 0;
        auto region = [&](bool approaching) {
            if (approaching) return lam < 0 ? SectorType::parabolic_in : SectorType::hyperbolic;
            return lam > 0 ? SectorType::parabolic_out : SectorType::hyperbolic;
        };
        lo = region(approach_lo);
        hi = region(approach_hi);
    } else if (!mu_zero) {
        bool inward = exact ? cm_moves_inward(c, t0, *dp.point.exact_jacobian) : curve_moves_inward(c, t0d);
        if (inward && mu < 0)
            lo = hi = SectorType::parabolic_in;
        else if (!inward && mu > 0)
            lo = hi = SectorType::parabolic_out;
        else
            lo = hi = SectorType::hyperbolic;
    } else {
        if (!exact) throw UnresolvedError("nilpotent divisor point at an irrational position");
        if (depth + 1 >= 3) throw UnresolvedError("blow-up recursion depth cap reached");
        // local coordinates X = t - t0 (along the divisor), Y = e (transverse)
        BiPoly X = BiPoly::x(), Y = BiPoly::y();
        BiPoly subs_x = xdir ? Y : X + BiPoly(t0), subs_y = xdir ? X + BiPoly(t0) : Y;
        const BiPoly& Ft = xdir ? c.field.Q : c.field.P;
        const BiPoly& Fe = xdir ? c.field.P : c.field.Q;
        PolyField local = make_field(Ft.substitute(subs_x, subs_y), Fe.substitute(subs_x, subs_y));
        SectorDecomposition sub = classify_nilpotent_origin(local, depth + 1);
        // physical side is Y > 0, i.e. sub-angles in (0, pi); theta = 0 is
        // the high side of the divisor coordinate
        std::vector<Sector> upper;
        for (const auto& s : sub.raw_sectors)
            if (s.from >= -1e-12 && s.to <= std::numbers::pi + 1e-12) upper.push_back(s);
        if (upper.empty()) throw UnresolvedError("no sectors on the physical side of a nilpotent divisor point");
        std::sort(upper.begin(), upper.end(), [](const Sector& l, const Sector& r) { return l.from < r.from; });
        // an elliptic sub-sector touching the divisor: nearby orbits start or
        // end at the point depending on which way the divisor flows
        auto side_of = [&](SectorType t, int side) {
            if (t != SectorType::elliptic) return t;
            int hs = side_sign(h, t0, t0d, exact, side);
            return hs * side < 0 ? SectorType::parabolic_in : SectorType::parabolic_out;
        };
        hi = side_of(upper.front().type, +1);
        lo = side_of(upper.back().type, -1);
        // a lone hyperbolic sector means orbits slide past along the divisor
        cd.transparent = upper.size() == 1 && upper.front().type == SectorType::hyperbolic;
        // interior sub-sectors, plus elliptic ones touching the divisor
        for (std::size_t k = upper.size(); k-- > 0;) {
            bool edge = k == 0 || k + 1 == upper.size();
            if (!edge || upper[k].type == SectorType::elliptic) cd.inner.push_back(upper[k].type);
        }
    }
    if (chart_reversed(c.direction)) {
        std::swap(lo, hi);
        std::reverse(cd.inner.begin(), cd.inner.end());
    }
    cd.low = lo;
    cd.high = hi;
}

/// Direction of the divisor flow (sign of dtheta) at an angle that is not
/// a characteristic direction.
inline int arc_flow(const std::vector<BlowupChart>& charts, const std::vector<UPoly>& h, double theta) {
    const double half = std::numbers::pi / 2;
    theta = wrap_theta(theta);
    auto sgnd = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
    if (std::fabs(theta - half) < 1e-9) return -sgnd(h[2].eval(0.0));
    if (std::fabs(theta + half) < 1e-9) return sgnd(h[3].eval(0.0));
    if (theta < half) return sgnd(h[0].eval(std::tan(theta)));
    return -sgnd(h[1].eval(-std::tan(theta)));
}

}  // namespace detail

/// Sector structure of a nilpotent (or zero-linear-part) origin from its
/// quasi-homogeneous blow-up.
inline SectorDecomposition classify_nilpotent_origin(const PolyField& f, int depth) {
    if (f.P.coeff(0, 0) != 0 || f.Q.coeff(0, 0) != 0) throw PreconditionError("origin is not a stationary point");
    Mat2q J = jacobian_at(f, 0, 0);
    if (J.trace() != 0 || J.det() != 0) throw PreconditionError("origin is not nilpotent");
    if (f.is_zero()) throw PreconditionError("field vanishes identically");
    if (f.P.is_zero() || f.Q.is_zero() || gcd(f.P, f.Q).coeff(0, 0) == 0)
        throw PreconditionError("origin is not an isolated stationary point");

    SectorDecomposition out;
    auto diag = newton_diagnostics(f.P, f.Q);
    out.weights = diag.chosen;
    out.degree = diag.degree;
    std::vector<UPoly> h;
    for (Direction d : {Direction::pos_x, Direction::neg_x, Direction::pos_y, Direction::neg_y}) {
        out.charts.push_back(blowup_directional(f, d, out.weights));
        out.divisors.push_back(divisor_stationary_points(out.charts.back()));
        h.push_back(out.divisors.back().divisor_polynomial);
    }

    const double pi = std::numbers::pi;
    if (out.divisors[0].continuum || out.divisors[1].continuum) {
        // dicritical: the transverse component on the divisor decides
        out.dicritical = true;
        int sign_all = 0;
        for (int k = 0; k < 4; ++k) {
            const auto& c = out.charts[static_cast<std::size_t>(k)];
            bool xdir = is_x_direction(c.direction);
            // transverse rate F_e / e on the divisor
            const BiPoly& Fe = xdir ? c.field.P : c.field.Q;
            BiPoly rate = xdir ? Fe.divide_monomial(1, 0) : Fe.divide_monomial(0, 1);
            for (int s = -8; s <= 8; ++s) {
                double t = s / 2.0;
                double v = xdir ? rate.eval(0.0, t) : rate.eval(t, 0.0);
                int sg = v > 0 ? 1 : (v < 0 ? -1 : 0);
                if (sg == 0 || (sign_all != 0 && sg != sign_all))
                    throw BlowupUnresolvedError("dicritical divisor with changing transverse behaviour", out.charts);
                sign_all = sg;
            }
        }
        SectorType t = sign_all < 0 ? SectorType::parabolic_in : SectorType::parabolic_out;
        out.raw_sectors = out.sectors = {Sector{t, -pi / 2, 1.5 * pi}};
        out.index = 1;
        return out;
    }

    for (std::size_t k = 0; k < 4; ++k) {
        const auto& c = out.charts[k];
        for (const auto& dp : out.divisors[k].points) {
            if (!is_x_direction(c.direction)) {
                // off-origin points of the y-charts are seen by the x-charts
                if (!dp.t.exact || *dp.t.exact != 0) continue;
            }
            CharacteristicDirection cd;
            cd.theta = detail::chart_theta(c.direction, dp.t.value);
            cd.chart = c.direction;
            cd.point = dp;
            try {
                detail::resolve_divisor_point(c, cd, h[k], depth);
            } catch (const BlowupUnresolvedError&) {
                throw;
            } catch (const UnresolvedError& e) {
                throw BlowupUnresolvedError(e.what(), out.charts);
            }
            out.directions.push_back(cd);
        }
    }
    if (out.directions.empty()) throw BlowupUnresolvedError("no characteristic directions (monodromic point)", out.charts);
    std::stable_sort(out.directions.begin(), out.directions.end(),
                     [](const auto& l, const auto& r) { return l.theta < r.theta; });

    // gaps between consecutive characteristic directions
    std::vector<const CharacteristicDirection*> bounds;
    for (const auto& cd : out.directions)
        if (!cd.transparent) bounds.push_back(&cd);
    if (bounds.empty()) throw BlowupUnresolvedError("no characteristic directions (monodromic point)", out.charts);
    std::size_t n = bounds.size();
    std::vector<Sector> raw;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = *bounds[i];
        const auto& q = *bounds[(i + 1) % n];
        for (SectorType t : p.inner) raw.push_back({t, p.theta, p.theta});
        double from = p.theta, to = q.theta;
        if (i + 1 == n) to += 2 * pi;
        // sample next to p, short of any transparent point; +-pi/2 is
        // preferred when available since the x-charts blow up there
        double next = to;
        for (const auto& cd : out.directions)
            for (double th : {cd.theta, cd.theta + 2 * pi})
                if (th > from + 1e-12 && th < next) next = th;
        double mid = 0.5 * (from + next);
        for (double cand : {pi / 2, -pi / 2, 1.5 * pi, 2.5 * pi})
            if (cand > from + 1e-9 && cand < next - 1e-9) mid = cand;
        int dir = detail::arc_flow(out.charts, h, mid);
        if (dir == 0) throw BlowupUnresolvedError("divisor flow vanishes between characteristic directions", out.charts);
        SectorType up = dir > 0 ? p.high : q.low;
        SectorType down = dir > 0 ? q.low : p.high;
        bool alpha_origin = up == SectorType::parabolic_out;
        bool omega_origin = down == SectorType::parabolic_in;
        SectorType t = alpha_origin && omega_origin ? SectorType::elliptic
                       : alpha_origin               ? SectorType::parabolic_out
                       : omega_origin               ? SectorType::parabolic_in
                                                    : SectorType::hyperbolic;
        raw.push_back({t, from, to});
    }
    out.raw_sectors = raw;

    // parabolic regions bordering an elliptic one belong to it
    std::vector<Sector> s = raw;
    bool changed = true;
    while (changed && s.size() > 1) {
        changed = false;
        for (std::size_t i = 0; i < s.size() && s.size() > 1; ++i) {
            if (!is_parabolic(s[i].type)) continue;
            std::size_t prev = (i + s.size() - 1) % s.size(), next = (i + 1) % s.size();
            if (s[prev].type == SectorType::elliptic) {
                s[prev].to = s[i].to;
            } else if (s[next].type == SectorType::elliptic) {
                s[next].from = s[i].from;
            } else {
                continue;
            }
            s.erase(s.begin() + static_cast<long>(i));
            changed = true;
            break;
        }
    }
    out.sectors = s;
    int e = out.elliptic(), hcount = out.hyperbolic();
    if ((e - hcount) % 2 != 0) throw InternalInconsistencyError("sector counts violate the index parity");
    out.index = 1 + (e - hcount) / 2;
    out.homoclinic = e > 0;
    return out;
}

struct ProbeArc {
    SectorType evidence = SectorType::hyperbolic;
    double from = 0.0;
    double to = 0.0;
    int samples = 0;
};

struct SectorProbe {
    std::vector<SectorType> per_sample;
    std::vector<ProbeArc> arcs;
    /// samples whose integration ended in step underflow
    std::vector<int> gaps;

    int count(SectorType t) const {
        return static_cast<int>(std::count_if(arcs.begin(), arcs.end(), [&](const ProbeArc& a) { return a.evidence == t; }));
    }
};

/// Empirical sector map: from n points on a circle of the given radius,
/// integrate both ways and record whether the orbit enters radius/10
/// within tau = 1e4. Time is rescaled by 1/|z|^2, which keeps orbits and
/// their orientation but turns algebraically slow approaches to the origin
/// (an invariant line with x' ~ -x^3, say) into exponential ones. Both ways gives elliptic evidence, neither gives
/// hyperbolic, one way gives parabolic. Neighbouring hyperbolic samples
/// whose orbits leave in clearly different directions, or elliptic samples
/// whose loops turn opposite ways, lie in different sectors.
template <class F>
SectorProbe sector_probe(const F& field, double radius, int n, const std::vector<Vec2>& other_equilibria = {}) {
    if (!(radius > 0) || n < 4) throw DomainError("probe needs a positive radius and at least 4 samples");
    IntegratorOptions opt;
    opt.max_time = 1e4;
    opt.record = false;
    opt.rel_tol = 1e-8;
    opt.abs_tol = 1e-12;
    opt.box = {-1e3, 1e3, -1e3, 1e3};
    opt.max_steps = 200000;
    opt.equilibria.push_back({0.0, 0.0});
    opt.capture_radii.push_back(radius / 10);
    for (const auto& e : other_equilibria) {
        opt.equilibria.push_back(e);
        opt.capture_radii.push_back(1e-6);
    }
    struct Sample {
        SectorType type;
        double phi, fw_exit, bw_exit, swept;
    };
    std::vector<Sample> samples;
    SectorProbe out;
    auto slowed = [&field](const Vec2& z) {
        Vec2 v = field(z);
        double r2 = z[0] * z[0] + z[1] * z[1];
        return r2 > 0 ? Vec2{v[0] / r2, v[1] / r2} : v;
    };
    for (int k = 0; k < n; ++k) {
        double phi = -std::numbers::pi / 2 + 2 * std::numbers::pi * (k + 0.5) / n;
        Vec2 z{radius * std::cos(phi), radius * std::sin(phi)};
        auto fw = integrate(slowed, z, opt, TimeDirection::forward);
        auto bw = integrate(slowed, z, opt, TimeDirection::backward);
        if (fw.termination == Termination::step_underflow || bw.termination == Termination::step_underflow)
            out.gaps.push_back(k);
        bool f_ret = fw.termination == Termination::reached_equilibrium && fw.equilibrium == 0;
        bool b_ret = bw.termination == Termination::reached_equilibrium && bw.equilibrium == 0;
        SectorType t = f_ret && b_ret ? SectorType::elliptic
                       : f_ret        ? SectorType::parabolic_in
                       : b_ret        ? SectorType::parabolic_out
                                      : SectorType::hyperbolic;
        out.per_sample.push_back(t);
        samples.push_back({t, phi, std::atan2(fw.end()[1], fw.end()[0]), std::atan2(bw.end()[1], bw.end()[0]),
                           fw.swept - bw.swept});
    }
    auto same_arc = [](const Sample& l, const Sample& r) {
        if (l.type != r.type) return false;
        // homoclinic loops on either side of a separating orbit turn opposite ways
        if (l.type == SectorType::elliptic) return (l.swept > 0) == (r.swept > 0);
        if (l.type != SectorType::hyperbolic) return true;
        auto apart = [](double u, double v) { return std::fabs(std::remainder(u - v, 2 * std::numbers::pi)) > std::numbers::pi / 2; };
        return !apart(l.fw_exit, r.fw_exit) && !apart(l.bw_exit, r.bw_exit);
    };
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (k > 0 && same_arc(samples[k - 1], samples[k])) {
            out.arcs.back().to = samples[k].phi;
            ++out.arcs.back().samples;
        } else {
            out.arcs.push_back({samples[k].type, samples[k].phi, samples[k].phi, 1});
        }
    }
    // the circle closes: merge the last arc into the first
    if (out.arcs.size() > 1 && same_arc(samples.back(), samples.front())) {
        out.arcs.front().from = out.arcs.back().from;
        out.arcs.front().samples += out.arcs.back().samples;
        out.arcs.pop_back();
    }
    return out;
}

}  // namespace phasekit
