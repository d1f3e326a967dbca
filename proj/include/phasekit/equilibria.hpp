#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phasekit/desing.hpp"
#include "phasekit/interval.hpp"
#include "phasekit/linalg.hpp"
#include "phasekit/upoly.hpp"

namespace phasekit {

/// A coordinate that is either an exact rational or a float with a bound on
/// its distance to the true value.
struct Coord {
    double value = 0.0;
    std::optional<Rational> exact;
    double error_bound = 0.0;

    static Coord of(const Rational& r) { return {r.get_d(), r, 0.0}; }
    static Coord approx(double v, double err) { return {v, std::nullopt, err}; }
};

struct StationaryPoint {
    Coord x, y;
    Mat2d jacobian;
    std::optional<Mat2q> exact_jacobian;
    Eigenpair eigenvalues{};
    Classification kind;
    std::string label;

    Vec2 location() const { return {x.value, y.value}; }
    bool is_exact() const { return x.exact && y.exact; }
};

inline Mat2q jacobian_at(const PolyField& f, const Rational& x, const Rational& y) {
    return {f.P.diff_x().eval(x, y), f.P.diff_y().eval(x, y), f.Q.diff_x().eval(x, y), f.Q.diff_y().eval(x, y)};
}

inline Mat2d jacobian_at(const PolyField& f, const Vec2& z) {
    return {f.P.diff_x().eval(z[0], z[1]), f.P.diff_y().eval(z[0], z[1]), f.Q.diff_x().eval(z[0], z[1]),
            f.Q.diff_y().eval(z[0], z[1])};
}

/// The field in coordinates centred at (x0, y0).
inline PolyField shift_to_origin(const PolyField& f, const Rational& x0, const Rational& y0) {
    BiPoly X = BiPoly::x() + BiPoly(x0), Y = BiPoly::y() + BiPoly(y0);
    PolyField out = f;
    out.P = f.P.substitute(X, Y);
    out.Q = f.Q.substitute(X, Y);
    out.time_factor = f.time_factor.substitute(X, Y);
    return out;
}

namespace detail {

inline BiPoly truncate(const BiPoly& p, unsigned max_degree) {
    BiPoly out;
    for (const auto& [m, c] : p.terms())
        if (m.degree() <= max_degree) out.add_term(m, c);
    return out;
}

/// Nonzero vector in the kernel of a singular rational matrix.
/// Scaled so that its first nonzero entry is 1.
inline std::array<Rational, 2> kernel_vector(const Mat2q& m) {
    std::array<Rational, 2> v{Rational(1), Rational(0)};
    if (m.a != 0 || m.b != 0)
        v = {-m.b, m.a};
    else if (m.c != 0 || m.d != 0)
        v = {-m.d, m.c};
    Rational s = v[0] != 0 ? v[0] : v[1];
    return {v[0] / s, v[1] / s};
}

}  // namespace detail

/// Lowest-order term of the reduced flow on a centre manifold.
struct CenterManifoldFlow {
    int order = 0;
    Rational coefficient;
    /// the nonzero eigenvalue
    Rational lambda;
    /// centre-manifold graph w = h(u) in eigen-coordinates, through the
    /// requested order
    std::vector<Rational> graph;
};

/// Centre-manifold reduction at an exact point with exactly one zero
/// eigenvalue. The manifold w = h(u) is found by coefficient matching in
/// the invariance equation w' = h'(u) u'.
inline CenterManifoldFlow center_manifold_flow(const PolyField& f, const Rational& x0, const Rational& y0, int order = 6) {
    PolyField g = shift_to_origin(f, x0, y0);
    if (g.P.coeff(0, 0) != 0 || g.Q.coeff(0, 0) != 0) throw PreconditionError("point is not stationary");
    Mat2q J = jacobian_at(g, Rational(0), Rational(0));
    Rational lambda = J.trace();
    if (J.det() != 0 || lambda == 0) throw PreconditionError("point is not semi-hyperbolic");
    auto v0 = detail::kernel_vector(J);
    auto v1 = detail::kernel_vector({J.a - lambda, J.b, J.c, J.d - lambda});
    // (x, y) = u v0 + w v1
    Rational det = v0[0] * v1[1] - v1[0] * v0[1];
    BiPoly u = BiPoly::x(), w = BiPoly::y();
    BiPoly X = v0[0] * u + v1[0] * w, Y = v0[1] * u + v1[1] * w;
    BiPoly Pt = g.P.substitute(X, Y), Qt = g.Q.substitute(X, Y);
    // inverse of [v0 v1]
    BiPoly F = (v1[1] / det) * Pt - (v1[0] / det) * Qt;
    BiPoly G = (v0[0] / det) * Qt - (v0[1] / det) * Pt;

    auto N = static_cast<unsigned>(order);
    BiPoly h;  // polynomial in x only, standing for u
    auto on_manifold = [&](const BiPoly& p) { return detail::truncate(p.substitute(u, h), N + 1); };
    for (unsigned k = 2; k <= N; ++k) {
        BiPoly R = on_manifold(G) - detail::truncate(h.diff_x() * on_manifold(F), N + 1);
        Rational hk = -R.coeff(k, 0) / lambda;
        h.add_term({k, 0}, hk);
    }
    BiPoly flow = on_manifold(F);
    CenterManifoldFlow out;
    out.lambda = lambda;
    for (unsigned k = 0; k <= N; ++k) out.graph.push_back(h.coeff(k, 0));
    for (unsigned m = 2; m <= N; ++m) {
        Rational c = flow.coeff(m, 0);
        if (c != 0) {
            out.order = static_cast<int>(m);
            out.coefficient = c;
            return out;
        }
    }
    throw InconclusiveError("centre-manifold flow vanishes through order " + std::to_string(order), order);
}

/// Retries with doubled order (6, 12, 24, 48) while the reduced flow
/// vanishes identically.
inline CenterManifoldFlow center_manifold_flow_adaptive(const PolyField& f, const Rational& x0, const Rational& y0,
                                                        int max_order = 48) {
    for (int order = 6;; order *= 2) {
        try {
            return center_manifold_flow(f, x0, y0, std::min(order, max_order));
        } catch (const InconclusiveError&) {
            if (order >= max_order) throw;
        }
    }
}

/// Saddle / node / saddle-node decision for a semi-hyperbolic point.
inline SemiKind classify_semihyperbolic(const PolyField& f, const Rational& x0, const Rational& y0, int order = 48) {
    auto cm = center_manifold_flow_adaptive(f, x0, y0, order);
    if (cm.order % 2 == 0) return SemiKind::saddle_node;
    bool grows = cm.coefficient > 0, expands = cm.lambda > 0;
    if (grows && expands) return SemiKind::repelling_node;
    if (!grows && !expands) return SemiKind::attracting_node;
    return SemiKind::saddle;
}

/// Linear classification at an exact point, refined by the centre-manifold
/// test when exactly one eigenvalue vanishes.
inline Classification classify_at(const PolyField& f, const Rational& x0, const Rational& y0, int order = 48) {
    Classification c = classify_linear(jacobian_at(f, x0, y0));
    if (c.kind == Kind::semi_hyperbolic) c.sub = classify_semihyperbolic(f, x0, y0, order);
    return c;
}

inline StationaryPoint exact_point(const PolyField& f, const Rational& x0, const Rational& y0, std::string label = {}) {
    StationaryPoint s;
    s.x = Coord::of(x0);
    s.y = Coord::of(y0);
    s.exact_jacobian = jacobian_at(f, x0, y0);
    s.jacobian = to_double(*s.exact_jacobian);
    s.eigenvalues = eigenvalues(s.jacobian);
    s.kind = classify_at(f, x0, y0);
    s.label = std::move(label);
    return s;
}

/// Eigenvalues at s3/s4, which do not depend on the sign of the
/// x-coordinate.
inline Eigenpair s34_eigenvalues(const Rational& a, const Rational& b) {
    require_positive(a, b);
    if (!((b > 1 && a < 1) || (a > 1 && b < 1))) throw DomainError("s3/s4 exist only for b > 1 > a or a > 1 > b");
    double ad = a.get_d(), bd = b.get_d();
    std::complex<double> root = std::sqrt(std::complex<double>(Rational(b * (b + 8 * a * (a - 1))).get_d(), 0.0));
    std::complex<double> base(bd * (1 - bd), 0.0);
    double den = 2 * ad * (bd - ad);
    return {(base + (bd - 1) * root) / den, (base - (bd - 1) * root) / den};
}

/// Exact trace and determinant of the Jacobian at s3/s4.
inline std::pair<Rational, Rational> s34_trace_det(const Rational& a, const Rational& b) {
    Rational tr = b * (1 - b) / (a * (b - a));
    Rational det = -2 * (a - 1) * b * (b - 1) * (b - 1) / (a * (b - a) * (b - a));
    return {tr, det};
}

struct CdkStationary {
    /// a = b = 1: every point of x^2 + (y - 1/2)^2 = 1/4 is stationary
    bool circle = false;
    Rational circle_cx = 0, circle_cy = make_rational(1, 2), circle_r2 = make_rational(1, 4);
    std::vector<StationaryPoint> points;
};

/// Closed-form finite stationary points of the CDK field.
inline CdkStationary cdk_stationary_points(const Rational& a, const Rational& b) {
    require_positive(a, b);
    CdkStationary out;
    if (a == 1 && b == 1) {
        out.circle = true;
        return out;
    }
    PolyField f = cdk_field(a, b);
    StationaryPoint s1;
    s1.x = Coord::of(0);
    s1.y = Coord::of(0);
    s1.exact_jacobian = jacobian_at(f, Rational(0), Rational(0));
    s1.jacobian = to_double(*s1.exact_jacobian);
    s1.kind = {Kind::nilpotent};
    s1.label = "s1";
    out.points.push_back(s1);
    out.points.push_back(exact_point(f, Rational(0), Rational(1), "s2"));
    if ((b > 1 && a < 1) || (b < 1 && a > 1)) {
        Rational y2 = -(b - 1) / (a - b);
        Rational x2sq = y2 / a - y2 * y2;
        auto [tr, det] = s34_trace_det(a, b);
        Classification kind = classify_trace_det(tr, det);
        auto ev = s34_eigenvalues(a, b);
        for (int sgn : {1, -1}) {
            StationaryPoint s;
            if (auto r = exact_sqrt(x2sq)) {
                s = exact_point(f, sgn * *r, y2);
            } else {
                double xv = sgn * std::sqrt(x2sq.get_d());
                s.x = Coord::approx(xv, 4 * std::numeric_limits<double>::epsilon() * std::fabs(xv));
                s.y = Coord::of(y2);
                s.jacobian = jacobian_at(f, Vec2{xv, y2.get_d()});
            }
            s.eigenvalues = ev;
            s.kind = kind;
            s.label = sgn > 0 ? "s3" : "s4";
            out.points.push_back(s);
        }
    }
    return out;
}

struct Box {
    double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
};

struct StationarySearch {
    std::vector<StationaryPoint> points;
    /// a curve of stationary points meets the box
    bool continuum = false;
    /// the common factor of P and Q whose zero set is the curve
    BiPoly continuum_factor = BiPoly(1);
};

namespace detail {

/// Rational with denominator at most max_den within tol of v, if any.
inline std::optional<Rational> snap_rational(double v, double tol, long max_den = 1000000) {
    if (!std::isfinite(v)) return std::nullopt;
    Rational r = from_double(v);
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    Rational rem = r;
    for (int step = 0; step < 40; ++step) {
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), rem.get_num_mpz_t(), rem.get_den_mpz_t());
        Integer h2 = q * h1 + h0, k2 = q * k1 + k0;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        if (k1 > max_den) break;
        Rational c(h1, k1);
        c.canonicalize();
        if (std::fabs(c.get_d() - v) <= tol) return c;
        Rational frac = rem - Rational(q);
        if (frac == 0) break;
        rem = 1 / frac;
    }
    return std::nullopt;
}

struct NewtonSystem {
    DensePoly P, Q, Px, Py, Qx, Qy;
    explicit NewtonSystem(const BiPoly& p, const BiPoly& q)
        : P(p), Q(q), Px(p.diff_x()), Py(p.diff_y()), Qx(q.diff_x()), Qy(q.diff_y()) {}

    std::optional<Vec2> solve(Vec2 z, double step_cap) const {
        for (int it = 0; it < 200; ++it) {
            double p = P(z[0], z[1]), q = Q(z[0], z[1]);
            if (p == 0.0 && q == 0.0) return z;
            double a = Px(z[0], z[1]), b = Py(z[0], z[1]), c = Qx(z[0], z[1]), d = Qy(z[0], z[1]);
            double det = a * d - b * c;
            if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
            double dx = (d * p - b * q) / det, dy = (a * q - c * p) / det;
            double len = std::hypot(dx, dy);
            if (len > step_cap) {
                dx *= step_cap / len;
                dy *= step_cap / len;
            }
            z = {z[0] - dx, z[1] - dy};
            if (len <= 1e-15 * std::max(1.0, std::hypot(z[0], z[1]))) return z;
        }
        return z;
    }
};

}  // namespace detail

/// Isolated common zeros of P and Q in a box, by interval subdivision with
/// Newton polishing. A non-constant gcd of P and Q with real zeros in the
/// box is reported as a continuum; points on it are not listed.
inline StationarySearch find_stationary(const PolyField& f, const Box& box, double tol) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    if (!std::isfinite(box.xmin) || !std::isfinite(box.xmax) || !std::isfinite(box.ymin) || !std::isfinite(box.ymax) ||
        box.xmin > box.xmax || box.ymin > box.ymax)
        throw DomainError("search box must be finite and nonempty");
    StationarySearch out;
    if (f.is_zero()) {
        out.continuum = true;
        out.continuum_factor = BiPoly();
        return out;
    }
    BiPoly g = gcd(f.P, f.Q);
    BiPoly Pr = *divide_exact(f.P, g), Qr = *divide_exact(f.Q, g);
    DensePoly gd(g);
    if (!g.is_constant()) {
        // sign change of g on a sampling grid
        const int n = 96;
        int first = 0;
        for (int i = 0; i <= n && !out.continuum; ++i)
            for (int j = 0; j <= n; ++j) {
                double x = box.xmin + (box.xmax - box.xmin) * i / n, y = box.ymin + (box.ymax - box.ymin) * j / n;
                double v = gd(x, y);
                int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
                if (s == 0 || (first != 0 && s != first)) {
                    out.continuum = true;
                    break;
                }
                first = s;
            }
        if (out.continuum) out.continuum_factor = g;
    }

    detail::NewtonSystem ns(Pr, Qr);
    DensePoly Pd(f.P), Qd(f.Q);
    double span = std::max({box.xmax - box.xmin, box.ymax - box.ymin, 1e-300});
    const int leaf_depth = 10, max_depth = 40;
    std::vector<Vec2> roots;
    std::vector<Box> unresolved;

    std::function<void(const Box&, int)> visit = [&](const Box& c, int depth) {
        Interval X{c.xmin, c.xmax}, Y{c.ymin, c.ymax};
        if (!eval(Pr, X, Y).contains(0.0) || !eval(Qr, X, Y).contains(0.0)) return;
        double w = std::max(c.xmax - c.xmin, c.ymax - c.ymin);
        if (depth >= leaf_depth) {
            Vec2 mid{(c.xmin + c.xmax) / 2, (c.ymin + c.ymax) / 2};
            auto z = ns.solve(mid, span / 4);
            if (z) {
                double res = std::max(std::fabs(Pd((*z)[0], (*z)[1])), std::fabs(Qd((*z)[0], (*z)[1])));
                if (res < tol) {
                    bool in_box = (*z)[0] >= box.xmin - tol && (*z)[0] <= box.xmax + tol &&
                                  (*z)[1] >= box.ymin - tol && (*z)[1] <= box.ymax + tol;
                    if (in_box) roots.push_back(*z);
                    double pad = 2 * w;
                    bool inside = (*z)[0] >= c.xmin - pad && (*z)[0] <= c.xmax + pad && (*z)[1] >= c.ymin - pad &&
                                  (*z)[1] <= c.ymax + pad;
                    // a few extra levels separate nearby roots; below that the
                    // cell is attributed to the cluster Newton fell into
                    if (inside || depth >= leaf_depth + 6) return;
                }
            }
            if (depth >= max_depth) {
                unresolved.push_back(c);
                return;
            }
        }
        double xm = (c.xmin + c.xmax) / 2, ym = (c.ymin + c.ymax) / 2;
        visit({c.xmin, xm, c.ymin, ym}, depth + 1);
        visit({xm, c.xmax, c.ymin, ym}, depth + 1);
        visit({c.xmin, xm, ym, c.ymax}, depth + 1);
        visit({xm, c.xmax, ym, c.ymax}, depth + 1);
    };
    visit(box, 0);

    // unresolved leaves close to an accepted root belong to its cluster
    std::vector<Box> ambiguous;
    for (const auto& c : unresolved) {
        Vec2 mid{(c.xmin + c.xmax) / 2, (c.ymin + c.ymax) / 2};
        bool near = false;
        for (const auto& r : roots) near = near || std::hypot(r[0] - mid[0], r[1] - mid[1]) <= 1e-6 * span;
        if (!near) ambiguous.push_back(c);
    }
    if (!ambiguous.empty()) {
        std::string msg = "could not separate stationary points near";
        for (std::size_t k = 0; k < std::min<std::size_t>(ambiguous.size(), 5); ++k)
            msg += " (" + format_double((ambiguous[k].xmin + ambiguous[k].xmax) / 2) + ", " +
                   format_double((ambiguous[k].ymin + ambiguous[k].ymax) / 2) + ")";
        throw AmbiguityError(msg);
    }

    std::vector<Vec2> merged;
    for (const auto& r : roots) {
        bool dup = false;
        for (const auto& m : merged) dup = dup || std::hypot(r[0] - m[0], r[1] - m[1]) <= 10 * tol;
        if (!dup) merged.push_back(r);
    }
    std::sort(merged.begin(), merged.end());

    for (const auto& r : merged) {
        if (out.continuum && std::fabs(gd(r[0], r[1])) <= tol) continue;
        auto sx = detail::snap_rational(r[0], 1e3 * tol), sy = detail::snap_rational(r[1], 1e3 * tol);
        if (sx && sy && Pr.eval(*sx, *sy) == 0 && Qr.eval(*sx, *sy) == 0) {
            if (out.continuum && g.eval(*sx, *sy) == 0) continue;
            out.points.push_back(exact_point(f, *sx, *sy));
            continue;
        }
        StationaryPoint s;
        s.x = Coord::approx(r[0], tol);
        s.y = Coord::approx(r[1], tol);
        s.jacobian = jacobian_at(f, r);
        s.eigenvalues = eigenvalues(s.jacobian);
        s.kind = classify_linear(s.jacobian);
        out.points.push_back(s);
    }
    return out;
}

}  // namespace phasekit
