#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phasekit/desing.hpp"
#include "phasekit/equilibria.hpp"

namespace phasekit {

enum class TimeDirection { forward, backward };

enum class Termination { reached_equilibrium, left_box, time_exhausted, step_underflow };

inline const char* termination_name(Termination t) {
    switch (t) {
        case Termination::reached_equilibrium: return "reached_equilibrium";
        case Termination::left_box: return "left_box";
        case Termination::time_exhausted: return "time_exhausted";
        case Termination::step_underflow: return "step_underflow";
    }
    return "?";
}

struct IntegratorOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_time = 1e4;
    Box box{-1e6, 1e6, -1e6, 1e6};
    double capture_radius = 1e-6;
    /// known equilibria used for capture
    std::vector<Vec2> equilibria;
    /// optional per-equilibrium capture radii (same length as equilibria)
    std::vector<double> capture_radii;
    /// keep every accepted step; otherwise only the first and last sample
    bool record = true;
    std::size_t max_steps = 20'000'000;
};

/// Samples in reparametrised time tau, which runs backwards in absolute
/// value for backward integration (tau is still reported increasing).
struct Trajectory {
    std::vector<double> tau;
    std::vector<Vec2> points;
    Termination termination = Termination::time_exhausted;
    /// index into IntegratorOptions::equilibria when captured
    int equilibrium = -1;
    std::size_t steps = 0;
    /// signed angle swept around the origin (in the direction of travel)
    double swept = 0.0;

    const Vec2& end() const { return points.back(); }
};

namespace detail {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

inline Vec2 axpy(const Vec2& z, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
    Vec2 out = z;
    for (auto [c, k] : terms) {
        out[0] += h * c * (*k)[0];
        out[1] += h * c * (*k)[1];
    }
    return out;
}

inline bool in_box(const Box& b, const Vec2& z) {
    return z[0] >= b.xmin && z[0] <= b.xmax && z[1] >= b.ymin && z[1] <= b.ymax;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration with capture at known
/// equilibria. Capture needs the point within the capture radius and the
/// field pointing towards the equilibrium, so a trajectory skimming past a
/// saddle is not taken as converged.
template <class F>
Trajectory integrate(const F& field, Vec2 z0, const IntegratorOptions& opt, TimeDirection dir = TimeDirection::forward) {
    if (!(opt.rel_tol > 0) || !(opt.abs_tol > 0)) throw DomainError("integrator tolerances must be positive");
    double sgn = dir == TimeDirection::forward ? 1.0 : -1.0;
    auto f = [&](const Vec2& z) {
        Vec2 v = field(z);
        return Vec2{sgn * v[0], sgn * v[1]};
    };
    Trajectory tr;
    tr.tau.push_back(0.0);
    tr.points.push_back(z0);

    auto captured = [&](const Vec2& z, const Vec2& v) -> int {
        for (std::size_t k = 0; k < opt.equilibria.size(); ++k) {
            const Vec2& e = opt.equilibria[k];
            double r = k < opt.capture_radii.size() ? opt.capture_radii[k] : opt.capture_radius;
            double dx = e[0] - z[0], dy = e[1] - z[1];
            if (std::hypot(dx, dy) >= r) continue;
            double dot = v[0] * dx + v[1] * dy;
            if (dot > 0 || (v[0] == 0.0 && v[1] == 0.0)) return static_cast<int>(k);
        }
        return -1;
    };
    auto finish = [&](double t, const Vec2& z, Termination why) {
        if (!opt.record && t > 0) {
            tr.tau.push_back(t);
            tr.points.push_back(z);
        }
        tr.termination = why;
        return tr;
    };

    Vec2 z = z0;
    double t = 0.0;
    Vec2 k1 = f(z);
    if (int c = captured(z, k1); c >= 0) {
        tr.equilibrium = c;
        tr.termination = Termination::reached_equilibrium;
        return tr;
    }
    if (!detail::in_box(opt.box, z)) return finish(t, z, Termination::left_box);

    double speed = std::hypot(k1[0], k1[1]);
    double h = speed > 0 ? 0.01 * std::max(std::hypot(z[0], z[1]), 1e-3) / speed : opt.max_time;
    h = std::clamp(h, 1e-12, opt.max_time);

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (t >= opt.max_time) return finish(t, z, Termination::time_exhausted);
        h = std::min(h, opt.max_time - t);
        using namespace detail;
        Vec2 k2 = f(axpy(z, h, {{a21, &k1}}));
        Vec2 k3 = f(axpy(z, h, {{a31, &k1}, {a32, &k2}}));
        Vec2 k4 = f(axpy(z, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        Vec2 k5 = f(axpy(z, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        Vec2 k6 = f(axpy(z, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        Vec2 zn = axpy(z, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        Vec2 k7 = f(zn);
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = opt.abs_tol + opt.rel_tol * std::max(std::fabs(z[i]), std::fabs(zn[i]));
            err = std::max(err, std::fabs(e) / sc);
        }
        if (!std::isfinite(err)) err = 1e10;
        if (err <= 1.0) {
            t += h;
            tr.swept += std::remainder(std::atan2(zn[1], zn[0]) - std::atan2(z[1], z[0]), 2 * std::numbers::pi);
            z = zn;
            k1 = k7;
            ++tr.steps;
            if (opt.record) {
                tr.tau.push_back(t);
                tr.points.push_back(z);
            }
            if (int c = captured(z, k1); c >= 0) {
                tr.equilibrium = c;
                return finish(t, z, Termination::reached_equilibrium);
            }
            if (!in_box(opt.box, z)) return finish(t, z, Termination::left_box);
        }
        double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err > 1.0) fac = std::min(fac, 1.0);
        h *= fac;
        if (h < 1e-14 * std::max(1.0, t)) return finish(t, z, Termination::step_underflow);
    }
    return finish(t, z, Termination::time_exhausted);
}

struct OmegaLimit {
    bool resolved = false;
    Vec2 point{};
    int equilibrium = -1;
    Trajectory trajectory;
};

/// Forward limit of z0 among the equilibria listed in opts.
template <class F>
OmegaLimit omega_limit(const F& field, const Vec2& z0, const IntegratorOptions& opts) {
    OmegaLimit out;
    out.trajectory = integrate(field, z0, opts, TimeDirection::forward);
    if (out.trajectory.termination == Termination::reached_equilibrium) {
        out.resolved = true;
        out.equilibrium = out.trajectory.equilibrium;
        out.point = opts.equilibria[static_cast<std::size_t>(out.equilibrium)];
    }
    return out;
}

struct IndexResult {
    int index = 0;
    double winding = 0.0;
    double min_norm = 0.0;
};

namespace detail {

inline double wrap_angle(double d) {
    while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
    while (d <= -std::numbers::pi) d += 2 * std::numbers::pi;
    return d;
}

}  // namespace detail

/// Winding number of the field direction along a circle. Arcs where the
/// direction turns by more than pi/4 between samples are bisected. Below
/// angular resolution a component that keeps its sign at both ends tells
/// which way the direction swung (thin turning layers of degenerate points).
template <class F>
IndexResult index_on_circle_detail(const F& field, const Vec2& center, double radius, int n = 4096) {
    if (!(radius > 0) || n < 8) throw DomainError("index circle needs positive radius and at least 8 samples");
    double min_norm = INFINITY;
    auto sample = [&](double phi) {
        Vec2 v = field(Vec2{center[0] + radius * std::cos(phi), center[1] + radius * std::sin(phi)});
        min_norm = std::min(min_norm, std::hypot(v[0], v[1]));
        return v;
    };
    auto arg = [](const Vec2& v) { return std::atan2(v[1], v[0]); };
    const double step = 2 * std::numbers::pi / n;
    std::vector<Vec2> vs(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) vs[static_cast<std::size_t>(k)] = sample(step * k);
    bool unresolved = false;
    auto turn = [&](auto&& self, double p0, const Vec2& v0, double p1, const Vec2& v1, int depth) -> double {
        double d = detail::wrap_angle(arg(v1) - arg(v0));
        if (std::fabs(d) <= std::numbers::pi / 4) return d;
        double pm = 0.5 * (p0 + p1);
        if (depth < 60 && pm != p0 && pm != p1) {
            Vec2 vm = sample(pm);
            return self(self, p0, v0, pm, vm, depth + 1) + self(self, pm, vm, p1, v1, depth + 1);
        }
        double via;
        if (v0[1] > 0 && v1[1] > 0)
            via = std::numbers::pi / 2;
        else if (v0[1] < 0 && v1[1] < 0)
            via = -std::numbers::pi / 2;
        else if (v0[0] > 0 && v1[0] > 0)
            via = 0.0;
        else if (v0[0] < 0 && v1[0] < 0)
            via = std::numbers::pi;
        else {
            unresolved = true;
            return d;
        }
        return detail::wrap_angle(via - arg(v0)) + detail::wrap_angle(arg(v1) - via);
    };
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        auto i = static_cast<std::size_t>(k), j = static_cast<std::size_t>((k + 1) % n);
        total += turn(turn, step * k, vs[i], step * (k + 1), vs[j], 0);
    }
    double max_norm = 0.0;
    for (const auto& v : vs) max_norm = std::max(max_norm, std::hypot(v[0], v[1]));
    // small samples: a Newton step estimates how far the nearest zero is, so
    // an equilibrium lying on the circle up to rounding is caught even though
    // the sampled value is not exactly zero
    const double h = 1e-6 * radius;
    for (int k = 0; k < n && !unresolved; ++k) {
        const Vec2& v = vs[static_cast<std::size_t>(k)];
        double nv = std::hypot(v[0], v[1]);
        if (nv > 1e-6 * max_norm) continue;
        if (nv == 0.0) {
            unresolved = true;
            break;
        }
        Vec2 z{center[0] + radius * std::cos(step * k), center[1] + radius * std::sin(step * k)};
        Vec2 fxp = field(Vec2{z[0] + h, z[1]}), fxm = field(Vec2{z[0] - h, z[1]});
        Vec2 fyp = field(Vec2{z[0], z[1] + h}), fym = field(Vec2{z[0], z[1] - h});
        double a = (fxp[0] - fxm[0]) / (2 * h), b = (fyp[0] - fym[0]) / (2 * h);
        double c = (fxp[1] - fxm[1]) / (2 * h), d = (fyp[1] - fym[1]) / (2 * h);
        double det = a * d - b * c;
        if (det == 0.0) continue;
        double sx = (d * v[0] - b * v[1]) / det, sy = (a * v[1] - c * v[0]) / det;
        if (std::hypot(sx, sy) < 1e-8 * radius) unresolved = true;
    }
    if (unresolved || !(min_norm > 0)) throw PreconditionError("equilibrium on or near the index circle");
    double w = total / (2 * std::numbers::pi);
    IndexResult out{static_cast<int>(std::lround(w)), w, min_norm};
    if (std::fabs(w - out.index) > 0.1) throw PreconditionError("winding number is not close to an integer");
    return out;
}

template <class F>
int index_on_circle(const F& field, const Vec2& center, double radius, int n = 4096) {
    return index_on_circle_detail(field, center, radius, n).index;
}

/// (ln|x| + x) / (ln|x| - y0), the slope of the logarithmic field near x = 0.
inline double slope_limit_check(double y0, double x_eval) {
    if (x_eval == 0.0) throw PreconditionError("slope check needs x != 0");
    double l = std::log(std::fabs(x_eval));
    double den = l - y0;
    if (den == 0.0) throw SingularEvaluationError("slope undefined on the nullcline");
    return (l + x_eval) / den;
}

/// Fixed point of the logarithmic field, (W(1), -W(1)), by Newton's method
/// on ln|x| = -x.
inline Vec2 sprott_fixed_point() {
    double x = 0.5;
    for (int it = 0; it < 100; ++it) {
        double g = std::log(x) + x, dg = 1.0 / x + 1.0;
        double step = g / dg;
        x -= step;
        if (std::fabs(step) < 1e-17) break;
    }
    return {x, -x};
}

inline Classification sprott_fixed_point_kind() {
    return classify_linear(sprott_field().original_jacobian(sprott_fixed_point()));
}

/// sqrt(max{1/a^2, (2-b)/b^2}), exact when the maximum is a rational square.
inline Coord eminaga_radius(const Rational& a, const Rational& b) {
    require_positive(a, b);
    Rational m = std::max(Rational(1 / (a * a)), Rational((2 - b) / (b * b)));
    if (m < 0) throw DomainError("radius undefined");
    if (auto r = exact_sqrt(m)) return Coord::of(*r);
    double v = std::sqrt(m.get_d());
    return Coord::approx(v, 4 * std::numeric_limits<double>::epsilon() * v);
}

}  // namespace phasekit
