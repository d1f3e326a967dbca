#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "phasekit/bipoly.hpp"

namespace phasekit {

/// Closed interval with crude outward rounding: every result is widened by
/// a few ulps, which is enough for exclusion tests on small polynomials.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval widen(double lo, double hi) {
        double pad = 4 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(lo), std::fabs(hi)) +
                     std::numeric_limits<double>::denorm_min();
        return {lo - pad, hi + pad};
    }
    bool contains(double v) const { return lo <= v && v <= hi; }
    double width() const { return hi - lo; }

    friend Interval operator+(Interval a, Interval b) { return widen(a.lo + b.lo, a.hi + b.hi); }
    friend Interval operator*(Interval a, Interval b) {
        double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
    }
    friend Interval operator*(double s, Interval a) {
        return s >= 0 ? widen(s * a.lo, s * a.hi) : widen(s * a.hi, s * a.lo);
    }

    Interval pow(unsigned e) const {
        if (e == 0) return {1.0, 1.0};
        double a = std::pow(lo, e), b = std::pow(hi, e);
        if (e % 2 == 1) return widen(a, b);
        if (lo <= 0 && hi >= 0) return widen(0.0, std::max(a, b));
        return widen(std::min(a, b), std::max(a, b));
    }
};

/// Natural interval extension of p over the box X x Y.
inline Interval eval(const BiPoly& p, Interval X, Interval Y) {
    Interval acc{0.0, 0.0};
    for (const auto& [m, c] : p.terms()) {
        double cd = c.get_d();
        // coefficient itself may be inexact in double
        Interval ci = Interval::widen(cd, cd);
        acc = acc + ci * (X.pow(m.i) * Y.pow(m.j));
    }
    return acc;
}

}  // namespace phasekit
