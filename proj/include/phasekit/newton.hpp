#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "phasekit/bipoly.hpp"

namespace phasekit {

/// Quasi-homogeneous weights (alpha, beta), coprime and positive.
struct NewtonWeights {
    int alpha = 1;
    int beta = 1;
    friend bool operator==(const NewtonWeights&, const NewtonWeights&) = default;
};

/// A lower edge of the Newton polygon of a planar field.
struct NewtonEdge {
    std::pair<long, long> from;
    std::pair<long, long> to;
    NewtonWeights weights;
    /// min <w, point> over the whole support
    long degree = 0;
};

struct NewtonDiagnostics {
    NewtonWeights chosen;
    long degree = 0;
    std::vector<std::pair<long, long>> support;
    std::vector<NewtonEdge> candidates;
};

/// Support of the field x' = P, y' = Q in the shifted convention: a term
/// x^i y^j of P contributes (i-1, j), of Q contributes (i, j-1). With this
/// shift a weight vector w makes the field quasi-homogeneous of degree
/// min <w, point>.
inline std::vector<std::pair<long, long>> field_support(const BiPoly& P, const BiPoly& Q) {
    std::set<std::pair<long, long>> pts;
    for (const auto& [m, c] : P.terms()) pts.emplace(static_cast<long>(m.i) - 1, static_cast<long>(m.j));
    for (const auto& [m, c] : Q.terms()) pts.emplace(static_cast<long>(m.i), static_cast<long>(m.j) - 1);
    return {pts.begin(), pts.end()};
}

/// Weighted degree of the lowest quasi-homogeneous component.
inline long quasi_degree(const BiPoly& P, const BiPoly& Q, NewtonWeights w) {
    auto pts = field_support(P, Q);
    if (pts.empty()) throw DomainError("quasi_degree of the zero field");
    long d = w.alpha * pts.front().first + w.beta * pts.front().second;
    for (auto [u, v] : pts) d = std::min(d, w.alpha * u + w.beta * v);
    return d;
}

namespace detail {

inline long cross(std::pair<long, long> o, std::pair<long, long> a, std::pair<long, long> b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

}  // namespace detail

/// All lower-left edges of the Newton polygon together with the chosen
/// weights (the lexicographically smallest normal). A polygon with a single
/// vertex yields weights (1, 1).
inline NewtonDiagnostics newton_diagnostics(const BiPoly& P, const BiPoly& Q) {
    NewtonDiagnostics out;
    out.support = field_support(P, Q);
    if (out.support.empty()) throw DomainError("Newton polygon of the zero field");
    // lower convex hull, points sorted by (u, v)
    std::vector<std::pair<long, long>> hull;
    for (const auto& p : out.support) {
        while (hull.size() >= 2 && detail::cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
        hull.push_back(p);
    }
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        auto a = hull[k], b = hull[k + 1];
        long du = b.first - a.first, dv = a.second - b.second;
        if (du <= 0 || dv <= 0) continue;  // only edges with negative slope
        long g = std::gcd(du, dv);
        NewtonEdge e{a, b, {static_cast<int>(dv / g), static_cast<int>(du / g)}, 0};
        e.degree = quasi_degree(P, Q, e.weights);
        out.candidates.push_back(e);
    }
    if (out.candidates.empty()) {
        out.chosen = {1, 1};
    } else {
        auto best = std::min_element(out.candidates.begin(), out.candidates.end(), [](const auto& l, const auto& r) {
            return std::pair(l.weights.alpha, l.weights.beta) < std::pair(r.weights.alpha, r.weights.beta);
        });
        out.chosen = best->weights;
    }
    out.degree = quasi_degree(P, Q, out.chosen);
    return out;
}

/// Blow-up weights for a nilpotent origin of x' = P, y' = Q.
inline NewtonWeights newton_weights(const BiPoly& P, const BiPoly& Q) {
    if (P.coeff(0, 0) != 0 || Q.coeff(0, 0) != 0) throw PreconditionError("origin is not a stationary point");
    Rational a = P.coeff(1, 0), b = P.coeff(0, 1), c = Q.coeff(1, 0), d = Q.coeff(0, 1);
    if (a + d != 0 || a * d - b * c != 0) throw PreconditionError("origin is not nilpotent");
    return newton_diagnostics(P, Q).chosen;
}

}  // namespace phasekit
