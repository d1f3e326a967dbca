#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>

#include "phasekit/rational.hpp"

namespace phasekit {

/// Row-major 2x2 matrix.
template <class T>
struct Mat2 {
    T a{}, b{}, c{}, d{};

    T trace() const { return a + d; }
    T det() const { return a * d - b * c; }
    friend bool operator==(const Mat2&, const Mat2&) = default;
    friend std::ostream& operator<<(std::ostream& os, const Mat2& m) {
        return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
    }
};

using Mat2d = Mat2<double>;
using Mat2q = Mat2<Rational>;

inline Mat2d to_double(const Mat2q& m) { return {m.a.get_d(), m.b.get_d(), m.c.get_d(), m.d.get_d()}; }

inline double norm(const Mat2d& m) { return std::sqrt(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d); }

using Eigenpair = std::array<std::complex<double>, 2>;

/// Eigenvalues from the trace/determinant quadratic. The discriminant is
/// formed as (a-d)^2 + 4bc, which avoids the cancellation in tr^2 - 4 det,
/// and the larger-magnitude root is taken first so the other follows from
/// the product without cancellation.
inline Eigenpair eigenvalues(const Mat2d& m) {
    double disc = (m.a - m.d) * (m.a - m.d) + 4.0 * m.b * m.c;
    double half_tr = 0.5 * (m.a + m.d);
    if (disc < 0) {
        double im = 0.5 * std::sqrt(-disc);
        return {std::complex<double>(half_tr, im), std::complex<double>(half_tr, -im)};
    }
    double root = 0.5 * std::sqrt(disc);
    double big = half_tr >= 0 ? half_tr + root : half_tr - root;
    double small = big != 0.0 ? m.det() / big : half_tr - (half_tr >= 0 ? root : -root);
    return {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
}

enum class Kind {
    saddle,
    attracting_node,
    repelling_node,
    attracting_focus,
    repelling_focus,
    center_linear,
    semi_hyperbolic,
    nilpotent,
    degenerate_curve,
};

enum class SemiKind { none, saddle, attracting_node, repelling_node, saddle_node };

struct Classification {
    Kind kind = Kind::nilpotent;
    SemiKind sub = SemiKind::none;
    /// Set when a near-zero quantity was rounded to zero.
    bool boundary = false;

    friend bool operator==(const Classification& l, const Classification& r) {
        return l.kind == r.kind && l.sub == r.sub;
    }

    /// True for attracting nodes, including semi-hyperbolic ones.
    bool is_attracting_node() const {
        return kind == Kind::attracting_node || (kind == Kind::semi_hyperbolic && sub == SemiKind::attracting_node);
    }
    bool is_repelling_node() const {
        return kind == Kind::repelling_node || (kind == Kind::semi_hyperbolic && sub == SemiKind::repelling_node);
    }
    bool is_saddle() const {
        return kind == Kind::saddle || (kind == Kind::semi_hyperbolic && sub == SemiKind::saddle);
    }
};

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::saddle: return "saddle";
        case Kind::attracting_node: return "attracting_node";
        case Kind::repelling_node: return "repelling_node";
        case Kind::attracting_focus: return "attracting_focus";
        case Kind::repelling_focus: return "repelling_focus";
        case Kind::center_linear: return "center_linear";
        case Kind::semi_hyperbolic: return "semi_hyperbolic";
        case Kind::nilpotent: return "nilpotent";
        case Kind::degenerate_curve: return "degenerate_curve";
    }
    return "?";
}

inline const char* semi_name(SemiKind s) {
    switch (s) {
        case SemiKind::none: return "none";
        case SemiKind::saddle: return "saddle";
        case SemiKind::attracting_node: return "attracting_node";
        case SemiKind::repelling_node: return "repelling_node";
        case SemiKind::saddle_node: return "saddle_node";
    }
    return "?";
}

/// "saddle", "semi_hyperbolic_saddle_node", ...
inline std::string to_string(const Classification& c) {
    if (c.kind == Kind::semi_hyperbolic && c.sub != SemiKind::none) return std::string("semi_hyperbolic_") + semi_name(c.sub);
    return kind_name(c.kind);
}

/// Exact classification from trace and determinant.
inline Classification classify_trace_det(const Rational& tr, const Rational& det) {
    if (det < 0) return {Kind::saddle};
    if (det == 0) return {tr == 0 ? Kind::nilpotent : Kind::semi_hyperbolic};
    Rational disc = tr * tr - 4 * det;
    if (disc >= 0) return {tr < 0 ? Kind::attracting_node : Kind::repelling_node};
    if (tr == 0) return {Kind::center_linear};
    return {tr < 0 ? Kind::attracting_focus : Kind::repelling_focus};
}

inline Classification classify_linear(const Mat2q& J) {
    return classify_trace_det(J.trace(), J.det());
}

/// Floating-point classification. Real parts below 1e-10 ||J|| count as
/// zero and set the boundary flag.
inline Classification classify_linear(const Mat2d& J) {
    double eps = 1e-10 * std::max(norm(J), 1e-300);
    auto ev = eigenvalues(J);
    double r0 = ev[0].real(), r1 = ev[1].real();
    bool complex_pair = ev[0].imag() != 0.0;
    bool boundary = false;
    auto zero = [&](double v) {
        if (v != 0.0 && std::fabs(v) < eps) boundary = true;
        return std::fabs(v) < eps;
    };
    Classification out;
    // A determinant that is rounding noise means a zero eigenvalue even when
    // the computed pair came out complex (nilpotent blocks are very
    // sensitive to perturbation).
    double n = norm(J);
    if (std::fabs(J.det()) <= 1e-10 * n * n) {
        bool tz = std::fabs(J.trace()) < eps;
        out.kind = tz ? Kind::nilpotent : Kind::semi_hyperbolic;
        out.boundary = J.det() != 0.0 || (tz && J.trace() != 0.0);
        return out;
    }
    if (complex_pair) {
        bool rz = zero(r0);
        bool iz = zero(ev[0].imag());
        if (iz) {
            // numerically repeated real eigenvalue
            out.kind = rz ? Kind::nilpotent : (r0 < 0 ? Kind::attracting_node : Kind::repelling_node);
        } else if (rz) {
            out.kind = Kind::center_linear;
        } else {
            out.kind = r0 < 0 ? Kind::attracting_focus : Kind::repelling_focus;
        }
    } else {
        bool z0 = zero(r0), z1 = zero(r1);
        if (z0 && z1)
            out.kind = Kind::nilpotent;
        else if (z0 || z1)
            out.kind = Kind::semi_hyperbolic;
        else if ((r0 < 0) != (r1 < 0))
            out.kind = Kind::saddle;
        else
            out.kind = r0 < 0 ? Kind::attracting_node : Kind::repelling_node;
    }
    out.boundary = boundary;
    return out;
}

}  // namespace phasekit
