#pragma once

#include <vector>

#include "phasekit/bipoly.hpp"
#include "phasekit/upoly.hpp"

namespace phasekit {

namespace detail {

// Q[x][y] view of a BiPoly: element j is the coefficient of y^j.
using RecPoly = std::vector<UPoly>;

inline RecPoly to_rec(const BiPoly& p) {
    RecPoly out(static_cast<std::size_t>(std::max(p.degree_y(), -1) + 1));
    std::vector<std::vector<Rational>> raw(out.size());
    for (const auto& [m, c] : p.terms()) {
        auto& row = raw[m.j];
        if (row.size() <= m.i) row.resize(m.i + 1, Rational(0));
        row[m.i] = c;
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = UPoly(raw[j]);
    return out;
}

inline BiPoly from_rec(const RecPoly& r) {
    BiPoly out;
    for (std::size_t j = 0; j < r.size(); ++j)
        for (std::size_t i = 0; i < r[j].coeffs().size(); ++i)
            out.add_term({static_cast<unsigned>(i), static_cast<unsigned>(j)}, r[j].coeffs()[i]);
    return out;
}

inline void rec_trim(RecPoly& r) {
    while (!r.empty() && r.back().is_zero()) r.pop_back();
}

inline int rec_deg(const RecPoly& r) { return static_cast<int>(r.size()) - 1; }

inline UPoly rec_content(const RecPoly& r) {
    UPoly g;
    for (const auto& c : r) g = gcd(g, c);
    return g;
}

inline RecPoly rec_div_scalar(const RecPoly& r, const UPoly& d) {
    RecPoly out;
    out.reserve(r.size());
    for (const auto& c : r) out.push_back(c.exact_div(d));
    return out;
}

inline RecPoly rec_mul_scalar(const RecPoly& r, const UPoly& s) {
    RecPoly out;
    for (const auto& c : r) out.push_back(c * s);
    rec_trim(out);
    return out;
}

/// Pseudo-remainder of a by b in y: lc(b)^(deg a - deg b + 1) * a mod b.
inline RecPoly rec_prem(RecPoly a, const RecPoly& b) {
    int db = rec_deg(b);
    const UPoly& lb = b.back();
    int e = rec_deg(a) - db + 1;
    while (rec_deg(a) >= db && !a.empty()) {
        int da = rec_deg(a);
        UPoly la = a.back();
        for (auto& c : a) c = c * lb;
        for (int k = 0; k <= db; ++k) a[static_cast<std::size_t>(k + da - db)] = a[static_cast<std::size_t>(k + da - db)] - la * b[static_cast<std::size_t>(k)];
        rec_trim(a);
        --e;
    }
    UPoly f(1);
    for (int k = 0; k < e; ++k) f = f * lb;
    return rec_mul_scalar(a, f);
}

inline UPoly upow(const UPoly& p, int e) {
    UPoly out(1);
    for (int k = 0; k < e; ++k) out = out * p;
    return out;
}

}  // namespace detail

/// Greatest common divisor in Q[x,y] via the subresultant PRS over
/// Q[x][y] with content extraction. The result is primitive (integer
/// coefficients, gcd 1) with positive graded-lex leading coefficient.
inline BiPoly gcd(const BiPoly& p, const BiPoly& q) {
    using namespace detail;
    if (p.is_zero() && q.is_zero()) throw DomainError("gcd of two zero polynomials");
    if (p.is_zero()) return q.primitive();
    if (q.is_zero()) return p.primitive();

    RecPoly A = to_rec(p), B = to_rec(q);
    UPoly ca = rec_content(A), cb = rec_content(B);
    UPoly c = gcd(ca, cb);
    A = rec_div_scalar(A, ca);
    B = rec_div_scalar(B, cb);
    if (rec_deg(A) < rec_deg(B)) std::swap(A, B);

    RecPoly G;
    if (rec_deg(B) == 0) {
        G = RecPoly{UPoly(1)};
    } else {
        UPoly g(1), h(1);
        while (true) {
            int delta = rec_deg(A) - rec_deg(B);
            RecPoly R = rec_prem(A, B);
            if (R.empty()) {
                G = B;
                break;
            }
            if (rec_deg(R) == 0) {
                G = RecPoly{UPoly(1)};
                break;
            }
            A = B;
            UPoly divisor = g * upow(h, delta);
            B = rec_div_scalar(R, divisor);
            g = A.back();
            if (delta == 0) {
                // h unchanged
            } else if (delta == 1) {
                h = g;
            } else {
                h = upow(g, delta).exact_div(upow(h, delta - 1));
            }
        }
        G = rec_div_scalar(G, rec_content(G));
    }
    G = rec_mul_scalar(G, c);
    return from_rec(G).primitive();
}

/// Least common multiple, normalized like gcd.
inline BiPoly lcm(const BiPoly& p, const BiPoly& q) {
    if (p.is_zero() || q.is_zero()) return {};
    auto quotient = divide_exact(p * q, gcd(p, q));
    if (!quotient) throw DomainError("lcm: gcd does not divide product");
    return quotient->primitive();
}

}  // namespace phasekit
