#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phasekit/errors.hpp"
#include "phasekit/rational.hpp"

namespace phasekit {

/// Univariate polynomial over the rationals, coefficients stored from the
/// constant term upwards with no trailing zeros.
class UPoly {
public:
    UPoly() = default;
    UPoly(const Rational& c) {  // NOLINT
        if (c != 0) c_.push_back(c);
    }
    explicit UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    static UPoly monomial(const Rational& c, std::size_t e) {
        if (c == 0) return {};
        std::vector<Rational> v(e + 1, Rational(0));
        v[e] = c;
        return UPoly(std::move(v));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
    Rational lc() const { return c_.empty() ? Rational(0) : c_.back(); }

    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (std::size_t k = 0; k < a.c_.size(); ++k) v[k] += a.c_[k];
        for (std::size_t k = 0; k < b.c_.size(); ++k) v[k] += b.c_[k];
        return UPoly(std::move(v));
    }
    friend UPoly operator-(const UPoly& a) {
        UPoly out = a;
        for (auto& c : out.c_) c = -c;
        return out;
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
        return UPoly(std::move(v));
    }

    /// Euclidean division over Q.
    std::pair<UPoly, UPoly> divmod(const UPoly& d) const {
        if (d.is_zero()) throw DomainError("division by zero polynomial");
        UPoly r = *this;
        std::vector<Rational> q(c_.size() >= d.c_.size() ? c_.size() - d.c_.size() + 1 : 0, Rational(0));
        while (!r.is_zero() && r.degree() >= d.degree()) {
            auto shift = static_cast<std::size_t>(r.degree() - d.degree());
            Rational f = r.lc() / d.lc();
            q[shift] = f;
            for (std::size_t k = 0; k < d.c_.size(); ++k) r.c_[k + shift] -= f * d.c_[k];
            r.trim();
        }
        return {UPoly(std::move(q)), r};
    }

    /// Quotient of an exact division; throws if the remainder is nonzero.
    UPoly exact_div(const UPoly& d) const {
        auto [q, r] = divmod(d);
        if (!r.is_zero()) throw DomainError("univariate division is not exact");
        return q;
    }

    UPoly derivative() const {
        std::vector<Rational> v;
        for (std::size_t k = 1; k < c_.size(); ++k) v.push_back(c_[k] * static_cast<long>(k));
        return UPoly(std::move(v));
    }

    UPoly monic() const {
        if (is_zero()) return {};
        Rational inv = 1 / lc();
        UPoly out = *this;
        for (auto& c : out.c_) c *= inv;
        return out;
    }

    Rational eval(const Rational& x) const {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    double eval(double x) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
        return acc;
    }

    std::string to_string(const char* var = "u") const {
        if (is_zero()) return "0";
        std::string out;
        bool first = true;
        for (std::size_t k = c_.size(); k-- > 0;) {
            const Rational& c = c_[k];
            if (c == 0) continue;
            bool neg = c < 0;
            out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
            Rational mag = abs(c);
            std::string mono = k == 0 ? "" : (k == 1 ? std::string(var) : std::string(var) + "^" + std::to_string(k));
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
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

/// Monic gcd over Q (zero if both inputs are zero).
inline UPoly gcd(UPoly a, UPoly b) {
    while (!b.is_zero()) {
        auto r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// A real root of a rational polynomial, exact when it is rational.
struct RealRoot {
    double value = 0.0;
    std::optional<Rational> exact;
    int multiplicity = 1;
    /// Rigorous bound on |value - root| for irrational roots.
    double error_bound = 0.0;
};

namespace detail {

inline std::vector<UPoly> sturm_chain(const UPoly& f) {
    std::vector<UPoly> chain{f, f.derivative()};
    while (!chain.back().is_zero()) {
        auto r = chain[chain.size() - 2].divmod(chain.back()).second;
        if (r.is_zero()) break;
        chain.push_back(-r);
    }
    return chain;
}

inline int sign_changes(const std::vector<UPoly>& chain, const Rational& x) {
    int changes = 0, last = 0;
    for (const auto& p : chain) {
        int s = sgn(p.eval(x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Tries small-denominator convergents of x as exact roots of f.
inline std::optional<Rational> recognize_rational(const UPoly& f, const Rational& lo, const Rational& hi) {
    Rational mid = (lo + hi) / 2;
    // continued fraction of mid
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    Rational rem = mid;
    for (int step = 0; step < 64; ++step) {
        Integer a;
        mpz_fdiv_q(a.get_mpz_t(), rem.get_num_mpz_t(), rem.get_den_mpz_t());
        Integer h2 = a * h1 + h0, k2 = a * k1 + k0;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        Rational conv(h1, k1);
        conv.canonicalize();
        if (abs(k1) > Integer("1000000000")) break;
        if (conv >= lo && conv <= hi && f.eval(conv) == 0) return conv;
        Rational frac = rem - Rational(a);
        if (frac == 0) break;
        rem = 1 / frac;
    }
    return std::nullopt;
}

/// Real roots of a squarefree polynomial.
inline std::vector<std::pair<double, std::optional<Rational>>> squarefree_roots(const UPoly& f, double& err_out) {
    std::vector<std::pair<double, std::optional<Rational>>> out;
    if (f.degree() <= 0) return out;
    // Cauchy bound
    Rational bound = 0;
    for (int k = 0; k < f.degree(); ++k) bound = std::max(bound, Rational(abs(f.coeff(static_cast<std::size_t>(k)) / f.lc())));
    bound += 1;
    auto chain = sturm_chain(f);
    // Sturm counts distinct roots in (lo, hi]; lo is never a root of an
    // interval's own count, so each isolated interval holds one root in
    // (lo, hi].
    std::vector<std::pair<Rational, Rational>> work{{-bound, bound}}, isolated;
    while (!work.empty()) {
        auto [lo, hi] = work.back();
        work.pop_back();
        int n = sign_changes(chain, lo) - sign_changes(chain, hi);
        if (n <= 0) continue;
        if (n == 1) {
            isolated.emplace_back(lo, hi);
            continue;
        }
        Rational mid = (lo + hi) / 2;
        work.emplace_back(lo, mid);
        work.emplace_back(mid, hi);
    }

    err_out = 0.0;
    for (auto [lo, hi] : isolated) {
        if (f.eval(hi) == 0) {
            out.emplace_back(hi.get_d(), hi);
            continue;
        }
        int shi = sgn(f.eval(hi));
        std::optional<Rational> hit;
        for (int it = 0; it < 400; ++it) {
            double scale = std::max(1.0, std::fabs(hi.get_d()));
            if (Rational(hi - lo).get_d() < 1e-18 * scale) break;
            Rational mid = (lo + hi) / 2;
            int sm = sgn(f.eval(mid));
            if (sm == 0) {
                hit = mid;
                break;
            }
            if (sm == shi)
                hi = mid;
            else
                lo = mid;
        }
        if (!hit) hit = recognize_rational(f, lo, hi);
        if (!hit) {
            // with integer coefficients a rational root times the leading
            // coefficient is an integer; narrow until rounding is unambiguous
            Integer den = 1;
            for (int k = 0; k <= f.degree(); ++k) {
                const Rational& c = f.coeff(static_cast<std::size_t>(k));
                mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
            }
            Rational lead = abs(Rational(f.lc() * den));
            for (int it = 0; it < 4000 && Rational((hi - lo) * lead) >= Rational(1, 4); ++it) {
                Rational mid = (lo + hi) / 2;
                int sm = sgn(f.eval(mid));
                if (sm == 0) {
                    hit = mid;
                    break;
                }
                if (sm == shi)
                    hi = mid;
                else
                    lo = mid;
            }
            if (!hit) {
                Rational scaled = (lo + hi) / 2 * lead;
                Integer n;
                mpz_fdiv_q(n.get_mpz_t(), Rational(scaled + Rational(1, 2)).get_num_mpz_t(),
                           Rational(scaled + Rational(1, 2)).get_den_mpz_t());
                Rational cand = Rational(n) / lead;
                cand.canonicalize();
                if (cand >= lo && cand <= hi && f.eval(cand) == 0) hit = cand;
            }
        }
        if (hit) {
            out.emplace_back(hit->get_d(), *hit);
            continue;
        }
        Rational mid = (lo + hi) / 2;
        double v = mid.get_d();
        err_out = std::max(err_out, Rational(hi - lo).get_d() + std::fabs(v) * 1.2e-16);
        out.emplace_back(v, std::nullopt);
    }
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace detail

/// All distinct real roots of f (f nonzero), ascending, with multiplicities.
/// Rational roots are returned exactly; irrational ones with an error bound.
inline std::vector<RealRoot> real_roots(const UPoly& f) {
    if (f.is_zero()) throw DomainError("real_roots of the zero polynomial");
    std::vector<RealRoot> out;
    // Yun's squarefree decomposition
    UPoly a = f.monic();
    UPoly b = a.derivative();
    UPoly c = gcd(a, b);
    UPoly w = a.exact_div(c);
    UPoly y = b.exact_div(c);
    int mult = 1;
    while (w.degree() > 0) {
        UPoly z = y - w.derivative();
        UPoly g = gcd(w, z);
        if (g.degree() > 0) {
            double err = 0.0;
            for (auto& [v, ex] : detail::squarefree_roots(g, err))
                out.push_back(RealRoot{v, ex, mult, ex ? 0.0 : err});
        }
        w = w.exact_div(g);
        y = z.exact_div(g);
        ++mult;
    }
    std::sort(out.begin(), out.end(), [](const RealRoot& l, const RealRoot& r) { return l.value < r.value; });
    return out;
}

/// Number of distinct non-real roots counted in conjugate pairs (i.e. the
/// degree of the squarefree part minus its real root count).
inline int complex_root_count(const UPoly& f) {
    if (f.is_zero()) return 0;
    UPoly sf = f.monic().exact_div(gcd(f, f.derivative()));
    int real = 0;
    double err = 0.0;
    real = static_cast<int>(detail::squarefree_roots(sf, err).size());
    return sf.degree() - real;
}

}  // namespace phasekit
