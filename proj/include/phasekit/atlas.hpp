#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "phasekit/blowup.hpp"
#include "phasekit/compact.hpp"
#include "phasekit/equilibria.hpp"

namespace phasekit {

/// Qualitative regions of the CDK parameter quadrant a, b > 0.
enum class RegionId { r1, r2a, r2b, r2c, r3a, r3b, r3c, r3d, r3e, r3f, r3g, r3h, r3i, r3j, r3k, r3l };

inline constexpr RegionId all_regions[] = {RegionId::r1,  RegionId::r2a, RegionId::r2b, RegionId::r2c,
                                           RegionId::r3a, RegionId::r3b, RegionId::r3c, RegionId::r3d,
                                           RegionId::r3e, RegionId::r3f, RegionId::r3g, RegionId::r3h,
                                           RegionId::r3i, RegionId::r3j, RegionId::r3k, RegionId::r3l};

inline const char* region_name(RegionId r) {
    static const char* names[] = {"1",  "2a", "2b", "2c", "3a", "3b", "3c", "3d",
                                  "3e", "3f", "3g", "3h", "3i", "3j", "3k", "3l"};
    return names[static_cast<int>(r)];
}

inline std::optional<RegionId> region_from_name(std::string_view s) {
    for (RegionId r : all_regions)
        if (s == region_name(r)) return r;
    return std::nullopt;
}

/// Exact decision tree. Boundaries a = 1, b = 1, a = b and a = 1/2 (on
/// b = 1) are regions of their own; |8a(a-1)| = b belongs to the node case.
inline RegionId classify_region(const Rational& a, const Rational& b) {
    require_positive(a, b);
    const Rational half(1, 2);
    if (a == 1 && b == 1) return RegionId::r1;
    if (b < 1 && a > 1) return RegionId::r2a;
    if (a < 1 && b > 1) {
        Rational q = 8 * a * (a - 1);
        if (q < 0) q = -q;
        return q > b ? RegionId::r2b : RegionId::r2c;
    }
    if (a == 1) return b > 1 ? RegionId::r3a : RegionId::r3b;
    if (b == 1) {
        if (a > 1) return RegionId::r3l;
        if (a < half) return RegionId::r3i;
        return a == half ? RegionId::r3j : RegionId::r3k;
    }
    if (a > 1) {  // b > 1 here
        if (a == b) return RegionId::r3c;
        return a < b ? RegionId::r3d : RegionId::r3e;
    }
    // a < 1, b < 1
    if (a == b) return RegionId::r3f;
    return a < b ? RegionId::r3g : RegionId::r3h;
}

/// Nearest decimal with the double's shortest round-trip digits. Appends a
/// note to warnings when that decimal is not the double's exact value.
inline Rational rationalize(double v, std::vector<std::string>* warnings = nullptr) {
    if (!std::isfinite(v)) throw DomainError("parameter must be finite");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string text = buf;
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) {
            text = buf;
            break;
        }
    }
    Rational r = parse_rational(text);
    if (warnings && r != from_double(v))
        warnings->push_back("floating-point value " + text + " taken as exact rational " + to_string(r));
    return r;
}

inline RegionId classify_region(double a, double b, std::vector<std::string>* warnings = nullptr) {
    return classify_region(rationalize(a, warnings), rationalize(b, warnings));
}

/// s1 behaviour per blow-up: "1" (b < 1), "2" (b > 1), "3a".."3d" (b = 1).
/// Empty when the origin is not isolated (a = b = 1).
inline std::string expected_s1_case(const Rational& a, const Rational& b) {
    require_positive(a, b);
    if (b < 1) return "1";
    if (b > 1) return "2";
    const Rational half(1, 2);
    if (a < half) return "3a";
    if (a == half) return "3b";
    if (a < 1) return "3c";
    if (a > 1) return "3d";
    return "";
}

/// Reads the s1 case off a computed decomposition: the sector count for
/// weights (1,1), the saddles on the +x divisor for weights (1,2).
inline std::string s1_case_of(const SectorDecomposition& d) {
    if (d.weights == NewtonWeights{1, 1}) {
        if (d.elliptic() == 2 && d.hyperbolic() == 0 && d.parabolic() == 0) return "1";
        if (d.elliptic() == 0 && d.hyperbolic() == 2 && d.parabolic() == 0) return "2";
        return "";
    }
    if (d.weights != NewtonWeights{1, 2}) return "";
    int saddles = 0, saddle_nodes = 0;
    std::optional<Rational> saddle_t;
    for (const auto& c : d.directions) {
        if (c.chart != Direction::pos_x) continue;
        const auto& k = c.point.point.kind;
        if (k.kind == Kind::semi_hyperbolic && k.sub == SemiKind::saddle_node) ++saddle_nodes;
        if (k.is_saddle()) {
            ++saddles;
            saddle_t = c.point.t.exact;
        }
    }
    if (saddle_nodes == 1 && saddles == 0) return "3b";
    if (saddles == 2 && saddle_nodes == 0) return "3d";
    if (saddles == 1 && saddle_nodes == 0 && saddle_t) return *saddle_t == 0 ? "3c" : (*saddle_t < 0 ? "3a" : "");
    return "";
}

struct FinitePointSummary {
    std::string label;
    Classification kind;
    /// for hyperbolic saddles on the y-axis: the x-direction repels
    bool x_repelling = false;
};

struct S1Summary {
    std::string case_label;
    NewtonWeights weights{0, 0};
    std::vector<SectorType> sectors;
    int elliptic = 0, hyperbolic = 0, parabolic = 0, index = 0;
};

struct InfinitySummary {
    /// "1" (a = b, every point at infinity stationary), "2a" (b > a), "2b" (a > b)
    std::string case_label;
    bool continuum = false;
    Classification x_kind, y_kind;
};

struct RegionSummary {
    RegionId region = RegionId::r1;
    Rational a, b;
    /// a = b = 1: the finite stationary set is the circle x^2 + (y - 1/2)^2 = 1/4
    bool circle = false;
    std::vector<FinitePointSummary> finite_points;
    S1Summary s1_sectors;
    InfinitySummary infinity;
    bool homoclinic = false;
    std::vector<std::string> almost_attractors;
    std::string description;
};

inline bool expected_homoclinic(const Rational& a, const Rational& b) { return b < 1 || (b == 1 && a < 1); }

inline std::vector<std::string> expected_almost_attractors(const Rational& a, const Rational& b) {
    require_positive(a, b);
    if (a == 1 && b == 1) return {"s1", "circle"};
    if (b < 1) return a > 1 ? std::vector<std::string>{"s1", "s2"} : std::vector<std::string>{"s1"};
    if (b == 1) return a > 1 ? std::vector<std::string>{"s1", "s2"} : std::vector<std::string>{"s1"};
    return a < 1 ? std::vector<std::string>{"s3", "s4"} : std::vector<std::string>{"s2"};
}

namespace detail {

struct RegionExpectation {
    Classification s2;
    std::optional<Kind> s34;
    const char* text;
};

inline RegionExpectation region_expectation(RegionId r) {
    const Classification node{Kind::attracting_node}, saddle{Kind::saddle};
    switch (r) {
        case RegionId::r1: return {{}, {}, "stationary circle x^2+(y-1/2)^2=1/4; every point at infinity stationary; orbits are rays towards the origin"};
        case RegionId::r2a: return {node, Kind::saddle, "s1 two elliptic sectors; s2 attracting node; s3, s4 saddles; x-infinity repelling nodes, y-infinity saddles"};
        case RegionId::r2b: return {saddle, Kind::attracting_focus, "s1 two hyperbolic sectors; s2 saddle; s3, s4 attracting foci; x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r2c: return {saddle, Kind::attracting_node, "s1 two hyperbolic sectors; s2 saddle; s3, s4 attracting nodes; x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r3a: return {{Kind::semi_hyperbolic, SemiKind::attracting_node}, {}, "s1 two hyperbolic sectors; s2 attracting node (semi-hyperbolic); x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r3b: return {{Kind::semi_hyperbolic, SemiKind::saddle}, {}, "s1 two elliptic sectors; s2 saddle (semi-hyperbolic); x-infinity repelling nodes, y-infinity saddles"};
        case RegionId::r3c: return {node, {}, "s1 two hyperbolic sectors; s2 attracting node; every point at infinity stationary"};
        case RegionId::r3d: return {node, {}, "s1 two hyperbolic sectors; s2 attracting node; x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r3e: return {node, {}, "s1 two hyperbolic sectors; s2 attracting node; x-infinity repelling nodes, y-infinity saddles"};
        case RegionId::r3f: return {saddle, {}, "s1 two elliptic sectors; s2 saddle, x repelling, y attracting; every point at infinity stationary"};
        case RegionId::r3g: return {saddle, {}, "s1 two elliptic sectors; s2 saddle, x repelling, y attracting; x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r3h: return {saddle, {}, "s1 two elliptic sectors; s2 saddle, x repelling, y attracting; x-infinity repelling nodes, y-infinity saddles"};
        case RegionId::r3i: return {saddle, {}, "s1 elliptic pair above, one saddle on the blow-up divisor below; s2 saddle, x repelling, y attracting; x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r3j: return {saddle, {}, "s1 elliptic pair above, saddle-node on the blow-up divisor; s2 saddle, x repelling, y attracting; x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r3k: return {saddle, {}, "s1 elliptic pair above, saddle on the blow-up divisor at the axis; s2 saddle, x repelling, y attracting; x-infinity saddles, y-infinity repelling nodes"};
        case RegionId::r3l: return {node, {}, "s1 parabolic and hyperbolic sectors, two divisor saddles; s2 attracting node; x-infinity repelling nodes, y-infinity saddles"};
    }
    return {};
}

[[noreturn]] inline void mismatch(const Rational& a, const Rational& b, const std::string& what) {
    throw InternalInconsistencyError("atlas cross-validation failed at (" + to_string(a) + ", " + to_string(b) +
                                     "): " + what);
}

inline std::string kind_text(const Classification& c) {
    std::string s = kind_name(c.kind);
    if (c.kind == Kind::semi_hyperbolic) s += std::string("/") + semi_name(c.sub);
    return s;
}

}  // namespace detail

/// Full qualitative record for (a, b), checked against the equilibria,
/// blow-up and compactification computations. A disagreement is a bug and
/// raises InternalInconsistencyError.
inline RegionSummary region_summary(const Rational& a, const Rational& b) {
    RegionSummary out;
    out.region = classify_region(a, b);
    out.a = a;
    out.b = b;
    auto exp = detail::region_expectation(out.region);
    out.description = exp.text;
    out.homoclinic = expected_homoclinic(a, b);
    out.almost_attractors = expected_almost_attractors(a, b);
    auto fail = [&](const std::string& what) { detail::mismatch(a, b, what); };

    // finite points
    auto st = cdk_stationary_points(a, b);
    out.circle = st.circle;
    if ((out.region == RegionId::r1) != st.circle) fail("stationary circle");
    std::size_t want = exp.s34 ? 4 : 2;
    if (!st.circle && st.points.size() != want)
        fail("expected " + std::to_string(want) + " finite points, found " + std::to_string(st.points.size()));
    for (const auto& p : st.points) {
        FinitePointSummary s{p.label, p.kind, false};
        if (p.label == "s2") {
            if (!(p.kind == exp.s2)) fail("s2 is " + detail::kind_text(p.kind) + ", expected " + detail::kind_text(exp.s2));
            if (p.kind.kind == Kind::saddle) {
                s.x_repelling = p.jacobian.a > 0 && p.jacobian.d < 0 && p.jacobian.b == 0 && p.jacobian.c == 0;
                if (!s.x_repelling) fail("s2 saddle does not repel along x");
            }
        } else if (p.label == "s3" || p.label == "s4") {
            if (!exp.s34 || p.kind.kind != *exp.s34) fail(p.label + " is " + detail::kind_text(p.kind));
        }
        out.finite_points.push_back(s);
    }
    for (const auto& name : out.almost_attractors)
        for (const auto& p : out.finite_points)
            if (p.label == name && name != "s1" && !p.kind.is_attracting_node() && p.kind.kind != Kind::attracting_focus)
                fail(name + " listed as attractor but is " + detail::kind_text(p.kind));

    // s1 via blow-up
    PolyField f = cdk_field(a, b);
    if (!st.circle) {
        SectorDecomposition d = classify_nilpotent_origin(f);
        S1Summary& s1 = out.s1_sectors;
        s1.weights = d.weights;
        for (const auto& sec : d.sectors) s1.sectors.push_back(sec.type);
        s1.elliptic = d.elliptic();
        s1.hyperbolic = d.hyperbolic();
        s1.parabolic = d.parabolic();
        s1.index = d.index;
        s1.case_label = s1_case_of(d);
        std::string want_case = expected_s1_case(a, b);
        if (s1.case_label != want_case)
            fail("s1 blow-up gives case '" + s1.case_label + "', expected '" + want_case + "'");
        if (d.homoclinic != out.homoclinic) fail("homoclinic flag disagrees with the s1 sectors");
        int want_index = out.homoclinic ? 2 : 0;
        if (d.index != want_index) fail("s1 index " + std::to_string(d.index));
        if (b == 1 && a < 1)
            for (const auto& sec : d.raw_sectors)
                if (sec.type == SectorType::elliptic && !(sec.from >= 0 && sec.to <= std::numbers::pi))
                    fail("elliptic sector outside the upper half plane");
    }

    // infinity
    auto inf = infinite_stationary_points(f);
    InfinitySummary& is = out.infinity;
    is.continuum = inf.continuum;
    if ((a == b) != inf.continuum) fail("continuum at infinity");
    if (inf.continuum) {
        is.case_label = "1";
        // one outgoing orbit per point: transverse eigenvalue positive
        bool outgoing = inf.continuum_transverse_y > 0;
        for (double u : {-10.0, -1.0, 0.0, 1.0, 10.0}) outgoing = outgoing && inf.continuum_transverse.eval(u) > 0;
        if (!outgoing) fail("continuum at infinity is not repelling");
    } else {
        is.case_label = b > a ? "2a" : "2b";
        if (inf.points.size() != 2) fail("expected two pairs of points at infinity");
        for (const auto& p : inf.points) {
            if (!(p.kind == p.antipode_kind)) fail("antipodal points at infinity differ");
            if (p.direction_label == "+x") is.x_kind = p.kind;
            else if (p.direction_label == "+y") is.y_kind = p.kind;
            else fail("unexpected point at infinity " + p.direction_label);
        }
        const Classification& saddle_side = b > a ? is.x_kind : is.y_kind;
        const Classification& node_side = b > a ? is.y_kind : is.x_kind;
        if (saddle_side.kind != Kind::saddle || !node_side.is_repelling_node()) fail("kinds at infinity");
    }
    return out;
}

inline RegionSummary region_summary(double a, double b, std::vector<std::string>* warnings = nullptr) {
    return region_summary(rationalize(a, warnings), rationalize(b, warnings));
}

struct ParamRange {
    Rational lo, hi;
};

/// A boundary curve of the partition with the regions met along it.
struct Locus {
    std::string name;
    std::vector<std::array<Rational, 2>> points;
    std::vector<RegionId> regions;
};

struct RegionMap {
    ParamRange a_range, b_range;
    int resolution = 0;
    /// cell centres
    std::vector<Rational> a_values, b_values;
    /// row-major, row index over b
    std::vector<RegionId> cells;
    std::vector<Locus> loci;

    RegionId at(int i_a, int j_b) const { return cells[static_cast<std::size_t>(j_b) * a_values.size() + i_a]; }

    /// every region met by a cell or a locus, in enum order
    std::vector<RegionId> distinct() const {
        std::vector<bool> seen(std::size(all_regions), false);
        for (RegionId r : cells) seen[static_cast<int>(r)] = true;
        for (const auto& l : loci)
            for (RegionId r : l.regions) seen[static_cast<int>(r)] = true;
        std::vector<RegionId> out;
        for (RegionId r : all_regions)
            if (seen[static_cast<int>(r)]) out.push_back(r);
        return out;
    }
};

/// Worker count: hardware concurrency, capped by ATLAS_THREADS if set.
inline unsigned atlas_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ATLAS_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

namespace detail {

inline std::vector<Rational> cell_centres(const ParamRange& r, int n) {
    std::vector<Rational> v;
    for (int i = 0; i < n; ++i) v.push_back(r.lo + (r.hi - r.lo) * make_rational(2 * i + 1, 2 * n));
    return v;
}

inline bool inside(const ParamRange& r, const Rational& v) { return v > 0 && v >= r.lo && v <= r.hi; }

}  // namespace detail

/// Region of each cell centre over a_range x b_range, plus the boundary
/// loci a = 1, b = 1, a = b, the point a = 1/2 on b = 1 and the curve
/// |8a(a-1)| = b (a < 1 < b), each sampled at `resolution` points.
/// A lower end of 0 is allowed and means the open end.
inline RegionMap scan_grid(const ParamRange& a_range, const ParamRange& b_range, int resolution) {
    if (resolution < 1) throw DomainError("resolution must be at least 1");
    if (a_range.lo < 0 || b_range.lo < 0 || a_range.hi <= 0 || b_range.hi <= 0)
        throw DomainError("parameter ranges must be positive");
    if (a_range.lo > a_range.hi || b_range.lo > b_range.hi) throw DomainError("empty parameter range");
    RegionMap m;
    m.a_range = a_range;
    m.b_range = b_range;
    m.resolution = resolution;
    m.a_values = detail::cell_centres(a_range, resolution);
    m.b_values = detail::cell_centres(b_range, resolution);
    const std::size_t na = m.a_values.size(), nb = m.b_values.size();
    m.cells.assign(na * nb, RegionId::r1);

    unsigned workers = std::min<unsigned>(atlas_threads(), static_cast<unsigned>(nb));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t j = w; j < nb; j += workers)
                for (std::size_t i = 0; i < na; ++i) m.cells[j * na + i] = classify_region(m.a_values[i], m.b_values[j]);
        });
    for (auto& t : pool) t.join();

    auto sample = [&](const std::string& name, auto point_at) {
        Locus l;
        l.name = name;
        for (int k = 0; k < resolution; ++k) {
            auto p = point_at(make_rational(2 * k + 1, 2 * resolution));
            if (!p || !detail::inside(a_range, (*p)[0]) || !detail::inside(b_range, (*p)[1])) continue;
            l.points.push_back(*p);
            RegionId r = classify_region((*p)[0], (*p)[1]);
            if (std::find(l.regions.begin(), l.regions.end(), r) == l.regions.end()) l.regions.push_back(r);
        }
        if (!l.points.empty()) m.loci.push_back(std::move(l));
    };
    using Pt = std::optional<std::array<Rational, 2>>;
    auto crossing = [&](const std::string& name, Rational a, Rational b) {
        Locus l;
        l.name = name;
        if (detail::inside(a_range, a) && detail::inside(b_range, b)) {
            l.points.push_back({a, b});
            l.regions.push_back(classify_region(a, b));
            m.loci.push_back(std::move(l));
        }
    };
    sample("a=1", [&](const Rational& s) -> Pt { return std::array<Rational, 2>{1, b_range.lo + (b_range.hi - b_range.lo) * s}; });
    sample("b=1", [&](const Rational& s) -> Pt { return std::array<Rational, 2>{a_range.lo + (a_range.hi - a_range.lo) * s, 1}; });
    sample("a=b", [&](const Rational& s) -> Pt {
        Rational lo = std::max(a_range.lo, b_range.lo), hi = std::min(a_range.hi, b_range.hi);
        if (lo > hi) return std::nullopt;
        Rational v = lo + (hi - lo) * s;
        return std::array<Rational, 2>{v, v};
    });
    sample("|8a(a-1)|=b", [&](const Rational& s) -> Pt {
        // a < 1 < b branch, parametrised by a over (0, 1)
        Rational a = s;
        Rational b = 8 * a * (1 - a);
        if (b <= 1) return std::nullopt;
        return std::array<Rational, 2>{a, b};
    });
    crossing("a=1/2,b=1", Rational(1, 2), 1);
    crossing("a=1,b=1", 1, 1);
    return m;
}

}  // namespace phasekit
