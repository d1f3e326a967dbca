#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasekit/atlas.hpp"
#include "phasekit/sysio.hpp"

namespace phasekit {

/// Everything `analyze` computes for one system.
struct Report {
    /// text form of the system's origin ("cdk", "sprott", a file name)
    std::string source;
    std::optional<SystemSpec> system;
    std::vector<StationaryPoint> equilibria;
    /// finite stationary curve, as an equation
    std::optional<std::string> finite_continuum;
    std::optional<SectorDecomposition> origin;
    std::optional<InfinityAnalysis> infinity;
    std::optional<RegionSummary> region;
    std::vector<std::string> diagnostics;
};

enum class ReportFormat { json, human };

namespace detail {

using ojson = nlohmann::ordered_json;

/// Rounded to 12 significant digits so that the printed text is stable.
inline double round12(double v) {
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline ojson number(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    return round12(v);
}

inline ojson exact_number(const Rational& r) {
    ojson j;
    j["exact"] = to_string(r);
    j["value"] = number(r.get_d());
    return j;
}

inline ojson approx_number(double v, double tol) {
    ojson j;
    j["approx"] = number(v);
    j["tol"] = number(tol);
    return j;
}

inline ojson coord(const Coord& c) { return c.exact ? exact_number(*c.exact) : approx_number(c.value, c.error_bound); }

inline ojson matrix(const Mat2d& m, const std::optional<Mat2q>& exact) {
    ojson rows = ojson::array();
    if (exact) {
        rows.push_back({exact_number(exact->a), exact_number(exact->b)});
        rows.push_back({exact_number(exact->c), exact_number(exact->d)});
    } else {
        double tol = 1e-12 * std::max(1.0, norm(m));
        rows.push_back({approx_number(m.a, tol), approx_number(m.b, tol)});
        rows.push_back({approx_number(m.c, tol), approx_number(m.d, tol)});
    }
    return rows;
}

inline ojson eigen(const Eigenpair& ev) {
    ojson out = ojson::array();
    for (const auto& e : ev) {
        ojson j;
        j["re"] = number(e.real());
        j["im"] = number(e.imag());
        out.push_back(j);
    }
    return out;
}

inline ojson point_json(const StationaryPoint& p) {
    ojson j;
    if (!p.label.empty()) j["label"] = p.label;
    j["x"] = coord(p.x);
    j["y"] = coord(p.y);
    j["kind"] = to_string(p.kind);
    j["jacobian"] = matrix(p.jacobian, p.exact_jacobian);
    j["eigenvalues"] = eigen(p.eigenvalues);
    return j;
}

inline ojson origin_json(const SectorDecomposition& d) {
    ojson j;
    j["weights"] = {d.weights.alpha, d.weights.beta};
    j["degree"] = d.degree;
    j["dicritical"] = d.dicritical;
    ojson secs = ojson::array();
    for (const auto& s : d.sectors) {
        ojson e;
        e["type"] = sector_name(s.type);
        e["from"] = number(s.from);
        e["to"] = number(s.to);
        secs.push_back(e);
    }
    j["sectors"] = secs;
    j["elliptic"] = d.elliptic();
    j["hyperbolic"] = d.hyperbolic();
    j["parabolic"] = d.parabolic();
    j["index"] = d.index;
    j["homoclinic"] = d.homoclinic;
    return j;
}

inline ojson infinity_json(const InfinityAnalysis& inf) {
    ojson j;
    j["degree"] = inf.degree;
    j["continuum"] = inf.continuum;
    if (inf.continuum) {
        j["transverse_eigenvalue_u1"] = inf.continuum_transverse.to_string("u");
        j["transverse_eigenvalue_u2_at_0"] = exact_number(inf.continuum_transverse_y);
    }
    ojson pts = ojson::array();
    for (const auto& p : inf.points) {
        ojson e;
        e["direction"] = p.direction_label;
        e["chart"] = chart_name(p.chart);
        e["u"] = coord(p.u);
        e["kind"] = to_string(p.kind);
        e["antipode_kind"] = to_string(p.antipode_kind);
        e["theta"] = number(p.theta);
        pts.push_back(e);
    }
    j["points"] = pts;
    return j;
}

inline ojson region_json(const RegionSummary& r) {
    ojson j;
    j["case"] = region_name(r.region);
    j["a"] = exact_number(r.a);
    j["b"] = exact_number(r.b);
    j["description"] = r.description;
    j["circle"] = r.circle;
    ojson pts = ojson::array();
    for (const auto& p : r.finite_points) {
        ojson e;
        e["label"] = p.label;
        e["kind"] = to_string(p.kind);
        if (p.x_repelling) e["x_repelling"] = true;
        pts.push_back(e);
    }
    j["finite_points"] = pts;
    ojson s1;
    s1["case"] = r.s1_sectors.case_label;
    s1["weights"] = {r.s1_sectors.weights.alpha, r.s1_sectors.weights.beta};
    ojson types = ojson::array();
    for (auto t : r.s1_sectors.sectors) types.push_back(sector_name(t));
    s1["sectors"] = types;
    s1["index"] = r.s1_sectors.index;
    j["s1"] = s1;
    ojson inf;
    inf["case"] = r.infinity.case_label;
    inf["continuum"] = r.infinity.continuum;
    if (!r.infinity.continuum) {
        inf["x_direction"] = to_string(r.infinity.x_kind);
        inf["y_direction"] = to_string(r.infinity.y_kind);
    }
    j["infinity"] = inf;
    j["homoclinic"] = r.homoclinic;
    j["almost_attractors"] = r.almost_attractors;
    return j;
}

inline std::string human_coord(const Coord& c) {
    if (c.exact) return to_string(*c.exact);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", round12(c.value));
    return buf;
}

inline std::string human_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", round12(v));
    return buf;
}

}  // namespace detail

inline nlohmann::ordered_json report_json(const Report& r) {
    using detail::ojson;
    ojson j;
    j["format"] = "phasekit-report/1";
    if (r.system || !r.source.empty()) {
        ojson s;
        if (!r.source.empty()) s["source"] = r.source;
        if (r.system) {
            s["text"] = format_system(*r.system);
            ojson params = ojson::object();
            for (const auto& p : r.system->parameters)
                params[p.name] = p.value ? detail::exact_number(*p.value) : ojson(nullptr);
            s["parameters"] = params;
        }
        j["system"] = s;
    }
    ojson eq = ojson::array();
    for (const auto& p : r.equilibria) eq.push_back(detail::point_json(p));
    j["equilibria"] = eq;
    if (r.finite_continuum) j["finite_continuum"] = *r.finite_continuum;
    if (r.origin) j["origin"] = detail::origin_json(*r.origin);
    if (r.infinity) j["infinity"] = detail::infinity_json(*r.infinity);
    if (r.region) j["region"] = detail::region_json(*r.region);
    j["diagnostics"] = r.diagnostics;
    return j;
}

/// Deterministic text: fixed key order, numbers to 12 significant digits.
inline std::string format_report(const Report& r, ReportFormat fmt = ReportFormat::json) {
    if (fmt == ReportFormat::json) return report_json(r).dump(2) + "\n";
    std::ostringstream o;
    if (!r.source.empty()) o << "system: " << r.source << "\n";
    if (r.system) {
        o << "  x' = " << to_string(*r.system->rhs_x) << "\n";
        o << "  y' = " << to_string(*r.system->rhs_y) << "\n";
        for (const auto& p : r.system->parameters)
            o << "  " << p.name << " = " << (p.value ? to_string(*p.value) : std::string("(unbound)")) << "\n";
    }
    o << "equilibria: " << r.equilibria.size() << "\n";
    for (const auto& p : r.equilibria) {
        o << "  " << (p.label.empty() ? std::string("*") : p.label) << " (" << detail::human_coord(p.x) << ", "
          << detail::human_coord(p.y) << ")  " << to_string(p.kind);
        if (!p.is_exact()) o << "  [approx]";
        o << "\n";
    }
    if (r.finite_continuum) o << "stationary curve: " << *r.finite_continuum << "\n";
    if (r.origin) {
        const auto& d = *r.origin;
        o << "origin blow-up: weights (" << d.weights.alpha << "," << d.weights.beta << "), index " << d.index << "\n  sectors:";
        for (const auto& s : d.sectors) o << " " << sector_name(s.type);
        if (d.dicritical) o << " (dicritical)";
        o << "\n";
    }
    if (r.infinity) {
        const auto& inf = *r.infinity;
        if (inf.continuum) {
            o << "infinity: every point stationary, transverse eigenvalue " << inf.continuum_transverse.to_string("u") << "\n";
        } else {
            o << "infinity:\n";
            for (const auto& p : inf.points)
                o << "  " << p.direction_label << "  " << to_string(p.kind) << ", antipode " << to_string(p.antipode_kind)
                  << "\n";
        }
    }
    if (r.region) {
        const auto& g = *r.region;
        o << "region: " << region_name(g.region) << "\n  " << g.description << "\n";
        o << "  homoclinic orbits: " << (g.homoclinic ? "yes" : "no") << "\n  almost attractors:";
        for (const auto& s : g.almost_attractors) o << " " << s;
        o << "\n";
    }
    for (const auto& d : r.diagnostics) o << "note: " << d << "\n";
    return o.str();
}

/// The system echo of a JSON report, parsed back.
inline std::optional<SystemSpec> system_from_report(const std::string& json_text) {
    auto j = nlohmann::ordered_json::parse(json_text);
    if (!j.contains("system") || !j["system"].contains("text")) return std::nullopt;
    return parse_system(j["system"]["text"].get<std::string>());
}

/// Full report for the CDK system at (a, b), region included.
inline Report analyze_cdk(const Rational& a, const Rational& b) {
    Report r;
    r.source = "cdk";
    r.system = cdk_spec(a, b);
    auto st = cdk_stationary_points(a, b);
    r.equilibria = st.points;
    if (st.circle) r.finite_continuum = "x^2 + y^2 - y = 0";
    PolyField f = cdk_field(a, b);
    if (!st.circle) r.origin = classify_nilpotent_origin(f);
    r.infinity = infinite_stationary_points(f);
    r.region = region_summary(a, b);
    return r;
}

/// Report for a parsed system: stationary points in `box`, blow-up when
/// the origin is a nilpotent stationary point, and the points at infinity.
inline Report analyze_system(const SystemSpec& spec, const Box& box = {-4, 4, -4, 4}, double tol = 1e-10) {
    Report r;
    r.system = spec;
    PolyField f = to_poly_field(spec);
    if (!f.time_factor.is_constant())
        r.diagnostics.push_back("time rescaled by " + f.time_factor.to_string() +
                                "; orbit direction is reversed where it is negative");
    if (f.is_zero()) {
        r.diagnostics.push_back("degenerate field: every point is stationary");
        return r;
    }
    auto search = find_stationary(f, box, tol);
    r.equilibria = search.points;
    if (search.continuum) r.finite_continuum = search.continuum_factor.to_string() + " = 0";
    bool origin_nilpotent = false;
    for (const auto& p : r.equilibria)
        if (p.x.exact && p.y.exact && *p.x.exact == 0 && *p.y.exact == 0 && p.kind.kind == Kind::nilpotent)
            origin_nilpotent = true;
    if (origin_nilpotent) {
        try {
            r.origin = classify_nilpotent_origin(f);
        } catch (const UnresolvedError& e) {
            r.diagnostics.push_back(std::string("origin blow-up unresolved: ") + e.what());
        }
    }
    if (f.degree() >= 1) r.infinity = infinite_stationary_points(f);
    return r;
}

/// Fill colours for the region map, one per region.
inline const char* region_color(RegionId r) {
    static const char* colors[] = {"#000000", "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                                   "#a65628", "#f781bf", "#999999", "#66c2a5", "#fc8d62", "#8da0cb",
                                   "#e78ac3", "#a6d854", "#ffd92f", "#e5c494"};
    return colors[static_cast<int>(r)];
}

/// Map document for a scan: grid, loci and a palette.
inline nlohmann::ordered_json region_map_json(const RegionMap& m) {
    using detail::ojson;
    ojson j;
    j["format"] = "phasekit-region-map/1";
    j["a_range"] = {to_string(m.a_range.lo), to_string(m.a_range.hi)};
    j["b_range"] = {to_string(m.b_range.lo), to_string(m.b_range.hi)};
    j["resolution"] = m.resolution;
    ojson av = ojson::array(), bv = ojson::array();
    for (const auto& a : m.a_values) av.push_back(to_string(a));
    for (const auto& b : m.b_values) bv.push_back(to_string(b));
    j["a_values"] = av;
    j["b_values"] = bv;
    ojson rows = ojson::array();
    for (std::size_t jb = 0; jb < m.b_values.size(); ++jb) {
        ojson row = ojson::array();
        for (std::size_t ia = 0; ia < m.a_values.size(); ++ia)
            row.push_back(region_name(m.cells[jb * m.a_values.size() + ia]));
        rows.push_back(row);
    }
    j["cells"] = rows;
    ojson loci = ojson::array();
    for (const auto& l : m.loci) {
        ojson e;
        e["name"] = l.name;
        ojson pts = ojson::array();
        for (const auto& p : l.points) pts.push_back({to_string(p[0]), to_string(p[1])});
        e["points"] = pts;
        ojson regs = ojson::array();
        for (auto r : l.regions) regs.push_back(region_name(r));
        e["regions"] = regs;
        loci.push_back(e);
    }
    j["loci"] = loci;
    ojson pal = ojson::object();
    for (RegionId r : all_regions) pal[region_name(r)] = region_color(r);
    j["palette"] = pal;
    ojson present = ojson::array();
    for (auto r : m.distinct()) present.push_back(region_name(r));
    j["regions_present"] = present;
    return j;
}

inline RegionMap region_map_from_json(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    if (j.value("format", "") != "phasekit-region-map/1") throw ParseError("not a region map document", 1, 1);
    auto q = [](const nlohmann::ordered_json& v) { return parse_rational(v.get<std::string>()); };
    auto region = [](const nlohmann::ordered_json& v) {
        auto r = region_from_name(v.get<std::string>());
        if (!r) throw ParseError("unknown region '" + v.get<std::string>() + "'", 1, 1);
        return *r;
    };
    RegionMap m;
    m.a_range = {q(j["a_range"][0]), q(j["a_range"][1])};
    m.b_range = {q(j["b_range"][0]), q(j["b_range"][1])};
    m.resolution = j["resolution"].get<int>();
    for (const auto& v : j["a_values"]) m.a_values.push_back(q(v));
    for (const auto& v : j["b_values"]) m.b_values.push_back(q(v));
    for (const auto& row : j["cells"])
        for (const auto& c : row) m.cells.push_back(region(c));
    if (m.cells.size() != m.a_values.size() * m.b_values.size()) throw ParseError("cell count does not match the grid", 1, 1);
    for (const auto& e : j["loci"]) {
        Locus l;
        l.name = e["name"].get<std::string>();
        for (const auto& p : e["points"]) l.points.push_back({q(p[0]), q(p[1])});
        for (const auto& r : e["regions"]) l.regions.push_back(region(r));
        m.loci.push_back(std::move(l));
    }
    return m;
}

}  // namespace phasekit
