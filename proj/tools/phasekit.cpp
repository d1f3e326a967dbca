#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "phasekit/portrait.hpp"

using namespace phasekit;

namespace {

/// Bad flags or an unusable system source.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string system;
    std::string a, b;
    std::vector<std::string> params;
    std::string output;
    std::string format = "json";
    bool stamp = false;
    double tol = 1e-10;
    std::string box = "-4,4,-4,4";
    // index / omega
    std::string center = "0,0";
    double radius = 0.1;
    int samples = 4096;
    std::string start;
    double max_time = 1e4;
    double capture = 1e-6;
    bool dump = false;
    // scan / portrait
    std::string a_range = "0,3", b_range = "0,3";
    int resolution = 200;
    std::string map;
};

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
        }
    }
    if (out.size() != n) throw UsageError(std::string(what) + " needs " + std::to_string(n) + " comma-separated numbers");
    return out;
}

Rational parse_param(const std::string& name, const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const DomainError& e) {
        throw UsageError("parameter " + name + ": " + e.what());
    }
}

ParamRange parse_range(const std::string& s, const char* what) {
    auto c = s.find(',');
    if (c == std::string::npos) throw UsageError(std::string(what) + " needs lo,hi");
    return {parse_param(what, s.substr(0, c)), parse_param(what, s.substr(c + 1))};
}

/// The system named by --system, with every parameter bound.
struct Loaded {
    enum class Source { cdk, sprott, file } source = Source::file;
    std::string name;
    std::optional<Rational> a, b;
    std::optional<SystemSpec> spec;
    std::optional<PolyField> field;
};

Loaded load(const Options& o) {
    Loaded L;
    L.name = o.system;
    if (o.system.empty()) throw UsageError("no system given; use --system cdk|sprott|<file>");
    if (o.system == "cdk") {
        L.source = Loaded::Source::cdk;
        if (o.a.empty()) throw UsageError("missing parameter binding: a");
        if (o.b.empty()) throw UsageError("missing parameter binding: b");
        L.a = parse_param("a", o.a);
        L.b = parse_param("b", o.b);
        if (*L.a <= 0 || *L.b <= 0) throw PreconditionError("cdk needs a > 0 and b > 0");
        L.spec = cdk_spec(*L.a, *L.b);
        L.field = cdk_field(*L.a, *L.b);
        return L;
    }
    if (o.system == "sprott") {
        L.source = Loaded::Source::sprott;
        return L;
    }
    std::ifstream in(o.system);
    if (!in) throw UsageError("cannot read system file '" + o.system + "'");
    std::stringstream text;
    text << in.rdbuf();
    std::vector<Parameter> bind;
    if (!o.a.empty()) bind.push_back({"a", parse_param("a", o.a)});
    if (!o.b.empty()) bind.push_back({"b", parse_param("b", o.b)});
    for (const auto& p : o.params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("--param needs name=value, got '" + p + "'");
        std::string n = p.substr(0, eq);
        bind.push_back({n, parse_param(n, p.substr(eq + 1))});
    }
    SystemSpec spec = parse_system(text.str());
    // only bind what the file declares; --a/--b are harmless extras
    std::vector<Parameter> used;
    for (const auto& p : bind)
        if (spec.find(p.name)) used.push_back(p);
        else if (p.name != "a" && p.name != "b") throw UsageError("unknown parameter '" + p.name + "'");
    spec = parse_system(text.str(), used);
    auto missing = unbound_parameters(spec);
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
        throw UsageError("missing parameter binding: " + names);
    }
    L.spec = spec;
    L.field = to_poly_field(spec);
    return L;
}

ReportFormat format_of(const Options& o) { return o.format == "human" ? ReportFormat::human : ReportFormat::json; }

Box box_of(const Options& o) {
    auto v = parse_list(o.box, 4, "--box");
    return {v[0], v[1], v[2], v[3]};
}

std::string stamp_line() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void emit(const Options& o, const std::string& text) {
    if (o.output.empty() || o.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + o.output + "'");
    out << text;
}

std::string json_text(nlohmann::ordered_json j, const Options& o) {
    if (o.stamp) j["generated"] = stamp_line();
    return j.dump(2) + "\n";
}

std::string report_text(const Report& r, const Options& o) {
    if (format_of(o) == ReportFormat::json) return json_text(report_json(r), o);
    std::string s = format_report(r, ReportFormat::human);
    if (o.stamp) s += "generated: " + stamp_line() + "\n";
    return s;
}

Report full_report(const Loaded& L, const Options& o) {
    if (L.source == Loaded::Source::cdk) return analyze_cdk(*L.a, *L.b);
    Report r = analyze_system(*L.spec, box_of(o), o.tol);
    r.source = L.name;
    return r;
}

void require_rational(const Loaded& L, const char* what) {
    if (L.source == Loaded::Source::sprott)
        throw PreconditionError(std::string("the sprott fixture is logarithmic; ") + what + " needs a rational system");
}

std::string sprott_text(const Options& o) {
    Vec2 p = sprott_fixed_point();
    Classification k = sprott_fixed_point_kind();
    if (format_of(o) == ReportFormat::human) {
        std::ostringstream s;
        s << "system: sprott\n  x' = ln|x| - y\n  y' = ln|x| + x\nequilibria: 1\n  (" << format_double(p[0]) << ", "
          << format_double(p[1]) << ")  " << to_string(k) << "\n";
        return s.str();
    }
    nlohmann::ordered_json j;
    j["format"] = "phasekit-report/1";
    j["source"] = "sprott";
    j["equilibria"] = nlohmann::ordered_json::array(
        {{{"x", detail::round12(p[0])}, {"y", detail::round12(p[1])}, {"kind", to_string(k)}}});
    return json_text(j, o);
}

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int cmd_analyze(const Options& o) {
    Loaded L = load(o);
    if (L.source == Loaded::Source::sprott) {
        emit(o, sprott_text(o));
        return 0;
    }
    emit(o, report_text(full_report(L, o), o));
    return 0;
}

int cmd_stationary(const Options& o) {
    Loaded L = load(o);
    if (L.source == Loaded::Source::sprott) {
        emit(o, sprott_text(o));
        return 0;
    }
    Report r;
    r.source = L.name;
    r.system = L.spec;
    if (L.source == Loaded::Source::cdk) {
        auto st = cdk_stationary_points(*L.a, *L.b);
        r.equilibria = st.points;
        if (st.circle) r.finite_continuum = "x^2 + y^2 - y = 0";
    } else {
        auto s = find_stationary(*L.field, box_of(o), o.tol);
        r.equilibria = s.points;
        if (s.continuum) r.finite_continuum = s.continuum_factor.to_string() + " = 0";
    }
    emit(o, report_text(r, o));
    return 0;
}

int cmd_blowup(const Options& o) {
    Loaded L = load(o);
    require_rational(L, "blowup");
    const PolyField& f = *L.field;
    if (f.is_zero()) throw PreconditionError("field vanishes identically");
    if (f.P.coeff(0, 0) != 0 || f.Q.coeff(0, 0) != 0) throw PreconditionError("origin is not a stationary point");
    Classification k = classify_at(f, 0, 0);
    if (k.kind != Kind::nilpotent) throw PreconditionError("origin is " + to_string(k) + ", not nilpotent");
    SectorDecomposition d = classify_nilpotent_origin(f);
    if (format_of(o) == ReportFormat::json) {
        nlohmann::ordered_json j;
        j["format"] = "phasekit-blowup/1";
        j["source"] = L.name;
        auto charts = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < d.charts.size(); ++i) {
            const auto& c = d.charts[i];
            nlohmann::ordered_json e;
            e["direction"] = direction_name(c.direction);
            e["P"] = c.field.P.to_string();
            e["Q"] = c.field.Q.to_string();
            if (i < d.divisors.size()) {
                e["divisor_polynomial"] = d.divisors[i].divisor_polynomial.to_string("t");
                auto pts = nlohmann::ordered_json::array();
                for (const auto& p : d.divisors[i].points)
                    pts.push_back({{"t", p.t.exact ? detail::exact_number(*p.t.exact)
                                                   : detail::approx_number(p.t.value, p.t.error_bound)},
                                   {"kind", to_string(p.point.kind)}});
                e["points"] = pts;
            }
            charts.push_back(e);
        }
        j["charts"] = charts;
        j["origin"] = detail::origin_json(d);
        emit(o, json_text(j, o));
        return 0;
    }
    std::ostringstream s;
    s << "weights (" << d.weights.alpha << "," << d.weights.beta << ")\n";
    for (std::size_t i = 0; i < d.charts.size(); ++i) {
        const auto& c = d.charts[i];
        s << direction_name(c.direction) << " chart\n  P = " << c.field.P.to_string() << "\n  Q = " << c.field.Q.to_string()
          << "\n";
        if (i < d.divisors.size()) {
            const auto& dv = d.divisors[i];
            s << "  divisor: " << dv.divisor_polynomial.to_string("t") << (dv.continuum ? " (stationary)" : "") << "\n";
            for (const auto& p : dv.points)
                s << "    t = " << (p.t.exact ? to_string(*p.t.exact) : format_double(p.t.value)) << "  "
                  << to_string(p.point.kind) << "\n";
        }
    }
    s << "sectors:";
    for (const auto& sec : d.sectors) s << " " << sector_name(sec.type);
    s << "\nindex " << d.index << ", homoclinic " << (d.homoclinic ? "yes" : "no") << "\n";
    emit(o, s.str());
    return 0;
}

int cmd_infinity(const Options& o) {
    Loaded L = load(o);
    require_rational(L, "infinity");
    const PolyField& f = *L.field;
    if (f.is_zero()) throw PreconditionError("field vanishes identically");
    InfinityAnalysis inf = infinite_stationary_points(f);
    UPoly F = infinity_polynomial(f, ChartId::U1), G = infinity_polynomial(f, ChartId::U2);
    if (format_of(o) == ReportFormat::json) {
        nlohmann::ordered_json j;
        j["format"] = "phasekit-infinity/1";
        j["source"] = L.name;
        j["F"] = F.to_string("u");
        j["G"] = G.to_string("u");
        j["infinity"] = detail::infinity_json(inf);
        emit(o, json_text(j, o));
        return 0;
    }
    std::ostringstream s;
    s << "F(u) = " << F.to_string("u") << "   (U1 chart)\nG(u) = " << G.to_string("u") << "   (U2 chart)\n";
    if (inf.continuum)
        s << "every point at infinity is stationary; transverse eigenvalue " << inf.continuum_transverse.to_string("u")
          << " (U1), " << to_string(inf.continuum_transverse_y) << " at u = 0 (U2)\n";
    for (const auto& p : inf.points)
        s << p.direction_label << "  u = " << detail::human_coord(p.u) << "  " << to_string(p.kind) << ", antipode "
          << to_string(p.antipode_kind) << "\n";
    emit(o, s.str());
    return 0;
}

int cmd_index(const Options& o) {
    Loaded L = load(o);
    auto c = parse_list(o.center, 2, "--center");
    if (!(o.radius > 0)) throw UsageError("--radius must be positive");
    std::vector<Vec2> eq;
    if (L.source == Loaded::Source::sprott) {
        eq.push_back(sprott_fixed_point());
    } else if (L.source == Loaded::Source::cdk) {
        auto st = cdk_stationary_points(*L.a, *L.b);
        if (st.circle) {
            double d = std::hypot(c[0], c[1] - 0.5);
            if (d + 0.5 >= o.radius - 1e-9 && std::fabs(d - 0.5) <= o.radius + 1e-9)
                throw PreconditionError("the circle of stationary points meets the index circle");
        }
        for (const auto& p : st.points) eq.push_back(p.location());
    } else {
        double R = std::hypot(c[0], c[1]) + o.radius + 1;
        for (const auto& p : find_stationary(*L.field, {-R, R, -R, R}, o.tol).points) eq.push_back(p.location());
    }
    for (const auto& e : eq)
        if (std::fabs(std::hypot(e[0] - c[0], e[1] - c[1]) - o.radius) <= 1e-9 * std::max(1.0, o.radius))
            throw PreconditionError("equilibrium (" + g12(e[0]) + ", " + g12(e[1]) + ") lies on the index circle");
    IndexResult r;
    if (L.source == Loaded::Source::sprott)
        r = index_on_circle_detail(sprott_field(), {c[0], c[1]}, o.radius, o.samples);
    else
        r = index_on_circle_detail(L.field->numeric(), {c[0], c[1]}, o.radius, o.samples);
    if (format_of(o) == ReportFormat::json) {
        nlohmann::ordered_json j;
        j["index"] = r.index;
        j["winding"] = detail::round12(r.winding);
        emit(o, json_text(j, o));
    } else {
        emit(o, std::to_string(r.index) + "\n");
    }
    return 0;
}

int cmd_omega(const Options& o) {
    Loaded L = load(o);
    if (o.start.empty()) throw UsageError("omega needs --start x,y");
    auto s = parse_list(o.start, 2, "--start");
    IntegratorOptions io;
    io.max_time = o.max_time;
    io.capture_radius = o.capture;
    io.record = o.dump;
    std::vector<std::string> labels;
    OmegaLimit w;
    if (L.source == Loaded::Source::sprott) {
        io.equilibria.push_back(sprott_fixed_point());
        labels.push_back("p");
        w = omega_limit(sprott_field(), {s[0], s[1]}, io);
    } else {
        std::vector<StationaryPoint> eq;
        if (L.source == Loaded::Source::cdk && !cdk_stationary_points(*L.a, *L.b).circle)
            eq = cdk_stationary_points(*L.a, *L.b).points;
        else
            eq = find_stationary(*L.field, box_of(o), o.tol).points;
        for (const auto& p : eq) {
            io.equilibria.push_back(p.location());
            labels.push_back(p.label);
        }
        w = omega_limit(L.field->numeric(), {s[0], s[1]}, io);
    }
    std::ostringstream out;
    if (o.dump) {
        for (std::size_t k = 0; k < w.trajectory.points.size(); ++k)
            out << g12(w.trajectory.tau[k]) << ", " << g12(w.trajectory.points[k][0]) << ", "
                << g12(w.trajectory.points[k][1]) << "\n";
    } else if (format_of(o) == ReportFormat::json) {
        nlohmann::ordered_json j;
        j["resolved"] = w.resolved;
        j["termination"] = termination_name(w.trajectory.termination);
        if (w.resolved) {
            j["omega"] = {detail::round12(w.point[0]), detail::round12(w.point[1])};
            std::string lab = labels[static_cast<std::size_t>(w.equilibrium)];
            if (!lab.empty()) j["label"] = lab;
        }
        j["end"] = {detail::round12(w.trajectory.end()[0]), detail::round12(w.trajectory.end()[1])};
        j["steps"] = w.trajectory.steps;
        out << json_text(j, o);
    } else {
        if (w.resolved) {
            std::string lab = labels[static_cast<std::size_t>(w.equilibrium)];
            out << "omega: (" << g12(w.point[0]) << ", " << g12(w.point[1]) << ")" << (lab.empty() ? "" : " " + lab) << "\n";
        } else {
            out << "unresolved: " << termination_name(w.trajectory.termination) << " at (" << g12(w.trajectory.end()[0])
                << ", " << g12(w.trajectory.end()[1]) << ")\n";
        }
    }
    emit(o, out.str());
    return 0;
}

int cmd_region(const Options& o) {
    if (o.a.empty()) throw UsageError("missing parameter binding: a");
    if (o.b.empty()) throw UsageError("missing parameter binding: b");
    Rational a = parse_param("a", o.a), b = parse_param("b", o.b);
    if (a <= 0 || b <= 0) throw PreconditionError("regions are defined for a > 0 and b > 0");
    Report r;
    r.region = region_summary(a, b);
    if (format_of(o) == ReportFormat::json) {
        emit(o, json_text(detail::region_json(*r.region), o));
    } else {
        std::string text = format_report(r, ReportFormat::human);
        emit(o, text.substr(text.find("region:")));
    }
    return 0;
}

int cmd_scan(const Options& o) {
    auto ar = parse_range(o.a_range, "--a-range"), br = parse_range(o.b_range, "--b-range");
    if (o.resolution < 1) throw UsageError("--resolution must be positive");
    RegionMap m = scan_grid(ar, br, o.resolution);
    if (format_of(o) == ReportFormat::json) {
        emit(o, json_text(region_map_json(m), o));
        return 0;
    }
    std::ostringstream s;
    std::map<std::string, std::size_t> counts;
    for (auto c : m.cells) ++counts[region_name(c)];
    s << "grid " << o.resolution << "x" << o.resolution << ", " << m.distinct().size() << " regions\n";
    for (auto r : m.distinct()) {
        std::size_t n = counts[region_name(r)];
        s << "  " << region_name(r) << "  " << (n ? std::to_string(n) + " cells" : std::string("on boundary loci only")) << "\n";
    }
    emit(o, s.str());
    return 0;
}

int cmd_portrait(const Options& o) {
    VectorDocument doc;
    if (!o.map.empty()) {
        std::ifstream in(o.map);
        if (!in) throw UsageError("cannot read map '" + o.map + "'");
        std::stringstream t;
        t << in.rdbuf();
        RegionMap m;
        try {
            m = region_map_from_json(t.str());
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("bad map document: ") + e.what());
        }
        doc = render_region_map(m);
    } else {
        Loaded L = load(o);
        require_rational(L, "portrait");
        if (L.source == Loaded::Source::cdk) {
            doc = render_cdk_portrait(*L.a, *L.b);
        } else {
            Report r = full_report(L, o);
            doc = render_portrait(r, *L.field);
        }
    }
    if (o.stamp) doc.title += " " + stamp_line();
    for (const auto& w : doc.warnings) std::cerr << "warning: " << w << "\n";
    emit(o, doc.to_svg());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qualitative analysis of planar rational vector fields"};
    app.require_subcommand(1);
    Options o;

    auto add_system = [&](CLI::App* s) {
        s->add_option("--system", o.system, "cdk, sprott, or a system file")->required();
        s->add_option("--a", o.a, "parameter a (n/d or decimal)");
        s->add_option("--b", o.b, "parameter b (n/d or decimal)");
        s->add_option("--param", o.params, "name=value binding for a system file");
        s->add_option("--tol", o.tol, "stationary-point tolerance");
        s->add_option("--box", o.box, "search box xmin,xmax,ymin,ymax");
    };
    auto add_output = [&](CLI::App* s) {
        s->add_option("-o,--output", o.output, "output file (default: stdout)");
        s->add_option("--format", o.format, "json or human")->check(CLI::IsMember({"json", "human"}));
        s->add_flag("--stamp", o.stamp, "add a generation timestamp");
    };

    std::map<std::string, std::function<int(const Options&)>> run;
    auto sub = [&](const char* name, const char* help, std::function<int(const Options&)> fn, bool system = true) {
        auto* s = app.add_subcommand(name, help);
        if (system) add_system(s);
        add_output(s);
        run[name] = std::move(fn);
        return s;
    };
    sub("analyze", "stationary points, origin blow-up, infinity and region in one report", cmd_analyze);
    sub("stationary", "finite stationary points", cmd_stationary);
    sub("blowup", "blow-up charts and sectors of a nilpotent origin", cmd_blowup);
    sub("infinity", "stationary points at infinity", cmd_infinity);
    auto* idx = sub("index", "index of the field along a circle", cmd_index);
    idx->add_option("--center", o.center, "x,y");
    idx->add_option("--radius", o.radius, "circle radius");
    idx->add_option("--samples", o.samples, "samples on the circle");
    auto* om = sub("omega", "forward limit of a trajectory", cmd_omega);
    om->add_option("--start", o.start, "x,y")->required();
    om->add_option("--max-time", o.max_time, "time limit");
    om->add_option("--capture", o.capture, "capture radius");
    om->add_flag("--dump", o.dump, "print the trajectory as tau, x, y lines");
    auto* rg = sub("region", "region of the parameter plane", cmd_region, false);
    rg->add_option("--a", o.a, "parameter a")->required();
    rg->add_option("--b", o.b, "parameter b")->required();
    auto* sc = sub("scan", "region map over a parameter grid", cmd_scan, false);
    sc->add_option("--a-range", o.a_range, "lo,hi");
    sc->add_option("--b-range", o.b_range, "lo,hi");
    sc->add_option("--resolution", o.resolution, "cells per axis");
    auto* po = app.add_subcommand("portrait", "SVG phase portrait on the Poincare disc, or a region map");
    po->add_option("--system", o.system, "cdk, sprott, or a system file");
    po->add_option("--a", o.a, "parameter a");
    po->add_option("--b", o.b, "parameter b");
    po->add_option("--param", o.params, "name=value binding for a system file");
    po->add_option("--map", o.map, "render a scan map document instead");
    po->add_option("-o,--output", o.output, "output file (default: stdout)");
    po->add_flag("--stamp", o.stamp, "add a generation timestamp");
    run["portrait"] = cmd_portrait;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    auto* chosen = app.get_subcommands().front();
    if (chosen->get_name() == "portrait" && o.map.empty() == o.system.empty()) {
        std::cerr << "error: portrait needs exactly one of --system or --map\n";
        return 2;
    }
    try {
        return run[chosen->get_name()](o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const UnboundParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalInconsistencyError& e) {
        std::cerr << "internal inconsistency: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
