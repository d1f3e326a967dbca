#pragma once

#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "phasekit/dynamics.hpp"
#include "phasekit/report.hpp"
#include "phasekit/atlas.hpp"

namespace phasekit {

enum class GlyphShape { square, diamond, triangle, circle, cross };

struct Glyph {
    GlyphShape shape = GlyphShape::cross;
    std::string color = "#000000";
    friend bool operator==(const Glyph&, const Glyph&) = default;
};

struct PortraitStyle {
    std::string green = "#1a9641", blue = "#2166ac", red = "#d7191c", black = "#000000", cyan = "#17becf";
    std::string trajectory_color = "#9a9a9a";
    /// background seeds: a ring at this disc radius plus a few near the origin
    int ring_seeds = 24;
    double ring_radius = 0.85;
    int inner_seeds = 8;
    double inner_radius = 0.05;
    double trajectory_width = 0.004, separatrix_width = 0.007, boundary_width = 0.008, continuum_width = 0.012;
    double glyph_size = 0.035;

    /// Defined for every classification.
    Glyph glyph(const Classification& c) const {
        switch (c.kind) {
            case Kind::saddle: return {GlyphShape::square, green};
            case Kind::attracting_node: return {GlyphShape::square, blue};
            case Kind::repelling_node: return {GlyphShape::square, red};
            case Kind::attracting_focus: return {GlyphShape::diamond, blue};
            case Kind::repelling_focus: return {GlyphShape::diamond, red};
            case Kind::center_linear: return {GlyphShape::circle, black};
            case Kind::nilpotent: return {GlyphShape::cross, black};
            case Kind::degenerate_curve: return {GlyphShape::circle, green};
            case Kind::semi_hyperbolic:
                switch (c.sub) {
                    case SemiKind::attracting_node: return {GlyphShape::triangle, blue};
                    case SemiKind::saddle: return {GlyphShape::triangle, green};
                    case SemiKind::repelling_node: return {GlyphShape::triangle, red};
                    default: return {GlyphShape::triangle, black};
                }
        }
        return {GlyphShape::cross, black};
    }
};

/// One drawable item. Coordinates are in the document's user space.
struct Element {
    enum class Type { path, circle, marker, rect, text };
    Type type = Type::path;
    std::string layer;
    /// class attribute: "trajectory", "separatrix unstable", "homoclinic", ...
    std::string cls;
    std::vector<Vec2> points;
    Vec2 at{};
    double size = 0.0;
    std::string stroke = "none", fill = "none";
    double width = 0.0;
    bool closed = false;
    Glyph glyph;
    std::string text;
};

/// Scene with a fixed element order, written out as SVG 1.1.
struct VectorDocument {
    double view_x = -1.1, view_y = -1.1, view_w = 2.2, view_h = 2.2;
    int pixel_w = 640, pixel_h = 640;
    /// mathematical y axis (up) in user space
    bool flip_y = true;
    std::string title;
    std::vector<Element> elements;
    std::vector<std::string> warnings;

    std::size_t count(const std::string& cls) const {
        std::size_t n = 0;
        for (const auto& e : elements)
            if (e.cls == cls || e.cls.rfind(cls + " ", 0) == 0) ++n;
        return n;
    }

    std::string to_svg() const;
};

namespace detail {

inline std::string fmt5(double v) {
    if (std::fabs(v) < 5e-6) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

inline std::string VectorDocument::to_svg() const {
    using detail::fmt5;
    std::ostringstream o;
    auto X = [&](double x) { return fmt5(x); };
    auto Y = [&](double y) { return fmt5(flip_y ? -y : y); };
    double vy = flip_y ? -(view_y + view_h) : view_y;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << pixel_w << "\" height=\"" << pixel_h
      << "\" viewBox=\"" << fmt5(view_x) << " " << fmt5(vy) << " " << fmt5(view_w) << " " << fmt5(view_h) << "\">\n";
    if (!title.empty()) o << "<title>" << detail::xml_escape(title) << "</title>\n";
    if (!warnings.empty()) {
        o << "<metadata>\n";
        for (const auto& w : warnings) o << "<warning>" << detail::xml_escape(w) << "</warning>\n";
        o << "</metadata>\n";
    }
    std::string layer;
    for (const auto& e : elements) {
        if (e.layer != layer) {
            if (!layer.empty()) o << "</g>\n";
            layer = e.layer;
            o << "<g id=\"" << layer << "\">\n";
        }
        std::string cls = e.cls.empty() ? "" : " class=\"" + e.cls + "\"";
        switch (e.type) {
            case Element::Type::path: {
                if (e.points.size() < 2) break;
                o << "<path" << cls << " d=\"M" << X(e.points[0][0]) << " " << Y(e.points[0][1]);
                for (std::size_t k = 1; k < e.points.size(); ++k) o << " L" << X(e.points[k][0]) << " " << Y(e.points[k][1]);
                if (e.closed) o << " Z";
                o << "\" fill=\"" << e.fill << "\" stroke=\"" << e.stroke << "\" stroke-width=\"" << fmt5(e.width)
                  << "\" stroke-linejoin=\"round\"/>\n";
                break;
            }
            case Element::Type::circle:
                o << "<circle" << cls << " cx=\"" << X(e.at[0]) << "\" cy=\"" << Y(e.at[1]) << "\" r=\"" << fmt5(e.size)
                  << "\" fill=\"" << e.fill << "\" stroke=\"" << e.stroke << "\" stroke-width=\"" << fmt5(e.width) << "\"/>\n";
                break;
            case Element::Type::rect:
                o << "<rect" << cls << " x=\"" << X(e.at[0]) << "\" y=\"" << Y(flip_y ? e.at[1] + e.points[0][1] : e.at[1])
                  << "\" width=\"" << fmt5(e.points[0][0]) << "\" height=\"" << fmt5(e.points[0][1]) << "\" fill=\""
                  << e.fill << "\" stroke=\"" << e.stroke << "\" stroke-width=\"" << fmt5(e.width) << "\"/>\n";
                break;
            case Element::Type::text:
                o << "<text" << cls << " x=\"" << X(e.at[0]) << "\" y=\"" << Y(e.at[1]) << "\" font-size=\"" << fmt5(e.size)
                  << "\" font-family=\"sans-serif\" fill=\"" << e.fill << "\">" << detail::xml_escape(e.text) << "</text>\n";
                break;
            case Element::Type::marker: {
                double s = e.size, cx = e.at[0], cy = e.at[1];
                std::string title = e.text.empty() ? "" : "<title>" + detail::xml_escape(e.text) + "</title>";
                const std::string& col = e.glyph.color;
                switch (e.glyph.shape) {
                    case GlyphShape::square:
                        o << "<rect" << cls << " x=\"" << X(cx - s / 2) << "\" y=\"" << Y(cy + (flip_y ? s / 2 : -s / 2))
                          << "\" width=\"" << fmt5(s) << "\" height=\"" << fmt5(s) << "\" fill=\"" << col << "\">" << title
                          << "</rect>\n";
                        break;
                    case GlyphShape::diamond:
                        o << "<polygon" << cls << " points=\"" << X(cx) << "," << Y(cy + s * 0.6) << " " << X(cx + s * 0.6)
                          << "," << Y(cy) << " " << X(cx) << "," << Y(cy - s * 0.6) << " " << X(cx - s * 0.6) << "," << Y(cy)
                          << "\" fill=\"" << col << "\">" << title << "</polygon>\n";
                        break;
                    case GlyphShape::triangle:
                        o << "<polygon" << cls << " points=\"" << X(cx) << "," << Y(cy + s * 0.6) << " " << X(cx + s * 0.55)
                          << "," << Y(cy - s * 0.4) << " " << X(cx - s * 0.55) << "," << Y(cy - s * 0.4) << "\" fill=\"" << col
                          << "\">" << title << "</polygon>\n";
                        break;
                    case GlyphShape::circle:
                        o << "<circle" << cls << " cx=\"" << X(cx) << "\" cy=\"" << Y(cy) << "\" r=\"" << fmt5(s / 2)
                          << "\" fill=\"" << col << "\">" << title << "</circle>\n";
                        break;
                    case GlyphShape::cross:
                        o << "<path" << cls << " d=\"M" << X(cx - s / 2) << " " << Y(cy - s / 2) << " L" << X(cx + s / 2) << " "
                          << Y(cy + s / 2) << " M" << X(cx - s / 2) << " " << Y(cy + s / 2) << " L" << X(cx + s / 2) << " "
                          << Y(cy - s / 2) << "\" stroke=\"" << col << "\" stroke-width=\"" << fmt5(s / 5) << "\" fill=\"none\">"
                          << title << "</path>\n";
                        break;
                }
                break;
            }
        }
    }
    if (!layer.empty()) o << "</g>\n";
    o << "</svg>\n";
    return o.str();
}

struct TraceOptions {
    double offset = 1e-5;
    /// distance of origin seeds along blow-up directions (exceptional coordinate)
    double origin_offset = 2e-3;
    double max_time = 1e3;
    std::size_t max_steps = 60000;
    double box = 1e3;
    double capture_radius = 2e-3;
    /// algebraic approach to a nilpotent point is slow; capture it earlier
    double nilpotent_capture_radius = 1e-2;
};

struct Separatrix {
    /// label of the equilibrium it leaves or enters
    std::string from;
    /// true: part of an unstable manifold (traced forward)
    bool unstable = true;
    Vec2 seed{};
    Trajectory trajectory;
    std::optional<std::string> error;
};

namespace detail {

inline IntegratorOptions trace_integrator(const std::vector<StationaryPoint>& eq, const TraceOptions& t) {
    IntegratorOptions o;
    o.max_time = t.max_time;
    o.max_steps = t.max_steps;
    o.box = {-t.box, t.box, -t.box, t.box};
    o.capture_radius = t.capture_radius;
    o.rel_tol = 1e-8;
    o.abs_tol = 1e-11;
    for (const auto& p : eq) {
        o.equilibria.push_back(p.location());
        bool slow = p.kind.kind == Kind::nilpotent || p.kind.kind == Kind::degenerate_curve;
        o.capture_radii.push_back(slow ? t.nilpotent_capture_radius : t.capture_radius);
    }
    return o;
}

/// Seeds with their time direction, traced in parallel, collected in order.
struct Seed {
    std::string from;
    Vec2 at;
    bool forward;
};

template <class F>
std::vector<Separatrix> run_seeds(const F& field, const std::vector<Seed>& seeds, const IntegratorOptions& opt) {
    std::vector<Separatrix> out(seeds.size());
    unsigned workers = std::max(1u, std::min<unsigned>(atlas_threads(), static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < seeds.size(); k += workers) {
                Separatrix s;
                s.from = seeds[k].from;
                s.unstable = seeds[k].forward;
                s.seed = seeds[k].at;
                try {
                    s.trajectory = integrate(field, seeds[k].at, opt,
                                             seeds[k].forward ? TimeDirection::forward : TimeDirection::backward);
                    if (s.trajectory.termination == Termination::step_underflow) s.error = "step size underflow";
                } catch (const std::exception& e) {
                    s.error = e.what();
                }
                out[k] = std::move(s);
            }
        });
    for (auto& t : pool) t.join();
    return out;
}

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

/// Real eigenvectors of a 2x2 matrix, one per eigenvalue.
inline std::vector<std::pair<double, Vec2>> real_eigenvectors(const Mat2d& J) {
    std::vector<std::pair<double, Vec2>> out;
    auto ev = eigenvalues(J);
    if (ev[0].imag() != 0.0) return out;
    for (const auto& l : ev) {
        double lam = l.real();
        // (J - lam I) v = 0
        Vec2 v1{J.b, lam - J.a}, v2{lam - J.d, J.c};
        Vec2 v = std::hypot(v1[0], v1[1]) >= std::hypot(v2[0], v2[1]) ? v1 : v2;
        double n = std::hypot(v[0], v[1]);
        if (n < 1e-300) v = out.empty() ? Vec2{1, 0} : Vec2{-out[0].second[1], out[0].second[0]}, n = 1;
        out.push_back({lam, {v[0] / n, v[1] / n}});
    }
    return out;
}

inline Vec2 chart_point(Direction d, NewtonWeights w, double e, double t) {
    double s = (d == Direction::pos_x || d == Direction::pos_y) ? 1.0 : -1.0;
    if (is_x_direction(d)) return {s * std::pow(e, w.alpha), std::pow(e, w.beta) * t};
    return {t * std::pow(e, w.alpha), s * std::pow(e, w.beta)};
}

}  // namespace detail

/// Stable and unstable manifolds of saddles and semi-hyperbolic points,
/// and the sector boundary curves at a blown-up origin. Failures are kept
/// per separatrix.
inline std::vector<Separatrix> trace_separatrices(const PolyField& f, const std::vector<StationaryPoint>& eq,
                                                  const SectorDecomposition* origin = nullptr,
                                                  const TraceOptions& topt = {}) {
    std::vector<detail::Seed> seeds;
    NumericField nf = f.numeric();
    for (const auto& p : eq) {
        bool saddle_like = p.kind.kind == Kind::saddle || p.kind.kind == Kind::semi_hyperbolic;
        if (!saddle_like) continue;
        Vec2 z = p.location();
        for (const auto& [lam, v] : detail::real_eigenvectors(p.jacobian)) {
            double eps = topt.offset / std::max(1.0, std::fabs(lam));
            for (int sgn : {1, -1}) {
                Vec2 s{z[0] + sgn * eps * v[0], z[1] + sgn * eps * v[1]};
                Vec2 fv = nf(s);
                double radial = detail::dot(fv, {s[0] - z[0], s[1] - z[1]});
                // hyperbolic directions follow the eigenvalue; the centre
                // direction of a semi-hyperbolic point follows the flow
                bool forward = lam != 0.0 && std::fabs(lam) > 1e-12 ? lam > 0 : radial > 0;
                if (p.kind.kind == Kind::semi_hyperbolic && lam != 0.0 && std::fabs(lam) > 1e-12 &&
                    p.kind.sub != SemiKind::saddle && p.kind.sub != SemiKind::saddle_node)
                    continue;  // a node has no separatrix along its hyperbolic direction
                seeds.push_back({p.label.empty() ? "p" : p.label, s, forward});
            }
        }
    }
    if (origin) {
        for (const auto& c : origin->directions) {
            if (c.transparent) continue;
            double t = c.point.t.value;
            Vec2 s = detail::chart_point(c.chart, origin->weights, topt.origin_offset, t);
            Vec2 fv = nf(s);
            seeds.push_back({"s1", s, detail::dot(fv, s) > 0});
        }
    }
    return detail::run_seeds(nf, seeds, detail::trace_integrator(eq, topt));
}

namespace detail {

inline std::vector<Vec2> disc_path(const std::vector<Vec2>& plane) {
    std::vector<Vec2> out;
    for (const auto& z : plane) {
        if (!std::isfinite(z[0]) || !std::isfinite(z[1])) break;
        Vec2 w = to_disc(z);
        double r = std::hypot(w[0], w[1]);
        if (r > 1.0) w = {w[0] / r, w[1] / r};
        if (!out.empty() && std::hypot(w[0] - out.back()[0], w[1] - out.back()[1]) < 2e-3) continue;
        out.push_back(w);
    }
    if (!plane.empty() && out.size() == 1) out.push_back(to_disc(plane.back()));
    return out;
}

inline Element path(const std::string& layer, const std::string& cls, std::vector<Vec2> pts, const std::string& stroke,
                    double width, bool closed = false) {
    Element e;
    e.type = Element::Type::path;
    e.layer = layer;
    e.cls = cls;
    e.points = std::move(pts);
    e.stroke = stroke;
    e.width = width;
    e.closed = closed;
    return e;
}

inline Element marker(const Vec2& at, const Glyph& g, double size, const std::string& cls, const std::string& title) {
    Element e;
    e.type = Element::Type::marker;
    e.layer = "glyphs";
    e.cls = cls;
    e.at = at;
    e.glyph = g;
    e.size = size;
    e.text = title;
    return e;
}

}  // namespace detail

/// Poincare-disc portrait from an analysis report of f. Layers in order:
/// boundary and continua, background trajectories, separatrices, glyphs.
inline VectorDocument render_portrait(const Report& r, const PolyField& f, const PortraitStyle& style = {},
                                      const TraceOptions& topt = {}) {
    VectorDocument doc;
    doc.title = r.source.empty() ? "phase portrait" : "phase portrait: " + r.source;
    if (r.region) doc.title += " (a=" + to_string(r.region->a) + ", b=" + to_string(r.region->b) + ")";
    doc.warnings = r.diagnostics;

    bool inf_continuum = r.infinity && r.infinity->continuum;
    std::vector<Vec2> circle;
    for (int k = 0; k < 360; ++k) {
        double t = 2 * std::numbers::pi * k / 360;
        circle.push_back({std::cos(t), std::sin(t)});
    }
    doc.elements.push_back(detail::path("continua", inf_continuum ? "boundary continuum" : "boundary", circle,
                                        inf_continuum ? style.cyan : style.black,
                                        inf_continuum ? style.continuum_width : style.boundary_width, true));
    if (f.is_zero()) {
        doc.warnings.push_back("degenerate field: P and Q vanish identically");
        return doc;
    }
    if (r.finite_continuum) {
        if (f.provenance == Provenance::cdk) {
            std::vector<Vec2> c;
            for (int k = 0; k < 360; ++k) {
                double t = 2 * std::numbers::pi * k / 360;
                c.push_back(to_disc({0.5 * std::sin(t), 0.5 + 0.5 * std::cos(t)}));
            }
            doc.elements.push_back(detail::path("continua", "continuum", c, style.green, style.continuum_width, true));
        } else {
            doc.warnings.push_back("stationary curve " + *r.finite_continuum + " not drawn");
        }
    }

    NumericField nf = f.numeric();
    auto iopt = detail::trace_integrator(r.equilibria, topt);
    int origin_index = -1;
    for (std::size_t k = 0; k < r.equilibria.size(); ++k)
        if (r.equilibria[k].location() == Vec2{0.0, 0.0}) origin_index = static_cast<int>(k);

    // background fan, each seed traced both ways
    std::vector<detail::Seed> seeds;
    for (int k = 0; k < style.ring_seeds; ++k) {
        double t = 2 * std::numbers::pi * (k + 0.5) / style.ring_seeds;
        auto z = from_disc({style.ring_radius * std::cos(t), style.ring_radius * std::sin(t)});
        seeds.push_back({"ring", *z, true});
        seeds.push_back({"ring", *z, false});
    }
    for (int k = 0; k < style.inner_seeds; ++k) {
        double t = 2 * std::numbers::pi * (k + 0.5) / style.inner_seeds;
        Vec2 z{style.inner_radius * std::cos(t), style.inner_radius * std::sin(t)};
        seeds.push_back({"inner", z, true});
        seeds.push_back({"inner", z, false});
    }
    auto traced = detail::run_seeds(nf, seeds, iopt);
    for (std::size_t k = 0; k + 1 < traced.size(); k += 2) {
        const auto& fw = traced[k].trajectory;
        const auto& bw = traced[k + 1].trajectory;
        std::vector<Vec2> pts(bw.points.rbegin(), bw.points.rend());
        if (!fw.points.empty()) pts.insert(pts.end(), fw.points.begin() + 1, fw.points.end());
        bool homoclinic = origin_index >= 0 && fw.equilibrium == origin_index && bw.equilibrium == origin_index &&
                          fw.termination == Termination::reached_equilibrium &&
                          bw.termination == Termination::reached_equilibrium;
        for (const auto* s : {&traced[k], &traced[k + 1]})
            if (s->error) doc.warnings.push_back("trajectory from " + s->from + ": " + *s->error);
        doc.elements.push_back(detail::path("trajectories", homoclinic ? "trajectory homoclinic" : "trajectory",
                                            detail::disc_path(pts), style.trajectory_color, style.trajectory_width));
    }

    const SectorDecomposition* origin = r.origin ? &*r.origin : nullptr;
    for (const auto& s : trace_separatrices(f, r.equilibria, origin, topt)) {
        if (s.error) doc.warnings.push_back("separatrix from " + s.from + ": " + *s.error);
        auto pts = detail::disc_path(s.trajectory.points);
        doc.elements.push_back(detail::path("separatrices", s.unstable ? "separatrix unstable" : "separatrix stable", pts,
                                            s.unstable ? style.red : style.blue, style.separatrix_width));
    }

    for (const auto& p : r.equilibria) {
        std::string name = p.label.empty() ? "" : p.label + ": ";
        doc.elements.push_back(detail::marker(to_disc(p.location()), style.glyph(p.kind), style.glyph_size,
                                              "equilibrium " + to_string(p.kind), name + to_string(p.kind)));
    }
    if (r.infinity)
        for (const auto& p : r.infinity->points) {
            for (int side : {0, 1}) {
                double th = p.theta + side * std::numbers::pi;
                const Classification& k = side == 0 ? p.kind : p.antipode_kind;
                doc.elements.push_back(detail::marker({std::cos(th), std::sin(th)}, style.glyph(k), style.glyph_size,
                                                      "infinite " + to_string(k), p.direction_label + (side ? " antipode" : "")));
            }
        }
    return doc;
}

inline VectorDocument render_cdk_portrait(const Rational& a, const Rational& b, const PortraitStyle& style = {},
                                          const TraceOptions& topt = {}) {
    return render_portrait(analyze_cdk(a, b), cdk_field(a, b), style, topt);
}

/// Coloured region map of a scan with its boundary loci and a legend.
inline VectorDocument render_region_map(const RegionMap& m) {
    VectorDocument doc;
    doc.title = "region map";
    const double W = 100.0, H = 100.0, legend = 22.0;
    doc.view_x = -8;
    doc.view_y = -8;
    doc.view_w = W + legend + 14;
    doc.view_h = H + 14;
    doc.pixel_w = 720;
    doc.pixel_h = static_cast<int>(720 * doc.view_h / doc.view_w);
    double alo = m.a_range.lo.get_d(), ahi = m.a_range.hi.get_d(), blo = m.b_range.lo.get_d(), bhi = m.b_range.hi.get_d();
    double aspan = ahi > alo ? ahi - alo : 1.0, bspan = bhi > blo ? bhi - blo : 1.0;
    auto px = [&](double a) { return ahi > alo ? (a - alo) / aspan * W : W / 2; };
    auto py = [&](double b) { return bhi > blo ? (b - blo) / bspan * H : H / 2; };
    std::size_t na = m.a_values.size(), nb = m.b_values.size();
    double cw = W / static_cast<double>(std::max<std::size_t>(na, 1)), ch = H / static_cast<double>(std::max<std::size_t>(nb, 1));
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t i = 0; i < na; ++i) {
            Element e;
            e.type = Element::Type::rect;
            e.layer = "cells";
            RegionId r = m.cells[j * na + i];
            e.cls = std::string("cell r") + region_name(r);
            e.at = {static_cast<double>(i) * cw, static_cast<double>(j) * ch};
            e.points = {{cw, ch}};
            e.fill = region_color(r);
            doc.elements.push_back(e);
        }
    for (const auto& l : m.loci) {
        std::vector<Vec2> pts;
        for (const auto& p : l.points) pts.push_back({px(p[0].get_d()), py(p[1].get_d())});
        if (pts.size() >= 2) {
            doc.elements.push_back(detail::path("loci", "locus", pts, "#ffffff", 0.6));
        } else {
            for (const auto& p : pts) {
                Element e;
                e.type = Element::Type::circle;
                e.layer = "loci";
                e.cls = "locus point";
                e.at = p;
                e.size = 1.2;
                e.fill = "#ffffff";
                e.stroke = "#000000";
                e.width = 0.3;
                doc.elements.push_back(e);
            }
        }
    }
    auto text = [&](Vec2 at, const std::string& s, double size) {
        Element e;
        e.type = Element::Type::text;
        e.layer = "labels";
        e.at = at;
        e.text = s;
        e.size = size;
        e.fill = "#000000";
        doc.elements.push_back(e);
    };
    text({W / 2 - 2, -6}, "a", 4);
    text({-6, H / 2}, "b", 4);
    text({0, -4}, to_string(m.a_range.lo), 3);
    text({W - 4, -4}, to_string(m.a_range.hi), 3);
    text({-6, H - 1}, to_string(m.b_range.hi), 3);
    auto present = m.distinct();
    for (std::size_t k = 0; k < present.size(); ++k) {
        double y = H - 6.0 * static_cast<double>(k) - 4;
        Element e;
        e.type = Element::Type::rect;
        e.layer = "labels";
        e.cls = "legend";
        e.at = {W + 4, y};
        e.points = {{4, 4}};
        e.fill = region_color(present[k]);
        e.stroke = "#000000";
        e.width = 0.2;
        doc.elements.push_back(e);
        text({W + 10, y + 0.5}, region_name(present[k]), 3.5);
    }
    return doc;
}

}  // namespace phasekit
