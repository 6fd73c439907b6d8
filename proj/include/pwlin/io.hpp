#pragma once

// CSV, JSON and SVG output. All writers are deterministic: same input, same
// bytes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "circle_builder.hpp"
#include "circle_map.hpp"
#include "core_map.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "return_map.hpp"
#include "scanner.hpp"

namespace pwlin {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "v1";

/// Shortest-safe decimal: 17 significant digits.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path, "cannot open for writing");
    f << content;
    f.flush();
    if (!f) throw IoError(path, "write failed");
}

// ---- CSV ----

inline std::string orbit_csv(const std::vector<PlanePoint>& points) {
    std::string s = "n,x,y\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
        s += std::to_string(k) + "," + format_double(points[k].x) + "," + format_double(points[k].y) + "\n";
    }
    return s;
}

inline void emit_orbit_csv(const Params& params, const PlanePoint& start, std::int64_t n, const std::string& path) {
    if (n < 0) throw DomainError("emit_orbit_csv: n must be >= 0");
    write_file(path, orbit_csv(iterate(params, start, n).points));
}

/// Parses a file produced by orbit_csv.
inline std::vector<PlanePoint> read_orbit_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError(path, "cannot open for reading");
    std::string line;
    if (!std::getline(f, line) || line != "n,x,y") throw IoError(path, "missing n,x,y header");
    std::vector<PlanePoint> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) throw IoError(path, "malformed row: " + line);
        out.push_back({std::stod(line.substr(c1 + 1, c2 - c1 - 1)), std::stod(line.substr(c2 + 1))});
    }
    return out;
}

inline std::string scan_csv(const std::vector<ClassRecord>& records) {
    std::string s = "a,b,rotation,snap,verdict,period,norm_growth,error\n";
    for (const auto& r : records) {
        s += format_double(r.params.a) + "," + format_double(r.params.b) + "," + format_double(r.rotation.value) +
             "," + (r.rotation.snap ? r.rotation.snap->str() : "") + "," + (r.error ? "ERROR" : to_string(r.verdict)) +
             "," + std::to_string(r.period) + "," + format_double(r.evidence.norm_growth) + "," +
             (r.error ? "\"" + *r.error + "\"" : "") + "\n";
    }
    return s;
}

// ---- JSON ----

namespace detail {

inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json matrix_json(const StepMatrix& m) { return Json::array({m.m11, m.m12, m.m21, m.m22}); }

} // namespace detail

inline Json to_json(const RotationEstimate& r) {
    Json j;
    j["value"] = r.value;
    j["steps"] = r.steps;
    j["error_bound"] = r.error_bound;
    j["snap"] = r.snap ? Json(r.snap->str()) : Json(nullptr);
    return j;
}

inline Json to_json(const ClassRecord& r) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["a"] = r.params.a;
    j["b"] = r.params.b;
    j["rotation"] = r.rotation.value;
    j["rotation_error_bound"] = r.rotation.error_bound;
    j["snap"] = r.rotation.snap ? Json(r.rotation.snap->str()) : Json(nullptr);
    j["verdict"] = r.error ? "ERROR" : to_string(r.verdict);
    j["period"] = r.period;
    j["norm_growth"] = detail::finite_or_null(r.evidence.norm_growth);
    j["radius_ratio"] = detail::optional_number(r.evidence.radius_ratio);
    j["near_return_residual"] = detail::optional_number(r.evidence.near_return_residual);
    j["period_matrix_residual"] = detail::optional_number(r.evidence.period_matrix_residual);
    j["error"] = r.error ? Json(*r.error) : Json(nullptr);
    return j;
}

inline Json to_json(const std::vector<ClassRecord>& records) {
    Json arr = Json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr;
}

inline Json to_json(const VerificationReport& r) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["family"] = to_string(r.family);
    j["a"] = r.a;
    j["b"] = r.b;
    j["relation_index"] = r.relation_index;
    j["signs"] = r.signs.str();
    j["regime"] = r.regime ? Json(to_string(*r.regime)) : Json(nullptr);
    j["closed_rotation"] = detail::optional_number(r.closed_rotation);
    j["winding_rotation"] = r.winding.value;
    j["winding_steps"] = r.winding.steps;
    j["winding_snap"] = r.winding.snap ? Json(r.winding.snap->str()) : Json(nullptr);
    j["divergent"] = r.divergent;
    j["theta"] = detail::optional_number(r.spectral.theta);
    j["lambda1"] = detail::optional_number(r.spectral.lambda1);
    j["lambda2"] = detail::optional_number(r.spectral.lambda2);
    j["all_passed"] = r.all_passed();
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"detail", c.detail}});
    }
    j["checks"] = checks;
    j["notes"] = r.notes;
    return j;
}

inline Json to_json(const ReturnMap& rm) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["sector_start"] = rm.sector.start().angle();
    j["sector_end"] = rm.sector.end().angle();
    Json pieces = Json::array();
    for (const auto& p : rm.pieces) {
        pieces.push_back(Json{{"start", p.subsector.start().angle()},
                              {"end", p.subsector.end().angle()},
                              {"word", p.word.str()},
                              {"steps", p.steps},
                              {"matrix", detail::matrix_json(p.matrix)},
                              {"trace", p.matrix.trace()}});
    }
    j["pieces"] = pieces;
    return j;
}

inline Json to_json(const InvariantCircle& c) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["a"] = c.params.a;
    j["b"] = c.params.b;
    j["n"] = c.n;
    j["conic_class"] = to_string(c.conic_class);
    j["arc_count"] = c.arcs.size();
    j["max_residual"] = c.max_residual;
    j["max_gap"] = c.max_gap;
    j["rotation"] = c.rotation.value;
    Json arcs = Json::array();
    for (std::size_t i = 0; i < c.arcs.size(); ++i) {
        const ConicArc& arc = c.arcs[i];
        arcs.push_back(Json{{"orbit_index", c.orbit[i].index},
                            {"sector_start", arc.sector.start().angle()},
                            {"sector_end", arc.sector.end().angle()},
                            {"form_a", arc.form.A},
                            {"form_b", arc.form.B},
                            {"form_c", arc.form.C},
                            {"level", arc.level},
                            {"anchor_x", arc.anchor.x},
                            {"anchor_y", arc.anchor.y}});
    }
    j["arcs"] = arcs;
    return j;
}

/// Two-space indented JSON with a trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- SVG ----

struct PlotSpec {
    Params params;
    PlanePoint start{0, 1};
    std::int64_t iterations = 10000;
    std::string path;
    int width = 800;
    int height = 800;
    std::optional<std::vector<PlanePoint>> overlay;  ///< certified circle polyline
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

inline std::string fixed3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace detail

/// Orbit points as 0.5 px dots, optional overlay polyline, axes through
/// the origin. The view is the 1%-99% quantile box of the points plus a 5%
/// margin, widened to the canvas aspect ratio.
inline std::string svg_document(const std::vector<PlanePoint>& points,
                                const std::optional<std::vector<PlanePoint>>& overlay, int width, int height) {
    if (width <= 0 || height <= 0) throw DomainError("svg: canvas must be positive");
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    const std::vector<PlanePoint>* basis = !points.empty() ? &points : (overlay && !overlay->empty() ? &*overlay : nullptr);
    if (basis) {
        std::vector<double> xs, ys;
        xs.reserve(basis->size());
        ys.reserve(basis->size());
        for (const auto& p : *basis) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        x0 = detail::quantile(xs, 0.01);
        x1 = detail::quantile(xs, 0.99);
        y0 = detail::quantile(ys, 0.01);
        y1 = detail::quantile(ys, 0.99);
    }
    double w = std::max(x1 - x0, 1e-12), h = std::max(y1 - y0, 1e-12);
    x0 -= 0.05 * w, x1 += 0.05 * w, y0 -= 0.05 * h, y1 += 0.05 * h;
    w = x1 - x0, h = y1 - y0;
    const double aspect = static_cast<double>(width) / height;
    if (w / h < aspect) {
        const double grow = h * aspect - w;
        x0 -= grow / 2, x1 += grow / 2, w = x1 - x0;
    } else {
        const double grow = w / aspect - h;
        y0 -= grow / 2, y1 += grow / 2, h = y1 - y0;
    }
    const double scale = width / w;
    auto px = [&](double x) { return detail::fixed3((x - x0) * scale); };
    auto py = [&](double y) { return detail::fixed3((y1 - y) * scale); };

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g stroke=\"#999999\" stroke-width=\"0.5\">\n"
      << "<line x1=\"0\" y1=\"" << py(0) << "\" x2=\"" << width << "\" y2=\"" << py(0) << "\"/>\n"
      << "<line x1=\"" << px(0) << "\" y1=\"0\" x2=\"" << px(0) << "\" y2=\"" << height << "\"/>\n"
      << "</g>\n";
    if (!points.empty()) {
        s << "<g fill=\"black\">\n";
        for (const auto& p : points) s << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"0.5\"/>\n";
        s << "</g>\n";
    }
    if (overlay && !overlay->empty()) {
        s << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\" points=\"";
        for (std::size_t k = 0; k < overlay->size(); ++k) {
            s << (k ? " " : "") << px((*overlay)[k].x) << "," << py((*overlay)[k].y);
        }
        s << "\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

inline void emit_svg(const PlotSpec& spec) {
    if (spec.iterations < 0 || spec.iterations > 10000000) throw DomainError("svg: iterations must be in [0, 1e7]");
    std::vector<PlanePoint> points;
    if (spec.iterations > 0) points = iterate(spec.params, spec.start, spec.iterations).points;
    write_file(spec.path, svg_document(points, spec.overlay, spec.width, spec.height));
}

} // namespace pwlin
