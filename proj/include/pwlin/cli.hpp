#pragma once

// Command-line front end. run_cli() does all the work and reports through
// the given streams so that tests can drive it in-process.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "circle_builder.hpp"
#include "circle_map.hpp"
#include "core_map.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "io.hpp"
#include "return_map.hpp"
#include "scanner.hpp"

namespace pwlin {

/// Mantissa bits selected by PWLIN_PRECISION: 53 (double, default), 64
/// (long double) or 113 (binary128 via boost::multiprecision).
inline int precision_from_env() {
    const char* v = std::getenv("PWLIN_PRECISION");
    if (!v || !*v) return 53;
    const std::string s(v);
    if (s == "53" || s == "64" || s == "113") return std::stoi(s);
    throw DomainError("PWLIN_PRECISION must be 53, 64 or 113, got '" + s + "'");
}

namespace detail {

using Quad = boost::multiprecision::cpp_bin_float_quad;

/// Calls fn(Real{}) with the scalar type selected by the environment.
template <class Fn>
auto with_precision(Fn&& fn) {
    switch (precision_from_env()) {
    case 64: return fn(static_cast<long double>(0));
    case 113: return fn(Quad(0));
    default: return fn(0.0);
    }
}

template <class Real>
std::vector<PlanePoint> orbit_as_double(const Params& p, const PlanePoint& start, std::int64_t n) {
    const BasicParams<Real> rp{Real(p.a), Real(p.b)};
    const auto orbit = iterate(rp, BasicPoint<Real>{Real(start.x), Real(start.y)}, n);
    std::vector<PlanePoint> out;
    out.reserve(orbit.points.size());
    for (const auto& q : orbit.points) out.push_back({static_cast<double>(q.x), static_cast<double>(q.y)});
    return out;
}

inline std::string fmt(double v) { return format_double(v); }

inline void print_matrix(std::ostream& out, const StepMatrix& m) {
    out << "[[" << fmt(m.m11) << ", " << fmt(m.m12) << "], [" << fmt(m.m21) << ", " << fmt(m.m22) << "]]";
}

} // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pwlin: the two-slope area-preserving map T(x,y) = (F(x)x - y, x)"};
    app.require_subcommand(1);

    double a = 0, b = 0, x = 0, y = 1;
    std::int64_t n = 1000, N = 100000, q_max = 256, budget = 100000, points = 10000;
    double angle = 1.0, start = 0, end = 0, tol = 1e-13;
    std::string out_path, svg_path, json_path, family = "A";
    double a_min = 0, a_max = 0, b_min = 0, b_max = 0;
    int resolution = 0;
    unsigned threads = 0;
    bool half_plane = false;
    std::int64_t k = 0;
    double a0 = 0, b0 = 0, da = 1, db = -1, lo = 0, hi = 0;
    std::int64_t max_iter = 1000;

    auto add_ab = [&](CLI::App* c) {
        c->add_option("-a,--a", a, "slope for x >= 0")->required();
        c->add_option("-b,--b", b, "slope for x < 0")->required();
    };

    auto* orbit = app.add_subcommand("orbit", "iterate a point; CSV to --out (or stdout), optional SVG");
    add_ab(orbit);
    orbit->add_option("-x,--x", x, "start x")->capture_default_str();
    orbit->add_option("-y,--y", y, "start y")->capture_default_str();
    orbit->add_option("-n,--n", n, "iterations (negative runs backward)")->capture_default_str();
    orbit->add_option("--out", out_path, "CSV path");
    orbit->add_option("--svg", svg_path, "SVG plot path");

    auto* rotation = app.add_subcommand("rotation", "rotation number of the circle map");
    add_ab(rotation);
    rotation->add_option("-N,--N", N, "steps")->capture_default_str();
    rotation->add_option("--q-max", q_max, "largest snap denominator")->capture_default_str();
    rotation->add_option("--angle", angle, "start direction in radians")->capture_default_str();

    auto* rmap = app.add_subcommand("return-map", "first-return map on the sector [start, end)");
    add_ab(rmap);
    rmap->add_option("--start", start, "sector start angle (rad)")->required();
    rmap->add_option("--end", end, "sector end angle (rad)")->required();
    rmap->add_option("--budget", budget, "step budget")->capture_default_str();
    rmap->add_option("--json", json_path, "JSON path");

    auto* circle = app.add_subcommand("circle", "build the piecewise-conic invariant circle through (0,1)");
    add_ab(circle);
    circle->add_option("--max-iter", max_iter, "orbit relation search length")->capture_default_str();
    circle->add_option("--svg", svg_path, "SVG path (orbit plus circle)");
    circle->add_option("--json", json_path, "JSON path");
    circle->add_option("--points", points, "orbit points in the SVG")->capture_default_str();

    auto* verify = app.add_subcommand("verify-example", "check a family member against its closed forms");
    verify->add_option("--family", family, "A, B or C")->required();
    verify->add_option("-a,--a", a, "parameter a")->required();
    verify->add_option("-N,--N", N, "winding steps")->default_val(1000000);
    verify->add_option("--json", json_path, "JSON path");

    auto* scan_cmd = app.add_subcommand("scan", "classify a parameter grid");
    scan_cmd->add_option("--a-min", a_min)->required();
    scan_cmd->add_option("--a-max", a_max)->required();
    scan_cmd->add_option("--b-min", b_min)->required();
    scan_cmd->add_option("--b-max", b_max)->required();
    scan_cmd->add_option("--resolution", resolution, "points per axis")->required();
    scan_cmd->add_option("--budget", budget, "orbit length per cell")->default_val(10000);
    scan_cmd->add_option("--threads", threads, "worker threads (0: all cores)")->capture_default_str();
    scan_cmd->add_flag("--half-plane", half_plane, "only a >= b");
    scan_cmd->add_option("--csv", out_path, "CSV path");
    scan_cmd->add_option("--json", json_path, "JSON path");

    auto* trace = app.add_subcommand("trace-curve", "find T^k(0,1) = (0,-1) along a line in (a,b)");
    trace->add_option("-k,--k", k, "iterate index (negative: backward)")->required();
    trace->add_option("--a0", a0)->capture_default_str();
    trace->add_option("--b0", b0)->capture_default_str();
    trace->add_option("--da", da)->capture_default_str();
    trace->add_option("--db", db)->capture_default_str();
    trace->add_option("--lo", lo, "bracket start")->required();
    trace->add_option("--hi", hi, "bracket end")->required();
    trace->add_option("--tol", tol)->capture_default_str();

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 1;
    }

    try {
        const Params p{a, b};
        if (orbit->parsed()) {
            const auto pts = detail::with_precision(
                [&](auto zero) { return detail::orbit_as_double<decltype(zero)>(p, {x, y}, n); });
            const std::string csv = orbit_csv(pts);
            if (out_path.empty()) {
                out << csv;
            } else {
                write_file(out_path, csv);
            }
            if (!svg_path.empty()) write_file(svg_path, svg_document(pts, std::nullopt, 800, 800));
        } else if (rotation->parsed()) {
            const RotationEstimate est = detail::with_precision([&](auto zero) {
                using Real = decltype(zero);
                return rotation_number(BasicParams<Real>{Real(a), Real(b)},
                                       BasicUnitPoint<Real>::from_angle(Real(angle)), N);
            });
            const auto snap = snap_rational(est, q_max);
            out << "value " << detail::fmt(est.value) << "\n"
                << "error_bound " << detail::fmt(est.error_bound) << "\n"
                << "snap " << (snap ? snap->str() : "none") << "\n";
        } else if (rmap->parsed()) {
            ReturnMapOptions opt;
            opt.budget = budget;
            const ReturnMap rm = return_map(p, Sector::from_angles(start, end), {}, opt);
            out << "sector " << rm.sector.str() << "\n" << "pieces " << rm.pieces.size() << "\n";
            for (std::size_t i = 0; i < rm.pieces.size(); ++i) {
                const auto& pc = rm.pieces[i];
                out << "piece " << i << " [" << detail::fmt(pc.subsector.start().angle()) << ", "
                    << detail::fmt(pc.subsector.end().angle()) << ") word " << pc.word.str() << " steps " << pc.steps
                    << " matrix ";
                detail::print_matrix(out, pc.matrix);
                out << "\n";
            }
            if (rm.pieces.size() >= 2) {
                out << "commutator " << detail::fmt(commutator_residual(rm.pieces[0].matrix, rm.pieces[1].matrix))
                    << "\n";
            }
            if (!json_path.empty()) write_file(json_path, dump(to_json(rm)));
        } else if (circle->parsed()) {
            const auto rel = orbit_relation(p, max_iter);
            if (!rel || !rel->flips()) {
                throw DomainError("no relation T^n(0,1) = (0,-1) within " + std::to_string(max_iter) + " steps");
            }
            InvariantCircle c;
            try {
                c = build_invariant_circle(p, *rel);
            } catch (const AsymptoteInSectorError& e) {
                throw DomainError(std::string("asymptote in sector, no invariant circle (orbits diverge): ") +
                                  e.what());
            }
            out << "relation n " << rel->n << "\n"
                << "arcs " << c.arcs.size() << "\n"
                << "class " << to_string(c.conic_class) << "\n"
                << "max_residual " << detail::fmt(c.max_residual) << "\n"
                << "max_gap " << detail::fmt(c.max_gap) << "\n"
                << "rotation " << detail::fmt(c.rotation.value) << "\n";
            if (!json_path.empty()) write_file(json_path, dump(to_json(c)));
            if (!svg_path.empty()) {
                const auto pts = iterate(p, {0, 1}, points).points;
                write_file(svg_path, svg_document(pts, circle_to_polyline(c, 512), 800, 800));
            }
        } else if (verify->parsed()) {
            VerifyOptions opt;
            opt.rotation_steps = N;
            const VerificationReport rep = verify_family(parse_family(family), a, opt);
            out << "family " << to_string(rep.family) << " a " << detail::fmt(rep.a) << " b " << detail::fmt(rep.b)
                << "\n"
                << "relation index " << (rep.relation_index < 0 ? -rep.relation_index : rep.relation_index)
                << " (n = " << rep.relation_index << ")\n"
                << "signs " << rep.signs.str() << "\n";
            for (const auto& c : rep.checks) {
                out << (c.passed ? "PASS " : "FAIL ") << c.name << " residual " << detail::fmt(c.residual);
                if (!c.detail.empty()) out << " (" << c.detail << ")";
                out << "\n";
            }
            for (const auto& note : rep.notes) out << "note " << note << "\n";
            if (!json_path.empty()) write_file(json_path, dump(to_json(rep)));
            if (!rep.all_passed()) {
                err << "verification failed\n";
                return 1;
            }
        } else if (scan_cmd->parsed()) {
            ScanSpec spec{a_min, a_max, b_min, b_max, resolution, budget, half_plane, threads};
            const auto records = scan(spec);
            if (!out_path.empty()) write_file(out_path, scan_csv(records));
            if (!json_path.empty()) write_file(json_path, dump(to_json(records)));
            if (out_path.empty() && json_path.empty()) out << scan_csv(records);
            else out << "cells " << records.size() << "\n";
        } else if (trace->parsed()) {
            const auto t = curve_find(k, Slice{a0, b0, da, db}, {lo, hi}, tol);
            if (!t) throw DomainError("sign change is a jump, not a relation T^k(0,1) = (0,-1)");
            const Params q = Slice{a0, b0, da, db}.at(*t);
            out << "t " << detail::fmt(*t) << "\n" << "a " << detail::fmt(q.a) << "\n" << "b " << detail::fmt(q.b)
                << "\n";
        }
        return 0;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace pwlin
