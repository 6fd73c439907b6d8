#pragma once

// Piecewise-conic invariant circles for parameters with T^n(0, 1) = (0, -1):
// one conic arc per sector between consecutive orbit rays.

#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "circle_map.hpp"
#include "conic.hpp"
#include "core_map.hpp"
#include "errors.hpp"
#include "return_map.hpp"
#include "sector.hpp"

namespace pwlin {

struct CircleOptions {
    std::int64_t rotation_steps = 100000;
    std::int64_t periodic_q_max = 64;  ///< a rotation snap with q up to this is refused
    std::int64_t return_budget = 100000;
    int samples_per_arc = 512;
    double commutation_tol = 1e-8;
    double gap_tol = 1e-6;
    double residual_tol = 1e-8;
    std::int64_t check_orbit_len = 2000;  ///< orbit length for the acceptance residual
    double trace_tol = 1e-9;
};

struct InvariantCircle {
    Params params;
    std::int64_t n = 0;
    std::vector<ConicArc> arcs;  ///< counterclockwise, arc i starts on orbit[i]
    ConicClass conic_class = ConicClass::ELLIPSE;
    double max_residual = 0;
    double max_gap = 0;
    std::vector<OrbitPoint> orbit;         ///< distinguished set, sorted by angle
    std::vector<ReturnMap> return_maps;    ///< one per arc
    RotationEstimate rotation;
};

struct ResidualReport {
    double max_residual = 0;
    std::vector<double> per_sector;
};

/// Index of the arc whose sector contains the direction of p.
inline std::size_t arc_index(const InvariantCircle& circle, const PlanePoint& p) {
    for (std::size_t i = 0; i < circle.arcs.size(); ++i) {
        if (circle.arcs[i].sector.contains(p)) return i;
    }
    // Only reachable through rounding right at a boundary ray.
    std::size_t best = 0;
    double best_d = kTwoPi;
    for (std::size_t i = 0; i < circle.arcs.size(); ++i) {
        const double d = angular_distance(circle.arcs[i].sector.start(), Ray::through(p));
        if (d < best_d) best_d = d, best = i;
    }
    return best;
}

/// |Q_i(p) - level_i| / |level_i| along the orbit of `start` under
/// circle.params, grouped by containing sector.
inline ResidualReport residual_report(const InvariantCircle& circle, std::int64_t orbit_len,
                                      PlanePoint start = {0, 1}) {
    ResidualReport rep;
    rep.per_sector.assign(circle.arcs.size(), 0.0);
    if (circle.arcs.empty()) return rep;
    PlanePoint p = start;
    for (std::int64_t k = 0; k <= orbit_len; ++k) {
        const std::size_t i = arc_index(circle, p);
        const ConicArc& arc = circle.arcs[i];
        const double r = std::fabs(arc.form.value(p) - arc.level) / std::fabs(arc.level);
        rep.per_sector[i] = std::max(rep.per_sector[i], r);
        rep.max_residual = std::max(rep.max_residual, r);
        if (k < orbit_len) p = step(circle.params, p);
    }
    return rep;
}

/// Relative radial distance from p to the circle along p's ray.
inline double radial_distance(const InvariantCircle& circle, const PlanePoint& p) {
    const PlanePoint c = circle.arcs[arc_index(circle, p)].at(p);
    return std::fabs(norm(p) - norm(c)) / norm(c);
}

/// Builds the circle through (0, 1).
///
/// Failure order: an asymptote inside any sector wins (the circle cannot
/// exist whatever the rotation number), then a small-denominator rotation
/// snap, then the first per-sector failure, then the global checks on
/// conic class, arc gaps and residual.
inline InvariantCircle build_invariant_circle(const Params& params, const OrbitRelation& relation,
                                              const CircleOptions& opt = {}) {
    if (!(relation.lambda < 0) || std::fabs(relation.lambda + 1.0) > 1e-6) {
        throw DomainError("circle construction needs T^n(0,1) = (0,-1)");
    }
    InvariantCircle circle;
    circle.params = params;
    circle.n = relation.n;
    circle.rotation = rotation_number(params, UnitPoint::from_angle(1.0), opt.rotation_steps);
    circle.rotation.snap = snap_rational(circle.rotation, opt.periodic_q_max);
    circle.orbit = distinguished_set(params, relation);
    const std::vector<Ray> rays = rays_of(circle.orbit);
    const std::size_t count = rays.size();
    if (count < 2) throw ConstructionError("fewer than two orbit rays");

    std::exception_ptr first_failure;
    std::vector<ConicClass> classes;
    for (std::size_t i = 0; i < count; ++i) {
        try {
            const Sector sector(rays[i], rays[(i + 1) % count]);
            ReturnMapOptions rmo;
            rmo.budget = opt.return_budget;
            ReturnMap rm = return_map(params, sector, rays, rmo);
            if (rm.pieces.empty() || rm.pieces.size() > 2) {
                throw ConstructionError("sector " + std::to_string(i) + " return map has " +
                                        std::to_string(rm.pieces.size()) + " pieces");
            }
            const StepMatrix& m1 = rm.pieces.front().matrix;
            const StepMatrix& m2 = rm.pieces.back().matrix;
            const double comm = commutator_residual(m1, m2);
            if (comm > opt.commutation_tol) {
                throw CommutationError("sector " + std::to_string(i) + " pieces do not commute (residual " +
                                       std::to_string(comm) + ")");
            }
            const QuadraticForm form = invariant_form(m1);
            for (const PlanePoint& v : {PlanePoint{1, 0}, PlanePoint{0, 1}, PlanePoint{0.6, -0.8}}) {
                const PlanePoint w = m2.apply(v);
                const double drift = std::fabs(form.value(w) - form.value(v));
                if (drift > 1e-8 * std::max(1.0, norm(w) * norm(w))) {
                    throw CommutationError("sector " + std::to_string(i) + " second piece does not preserve the form");
                }
            }
            const ConicClass cls = classify_trace(m1.trace(), opt.trace_tol);
            const PlanePoint anchor = circle.orbit[i].point;
            ConicArc arc = arc_in_sector(form, level_through(form, anchor), sector, anchor,
                                         opt.samples_per_arc, cls);
            circle.arcs.push_back(std::move(arc));
            circle.return_maps.push_back(std::move(rm));
            classes.push_back(cls);
        } catch (const AsymptoteInSectorError&) {
            throw;
        } catch (const Error&) {
            if (!first_failure) first_failure = std::current_exception();
        }
    }

    if (circle.rotation.snap) {
        throw PeriodicSuspectError("rotation number snaps to " + circle.rotation.snap->str() +
                                   "; orbit may be periodic rather than on a circle");
    }
    if (first_failure) std::rethrow_exception(first_failure);

    circle.conic_class = classes.front();
    for (ConicClass c : classes) {
        if (c != circle.conic_class) throw ConstructionError("arcs are of different conic types");
    }
    for (std::size_t i = 0; i < count; ++i) {
        const PlanePoint& end = circle.arcs[i].samples.back();
        const PlanePoint& next = circle.arcs[(i + 1) % count].samples.front();
        circle.max_gap = std::max(circle.max_gap, norm(end - next) / norm(next));
    }
    if (circle.max_gap > opt.gap_tol) {
        throw ConstructionError("arcs do not glue: relative gap " + std::to_string(circle.max_gap));
    }
    circle.max_residual = residual_report(circle, opt.check_orbit_len).max_residual;
    if (circle.max_residual > opt.residual_tol) {
        throw ConstructionError("orbit of (0,1) leaves the circle: residual " + std::to_string(circle.max_residual));
    }
    return circle;
}

/// Closed counterclockwise polyline: samples_per_arc points per arc with the
/// shared endpoints kept once, so the last point repeats the first.
inline std::vector<PlanePoint> circle_to_polyline(const InvariantCircle& circle, int samples_per_arc) {
    if (samples_per_arc < 2) throw DomainError("circle_to_polyline: need at least 2 samples per arc");
    std::vector<PlanePoint> out;
    out.reserve(circle.arcs.size() * static_cast<std::size_t>(samples_per_arc));
    for (std::size_t i = 0; i < circle.arcs.size(); ++i) {
        const ConicArc& arc = circle.arcs[i];
        const double start = arc.sector.start().angle();
        for (int k = i == 0 ? 0 : 1; k < samples_per_arc; ++k) {
            PlanePoint u;
            if (k == 0) {
                u = arc.sector.start().point();
            } else if (k == samples_per_arc - 1) {
                u = arc.sector.end().point();
            } else {
                u = UnitPoint::from_angle(start + arc.sector.width() * k / (samples_per_arc - 1)).point();
            }
            out.push_back(arc.at(u));
        }
    }
    return out;
}

} // namespace pwlin
