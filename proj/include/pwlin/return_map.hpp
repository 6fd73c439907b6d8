#pragma once

// First-return maps of T to half-open sectors, and the orbit coincidence
// T^n(0, 1) = (0, lambda) that makes them collapse to two commuting pieces.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circle_map.hpp"
#include "core_map.hpp"
#include "errors.hpp"
#include "sector.hpp"

namespace pwlin {

struct ReturnPiece {
    Sector subsector;
    SignWord word;
    StepMatrix matrix;   ///< word_matrix(word)
    std::int64_t steps;  ///< word.size()
};

struct ReturnMap {
    Sector sector;
    std::vector<ReturnPiece> pieces;  ///< counterclockwise by subsector
};

struct ReturnMapOptions {
    std::int64_t budget = 100000;  ///< max steps for preimage searches and for each return
    double boundary_tol = 1e-11;   ///< rays closer than this (rad) are identified
    double snap_tol = 1e-9;        ///< breakpoints this close to a distinguished ray snap onto it
};

struct PreimageHit {
    Ray ray;
    std::int64_t index;
};

/// Smallest i >= i_min, i <= max_iter, with T^-i(target) in the sector.
/// Iterates directions only, so divergent backward orbits cannot overflow.
inline std::optional<PreimageHit> first_preimage_in(const Params& params, const PlanePoint& target,
                                                    const Sector& sector, std::int64_t i_min,
                                                    std::int64_t max_iter, double tol = 0.0) {
    PlanePoint p = UnitPoint::normalized(target).point();
    for (std::int64_t i = 0; i <= max_iter; ++i) {
        if (i >= i_min && sector.contains(p, tol)) return PreimageHit{Ray::through(p), i};
        p = UnitPoint::normalized(inverse_step(params, p)).point();
    }
    return std::nullopt;
}

namespace detail {

struct FirstReturn {
    SignWord word;
    std::int64_t steps = 0;
};

inline FirstReturn first_return(const Params& params, const Sector& sector, PlanePoint p,
                                std::int64_t budget, double tol) {
    FirstReturn out;
    for (std::int64_t s = 1; s <= budget; ++s) {
        out.word.push_back(sign_of(p.x));
        p = UnitPoint::normalized(step(params, p)).point();
        if (sector.contains(p, tol)) {
            out.steps = s;
            return out;
        }
    }
    throw NoReturnError("no return to sector " + sector.str() + " within " + std::to_string(budget) + " steps");
}

struct Cut {
    double offset;
    Ray ray;
};

} // namespace detail

/// Piecewise-linear first-return map on a sector.
///
/// Candidate breakpoints are the first preimages in the sector of (0, 1),
/// of (0, -1), of the start ray (strict preimages only) and of the end ray;
/// the return map is linear between consecutive candidates. Each resulting
/// subsector is probed at its midpoint and at 1/4 and 3/4 of its width, and
/// the three itineraries must agree.
///
/// `distinguished` rays (orbit points of (0, +-1)) attract breakpoints that
/// land within snap_tol of them, so boundary rays are exact.
inline ReturnMap return_map(const Params& params, const Sector& sector, std::span<const Ray> distinguished = {},
                            const ReturnMapOptions& opt = {}) {
    const double tol = opt.boundary_tol;
    const double width = sector.width();

    std::vector<detail::Cut> cuts;
    auto consider = [&](const std::optional<PreimageHit>& hit) {
        if (!hit) return;
        Ray ray = hit->ray;
        for (const Ray& d : distinguished) {
            if (angular_distance(d, ray) <= opt.snap_tol) {
                ray = d;
                break;
            }
        }
        double off = sector.offset(ray.point());
        if (off >= kTwoPi - tol) off = 0;
        if (off <= tol || off >= width - tol) return;
        cuts.push_back({off, ray});
    };
    consider(first_preimage_in(params, {0, 1}, sector, 0, opt.budget, tol));
    consider(first_preimage_in(params, {0, -1}, sector, 0, opt.budget, tol));
    consider(first_preimage_in(params, sector.start().point(), sector, 1, opt.budget, tol));
    consider(first_preimage_in(params, sector.end().point(), sector, 0, opt.budget, tol));

    std::sort(cuts.begin(), cuts.end(), [](const auto& l, const auto& r) { return l.offset < r.offset; });
    std::vector<detail::Cut> bounds{{0.0, sector.start()}};
    for (const auto& c : cuts) {
        if (c.offset - bounds.back().offset > tol) bounds.push_back(c);
    }
    bounds.push_back({width, sector.end()});

    ReturnMap out{sector, {}};
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const double lo = bounds[k].offset;
        const double hi = bounds[k + 1].offset;
        auto probe = [&](double frac) {
            return detail::first_return(params, sector, sector.ray_at(lo + frac * (hi - lo)).point(), opt.budget,
                                        tol);
        };
        detail::FirstReturn mid = probe(0.5);
        for (double frac : {0.25, 0.75}) {
            if (probe(frac).word != mid.word) {
                throw InconsistentPieceError("itinerary changes inside subsector " + std::to_string(k) +
                                             " of " + sector.str());
            }
        }
        StepMatrix m = word_matrix(params, mid.word);
        out.pieces.push_back({Sector(bounds[k].ray, bounds[k + 1].ray), std::move(mid.word), m, mid.steps});
    }
    return out;
}

/// max|m1 m2 - m2 m1| / max|m1 m2|.
inline double commutator_residual(const StepMatrix& m1, const StepMatrix& m2) {
    const StepMatrix ab = m1 * m2;
    const StepMatrix ba = m2 * m1;
    const double scale = ab.max_abs();
    return scale > 0 ? max_abs_diff(ab, ba) / scale : max_abs_diff(ab, ba);
}

/// T^n(0, 1) = (0, lambda).
struct OrbitRelation {
    std::int64_t n = 0;
    double lambda = 0;
    PlanePoint from{0, 1};
    PlanePoint to{0, 0};

    /// lambda = -1: (0, 1) and (0, -1) share an orbit and the invariant
    /// circle construction applies when the rotation number is irrational.
    bool flips() const { return lambda < 0; }
};

/// Searches forward and backward from (0, 1) for the first iterate on the
/// y-axis (|x| <= tol |v|), trying +k before -k. A hit with lambda < 0 that
/// is not -1 (to 1e-6) is a near miss rather than a relation and is
/// skipped, since a genuine negative relation forces lambda = -1.
inline std::optional<OrbitRelation> orbit_relation(const Params& params, std::int64_t max_iter, double tol = 1e-9) {
    if (max_iter < 1) throw DomainError("orbit_relation: max_iter must be >= 1");
    PlanePoint fwd{0, 1}, bwd{0, 1};
    bool fwd_alive = true, bwd_alive = true;
    auto hit = [&](const PlanePoint& v, std::int64_t n) -> std::optional<OrbitRelation> {
        if (std::fabs(v.x) > tol * norm(v)) return std::nullopt;
        if (v.y < 0 && std::fabs(v.y + 1.0) > 1e-6) return std::nullopt;
        return OrbitRelation{n, v.y, {0, 1}, {0, v.y}};
    };
    auto advance = [](bool& alive, auto&& fn) {
        try {
            fn();
        } catch (const OverflowError&) {
            alive = false;
        }
    };
    for (std::int64_t k = 1; k <= max_iter && (fwd_alive || bwd_alive); ++k) {
        if (fwd_alive) {
            advance(fwd_alive, [&] { fwd = step(params, fwd); });
            if (fwd_alive) {
                if (auto r = hit(fwd, k)) return r;
            }
        }
        if (bwd_alive) {
            advance(bwd_alive, [&] { bwd = inverse_step(params, bwd); });
            if (bwd_alive) {
                if (auto r = hit(bwd, -k)) return r;
            }
        }
    }
    return std::nullopt;
}

struct OrbitPoint {
    std::int64_t index;  ///< j in T^j(start)
    PlanePoint point;
};

/// The |n| orbit points T^j(start), 1 <= j <= |n|, where start is (0, 1)
/// for n > 0 and (0, -1) for n < 0; sorted counterclockwise by angle in
/// [0, 2 pi). These rays cut the plane into the sectors of the circle.
inline std::vector<OrbitPoint> distinguished_set(const Params& params, const OrbitRelation& relation) {
    if (!(relation.lambda < 0) || std::fabs(relation.lambda + 1.0) > 1e-6) {
        throw DomainError("distinguished_set requires a lambda = -1 relation");
    }
    const std::int64_t count = relation.n > 0 ? relation.n : -relation.n;
    PlanePoint p = relation.n > 0 ? PlanePoint{0, 1} : PlanePoint{0, -1};
    std::vector<OrbitPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t j = 1; j <= count; ++j) {
        p = step(params, p);
        out.push_back({j, p});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const OrbitPoint& l, const OrbitPoint& r) { return angle_of(l.point) < angle_of(r.point); });
    return out;
}

inline std::vector<Ray> rays_of(const std::vector<OrbitPoint>& points) {
    std::vector<Ray> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(Ray::through(p.point));
    return out;
}

} // namespace pwlin
