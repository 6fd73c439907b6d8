#pragma once

// Heuristic classification of parameter pairs (periodic, circle-like,
// divergent) and data-parallel grid scans.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "circle_map.hpp"
#include "core_map.hpp"
#include "errors.hpp"

namespace pwlin {

enum class Verdict { PERIODIC_CANDIDATE, CIRCLE_CANDIDATE, DIVERGENT, UNDETERMINED };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::PERIODIC_CANDIDATE: return "PERIODIC_CANDIDATE";
    case Verdict::CIRCLE_CANDIDATE: return "CIRCLE_CANDIDATE";
    case Verdict::DIVERGENT: return "DIVERGENT";
    case Verdict::UNDETERMINED: return "UNDETERMINED";
    }
    return "?";
}

struct Evidence {
    double norm_growth = 1;                       ///< max |T^k(0,1)| over both time directions
    std::optional<double> radius_ratio;           ///< forward max/min norm, bounded orbits only
    std::optional<double> near_return_residual;   ///< angle between u0 and S^q(u0)
    std::optional<double> period_matrix_residual; ///< distance of the q-step matrix from +-I
};

struct ClassRecord {
    Params params;
    RotationEstimate rotation;
    Verdict verdict = Verdict::UNDETERMINED;
    std::int64_t period = 0;  ///< q for PERIODIC_CANDIDATE
    Evidence evidence;
    std::optional<std::string> error;  ///< set when the cell could not be classified
};

struct ClassifyOptions {
    double divergence_ratio = 1e6;
    std::int64_t periodic_q_max = 256;
    double period_matrix_tol = 1e-8;
    double circle_radius_ratio = 100;
    std::int64_t circle_q_min = 16;  ///< a snap with q at most this rules out a circle verdict
    double start_angle = 1.0;        ///< u0 for the rotation estimate
};

/// Classifies (a, b) from orbits of length `budget`. Works on the a >= b
/// representative; swapping the slopes is a conjugacy, so the verdict is
/// the same for both orders.
inline ClassRecord classify(const Params& params, std::int64_t budget, const ClassifyOptions& opt = {}) {
    if (budget < 1000) throw DomainError("classify: budget must be at least 1000");
    ClassRecord rec;
    rec.params = params;
    const Params p = params.a >= params.b ? params : swap_conjugate(params);
    const UnitPoint u0 = UnitPoint::from_angle(opt.start_angle);

    rec.rotation = rotation_number(p, u0, budget);
    rec.rotation.snap = snap_rational(rec.rotation, opt.periodic_q_max);

    double fmax = 1, fmin = 1, growth = 1;
    bool overflow = false;
    for (int dir : {1, -1}) {
        PlanePoint v{0, 1};
        for (std::int64_t k = 0; k < budget && !overflow; ++k) {
            try {
                v = dir > 0 ? step(p, v) : inverse_step(p, v);
            } catch (const OverflowError&) {
                overflow = true;
                break;
            }
            const double r = norm(v);
            growth = std::max(growth, r);
            if (dir > 0) {
                fmax = std::max(fmax, r);
                fmin = std::min(fmin, r);
            }
            if (growth > opt.divergence_ratio) break;
        }
        if (growth > opt.divergence_ratio || overflow) break;
    }
    rec.evidence.norm_growth = overflow ? std::numeric_limits<double>::infinity() : growth;
    if (overflow || growth > opt.divergence_ratio) {
        rec.verdict = Verdict::DIVERGENT;
        return rec;
    }
    rec.evidence.radius_ratio = fmax / fmin;

    if (rec.rotation.snap) {
        const std::int64_t q = rec.rotation.snap->q;
        SignWord word;
        UnitPoint u = u0;
        for (std::int64_t k = 0; k < q; ++k) {
            word.push_back(sign_of(u.x()));
            u = s_step(p, u);
        }
        rec.evidence.near_return_residual = angular_distance(Ray{u0}, Ray{u});
        const StepMatrix m = word_matrix(p, word);
        rec.evidence.period_matrix_residual = distance_to_plus_minus_identity(m);
        if (*rec.evidence.period_matrix_residual <= opt.period_matrix_tol) {
            rec.verdict = Verdict::PERIODIC_CANDIDATE;
            rec.period = q;
            return rec;
        }
    }

    const bool small_q = rec.rotation.snap && rec.rotation.snap->q <= opt.circle_q_min;
    rec.verdict = *rec.evidence.radius_ratio < opt.circle_radius_ratio && !small_q ? Verdict::CIRCLE_CANDIDATE
                                                                                   : Verdict::UNDETERMINED;
    return rec;
}

struct ScanSpec {
    double a_min = 0, a_max = 0;
    double b_min = 0, b_max = 0;
    int resolution = 0;        ///< grid points per axis, at most 2048
    std::int64_t budget = 10000;
    bool half_plane = false;   ///< keep only cells with a >= b
    unsigned threads = 0;      ///< 0: hardware concurrency
};

/// Grid axis value i of n over [lo, hi].
inline double grid_value(double lo, double hi, int i, int n) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

/// Classifies every grid cell, row-major in (a, b). Cells are independent;
/// each worker writes only its own slot, so the output order does not depend
/// on scheduling.
inline std::vector<ClassRecord> scan(const ScanSpec& spec, const ClassifyOptions& opt = {}) {
    if (spec.resolution < 0 || spec.resolution > 2048) throw DomainError("scan: resolution must be in [0, 2048]");
    if (spec.budget < 1000) throw DomainError("scan: budget must be at least 1000");
    std::vector<Params> cells;
    if (spec.a_min > spec.a_max || spec.b_min > spec.b_max) return {};
    for (int i = 0; i < spec.resolution; ++i) {
        for (int j = 0; j < spec.resolution; ++j) {
            const Params p{grid_value(spec.a_min, spec.a_max, i, spec.resolution),
                           grid_value(spec.b_min, spec.b_max, j, spec.resolution)};
            if (!spec.half_plane || p.a >= p.b) cells.push_back(p);
        }
    }
    std::vector<ClassRecord> out(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) {
            try {
                out[k] = classify(cells[k], spec.budget, opt);
            } catch (const std::exception& e) {
                out[k].params = cells[k];
                out[k].error = e.what();
            }
        }
    };
    unsigned n = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, cells.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

} // namespace pwlin
