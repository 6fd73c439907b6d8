#pragma once

// Invariant quadratic forms of SL(2, R) matrices and the conic arcs cut out
// of their level sets by a sector.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "core_map.hpp"
#include "errors.hpp"
#include "sector.hpp"

namespace pwlin {

/// Q(x, y) = A x^2 + 2B xy + C y^2.
struct QuadraticForm {
    double A = 0, B = 0, C = 0;

    double value(const PlanePoint& p) const { return A * p.x * p.x + 2 * B * p.x * p.y + C * p.y * p.y; }
    double disc() const { return 4 * B * B - 4 * A * C; }

    /// Scales so that max(|A|, |2B|, |C|) = 1 and the first coefficient of
    /// (A, 2B, C) above 1e-12 in magnitude is positive.
    QuadraticForm normalized() const {
        const double s = std::max({std::fabs(A), std::fabs(2 * B), std::fabs(C)});
        if (!(s > 0)) throw DegenerateMatrixError("zero quadratic form");
        QuadraticForm q{A / s, B / s, C / s};
        for (double v : {q.A, 2 * q.B, q.C}) {
            if (std::fabs(v) > 1e-12) {
                if (v < 0) q = {-q.A, -q.B, -q.C};
                break;
            }
        }
        return q;
    }
};

enum class ConicClass { ELLIPSE, HYPERBOLA, PARALLEL_LINES };

inline const char* to_string(ConicClass c) {
    switch (c) {
    case ConicClass::ELLIPSE: return "ELLIPSE";
    case ConicClass::HYPERBOLA: return "HYPERBOLA";
    case ConicClass::PARALLEL_LINES: return "PARALLEL_LINES";
    }
    return "?";
}

/// A level set through the sector is unbounded because a null direction of
/// the form (an eigenray of the matrix) lies in it.
class AsymptoteInSectorError : public Error {
public:
    AsymptoteInSectorError(const Ray& ray, const std::string& what) : Error(what), ray_(ray) {}
    const Ray& eigenray() const noexcept { return ray_; }

private:
    Ray ray_;
};

namespace detail {

inline void require_sl2(const StepMatrix& m) {
    if (distance_to_plus_minus_identity(m) <= 1e-10) {
        throw DegenerateMatrixError("matrix is +-identity; every form is invariant");
    }
    const double scale = std::max(1.0, m.max_abs() * m.max_abs());
    if (std::fabs(m.det() - 1.0) > 1e-10 * scale) {
        throw DegenerateMatrixError("determinant " + std::to_string(m.det()) + " is not 1");
    }
}

} // namespace detail

/// Form preserved by m = [[a, b], [c, d]]: (A, 2B, C) proportional to
/// (c, d - a, -b), normalized.
inline QuadraticForm invariant_form(const StepMatrix& m) {
    detail::require_sl2(m);
    return QuadraticForm{m.m21, (m.m22 - m.m11) / 2, -m.m12}.normalized();
}

inline ConicClass classify_trace(double trace, double tol = 1e-9) {
    const double t = std::fabs(trace);
    if (t < 2 - tol) return ConicClass::ELLIPSE;
    if (t > 2 + tol) return ConicClass::HYPERBOLA;
    return ConicClass::PARALLEL_LINES;
}

inline ConicClass classify(const StepMatrix& m, double tol = 1e-9) {
    detail::require_sl2(m);
    return classify_trace(m.trace(), tol);
}

inline double level_through(const QuadraticForm& form, const PlanePoint& p) {
    if (p.x == 0 && p.y == 0) throw DegenerateError("level_through: point is the origin");
    return form.value(p);
}

/// Real eigendirections (both signs) when |tr| >= 2; empty otherwise.
inline std::vector<Ray> eigenrays(const StepMatrix& m) {
    const double tr = m.trace();
    const double disc = tr * tr - 4 * m.det();
    std::vector<Ray> out;
    if (disc < 0) return out;
    const double root = std::sqrt(disc);
    for (double mu : {(tr + root) / 2, (tr - root) / 2}) {
        const PlanePoint u{m.m12, mu - m.m11};
        const PlanePoint v{mu - m.m22, m.m21};
        const PlanePoint w = norm(u) >= norm(v) ? u : v;
        if (!(norm(w) > 0)) continue;
        const Ray r = Ray::through(w);
        const bool dup = std::any_of(out.begin(), out.end(), [&](const Ray& s) {
            return angular_distance(r, s) < 1e-12;
        });
        if (!dup) {
            out.push_back(r);
            out.push_back(Ray::through(-w));
        }
        if (root == 0) break;
    }
    return out;
}

/// Directions on which Q vanishes, both signs.
inline std::vector<Ray> null_rays(const QuadraticForm& q) {
    std::vector<Ray> out;
    const double disc = q.disc();
    if (disc < 0) return out;
    const double root = std::sqrt(disc) / 2;
    std::vector<PlanePoint> dirs;
    if (std::fabs(q.C) >= std::fabs(q.A)) {
        // C y^2 + 2B x y + A x^2 = 0 with x = 1
        if (q.C == 0) {
            // A = C = 0: Q = 2B x y vanishes on the axes
            if (q.B == 0) return out;
            dirs = {{1, 0}, {0, 1}};
        } else {
            dirs = {{q.C, -q.B + root}, {q.C, -q.B - root}};
        }
    } else {
        dirs = {{-q.B + root, q.A}, {-q.B - root, q.A}};
    }
    for (const auto& d : dirs) {
        if (!(norm(d) > 0)) continue;
        out.push_back(Ray::through(d));
        out.push_back(Ray::through(-d));
    }
    return out;
}

/// Piece of the level set {Q = level} over a sector. Samples run
/// counterclockwise from the start ray to the end ray inclusive.
struct ConicArc {
    QuadraticForm form;
    double level = 0;
    Sector sector;
    PlanePoint anchor;
    std::vector<PlanePoint> samples;
    ConicClass cls = ConicClass::ELLIPSE;

    /// Point of the arc in direction u (u inside the sector).
    PlanePoint at(const PlanePoint& u) const {
        const PlanePoint d = UnitPoint::normalized(u).point();
        return std::sqrt(level / form.value(d)) * d;
    }
};

/// Samples the level set through the sector in polar form
/// r(phi) = sqrt(level / Q(u(phi))), uniform in phi. The level set meets each
/// ray of the sector at most once on the anchor's side, so this traces the
/// component through the anchor for all three conic types; it is bounded
/// exactly when no null direction of Q lies in the closed sector.
inline ConicArc arc_in_sector(const QuadraticForm& form, double level, const Sector& sector,
                              const PlanePoint& anchor, int n_samples = 512,
                              std::optional<ConicClass> cls = std::nullopt) {
    if (n_samples < 2) throw DomainError("arc_in_sector: need at least 2 samples");
    if (std::fabs(form.value(anchor) - level) > 1e-9 * std::max(1.0, std::fabs(level))) {
        throw DomainError("arc_in_sector: anchor is not on the level set");
    }
    if (!sector.contains(anchor, 1e-9)) throw DomainError("arc_in_sector: anchor outside sector");

    for (const Ray& r : null_rays(form)) {
        if (sector.offset(r.point()) <= sector.width() + 1e-12 || sector.offset(r.point()) >= kTwoPi - 1e-12) {
            throw AsymptoteInSectorError(r, "asymptote at angle " + std::to_string(r.angle()) +
                                                " lies in sector " + sector.str());
        }
    }

    ConicArc arc{form, level, sector, anchor, {}, ConicClass::ELLIPSE};
    if (cls) {
        arc.cls = *cls;
    } else {
        const double d = form.disc();
        arc.cls = d < -1e-9 ? ConicClass::ELLIPSE : d > 1e-9 ? ConicClass::HYPERBOLA : ConicClass::PARALLEL_LINES;
    }
    arc.samples.reserve(static_cast<std::size_t>(n_samples));
    const double start = sector.start().angle();
    for (int k = 0; k < n_samples; ++k) {
        PlanePoint u;
        if (k == 0) {
            u = sector.start().point();
        } else if (k == n_samples - 1) {
            u = sector.end().point();
        } else {
            u = UnitPoint::from_angle(start + sector.width() * k / (n_samples - 1)).point();
        }
        const double q = form.value(u);
        if (!(q / level > 0)) {
            throw AsymptoteInSectorError(Ray::through(u), "level set does not cross the ray at angle " +
                                                              std::to_string(angle_of(u)));
        }
        arc.samples.push_back(std::sqrt(level / q) * u);
    }
    return arc;
}

} // namespace pwlin
