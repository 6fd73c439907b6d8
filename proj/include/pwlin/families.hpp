#pragma once

// Three one-parameter families b = b(a) on which T^n(0, +-1) = (0, -+1)
// holds identically, with their closed-form return matrices, rotation
// numbers and spectral data; plus a bisection finder for such relations
// along arbitrary lines in parameter space.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "circle_map.hpp"
#include "conic.hpp"
#include "core_map.hpp"
#include "errors.hpp"
#include "return_map.hpp"
#include "sector.hpp"

namespace pwlin {

enum class FamilyId { ExA, ExB, ExC };

inline const char* to_string(FamilyId f) {
    switch (f) {
    case FamilyId::ExA: return "A";
    case FamilyId::ExB: return "B";
    case FamilyId::ExC: return "C";
    }
    return "?";
}

inline FamilyId parse_family(const std::string& s) {
    if (s == "A" || s == "a") return FamilyId::ExA;
    if (s == "B" || s == "b") return FamilyId::ExB;
    if (s == "C" || s == "c") return FamilyId::ExC;
    throw DomainError("unknown family '" + s + "' (expected A, B or C)");
}

/// Open interval of admissible a.
inline std::pair<double, double> family_interval(FamilyId f) {
    switch (f) {
    case FamilyId::ExA: return {1.0, std::numbers::sqrt2};
    case FamilyId::ExB: return {0.0, 1.0};
    case FamilyId::ExC: return {1.0, std::numbers::sqrt2};
    }
    return {0, 0};
}

/// Length of the orbit segment from (0, +-1) to (0, -+1).
inline std::int64_t family_period(FamilyId f) {
    switch (f) {
    case FamilyId::ExA: return 8;
    case FamilyId::ExB: return 10;
    case FamilyId::ExC: return 13;
    }
    return 0;
}

namespace detail {

inline void require_interval(FamilyId f, double a) {
    const auto [lo, hi] = family_interval(f);
    if (!(a > lo && a < hi)) {
        throw DomainError("a = " + std::to_string(a) + " outside (" + std::to_string(lo) + ", " +
                          std::to_string(hi) + ") for family " + to_string(f));
    }
}

template <class F>
double bisect_root(F f, double lo, double hi, double tol) {
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) == (fhi < 0)) throw NoBracketError("no sign change on the bracket");
    auto done = [tol](double l, double r) { return r - l <= tol; };
    const auto r = boost::math::tools::bisect(f, lo, hi, done);
    return (r.first + r.second) / 2;
}

inline double poly(std::initializer_list<double> coeffs, double x) {
    double v = 0;
    for (double c : coeffs) v = v * x + c;
    return v;
}

} // namespace detail

inline double family_b(FamilyId f, double a) {
    detail::require_interval(f, a);
    const double a2 = a * a;
    switch (f) {
    case FamilyId::ExA:
        return (2 * a2 - 2) / (a2 * a - 2 * a);
    case FamilyId::ExB:
        // root of (a^3 - 2a) b^2 - 3(a^2 - 1) b + 2a = 0 in (-sqrt2, 0)
        return (3 * (a2 - 1) + std::sqrt(a2 * a2 - 2 * a2 + 9)) / (2 * a * (a2 - 2));
    case FamilyId::ExC: {
        const double den = a * (a2 - 2) * (a2 - a - 1);
        if (std::fabs(a2 - a - 1) < 1e-12) throw DomainError("family C has a pole at the golden ratio");
        return (a - 1) * (2 * a2 * a - 4 * a - 1) / den;
    }
    }
    throw DomainError("unknown family");
}

inline Params family_params(FamilyId f, double a) { return {a, family_b(f, a)}; }

/// Root of x^4 + 3x^3 + 3x^2 + x - 1 in (0, 1), where family B's return
/// matrices turn from elliptic to hyperbolic.
inline double alpha0() {
    static const double value = detail::bisect_root(
        [](double x) { return detail::poly({1, 3, 3, 1, -1}, x); }, 0.0, 1.0, 1e-16);
    return value;
}

/// a = -b = 2^(1/4), the special point of family A.
inline double special_a_ex_a() { return std::pow(2.0, 0.25); }

/// a = -b = sqrt((sqrt5 - 1) / 2), the special point of family B.
inline double special_a_ex_b() { return std::sqrt((std::sqrt(5.0) - 1) / 2); }

/// a = -b near 1.2358779776, root of x^6 - x^5 - x^4 - 2x^2 + 3x + 1.
inline double special_a_ex_c() {
    static const double value = detail::bisect_root(
        [](double x) { return detail::poly({1, -1, -1, 0, -2, 3, 1}, x); }, 1.2, 1.3, 1e-16);
    return value;
}

/// Closed-form return matrices (M1, M2) on the family's reference sector.
inline std::pair<StepMatrix, StepMatrix> family_matrices(FamilyId f, double a) {
    const double b = family_b(f, a);
    const double a2 = a * a, a3 = a2 * a;
    switch (f) {
    case FamilyId::ExA:
        return {{a, 1 - a2, a2 - 1, 2 * a - a3}, {a2 * a2 - 3 * a2 + 1, 2 * a - a3, a3 - 2 * a, 1 - a2}};
    case FamilyId::ExB:
        return {{(a2 - 1) * b * b - 2 * a * b + 1, (1 - a2) * b + a, (a2 - 1) * b - a, 1 - a2},
                {(1 - a2) * b + a, a2 - 1, 1 - a2, a2 * (a2 - 2) / ((a2 - 1) * b - a)}};
    case FamilyId::ExC: {
        const StepMatrix m1{(a3 - 2 * a) * b * b + (2 - 2 * a2) * b + a, (2 * a - a3) * b + a2 - 1,
                            (a3 - 2 * a) * b - a2 + 1, 2 * a - a3};
        const double c1 = (a2 - a - 1) / (a - 1);
        const double c2 = a2 * (a - 2) * (a2 - 2) * (a2 - 2) / ((a - 1) * (a2 - a - 1));
        return {m1, c1 * m1 + c2 * StepMatrix::identity()};
    }
    }
    throw DomainError("unknown family");
}

/// Itineraries of the two pieces, in the order of family_matrices.
inline std::pair<SignWord, SignWord> family_words(FamilyId f) {
    switch (f) {
    case FamilyId::ExA: return {SignWord::parse("-+++-"), SignWord::parse("++++")};
    case FamilyId::ExB: return {SignWord::parse("-++-"), SignWord::parse("-+++-+++-+++-")};
    case FamilyId::ExC: return {SignWord::parse("-+++-"), SignWord::parse("++++-++++")};
    }
    throw DomainError("unknown family");
}

/// Starting point of the orbit table: (0, -1) for A and C, (0, 1) for B.
inline PlanePoint family_start(FamilyId f) { return f == FamilyId::ExB ? PlanePoint{0, 1} : PlanePoint{0, -1}; }

/// Signs of the x-coordinates of v_1 .. v_(n-1).
inline SignWord family_table_signs(FamilyId f) {
    switch (f) {
    case FamilyId::ExA: return SignWord::parse("+++-+++");
    case FamilyId::ExB: return SignWord::parse("-+++-+++-");
    case FamilyId::ExC: return SignWord::parse("+++-++++-+++");
    }
    throw DomainError("unknown family");
}

/// Reference sector J = [v, v') (orbit indices from family_start) and its
/// breakpoint v*.
struct FamilySector {
    std::int64_t start_index;
    std::int64_t end_index;
    PlanePoint breakpoint;
};

inline FamilySector family_sector(FamilyId f, double a) {
    const double b = family_b(f, a);
    switch (f) {
    case FamilyId::ExA: return {4, 5, {0, -1}};
    case FamilyId::ExB: return {1, 10, {a * a - 1, (a * a - 1) * b - a}};
    case FamilyId::ExC: return {9, 5, {0, -1}};
    }
    throw DomainError("unknown family");
}

/// Larger eigenvalue magnitude of an SL(2) matrix with |tr| >= 2.
inline double dominant_eigenvalue(double trace) {
    const double t = std::fabs(trace);
    if (t < 2) return 1;
    return (t + std::sqrt(t * t - 4)) / 2;
}

/// Rotation number from the closed forms, where one is known.
inline std::optional<double> closed_rotation(FamilyId f, double a) {
    detail::require_interval(f, a);
    constexpr double pi = std::numbers::pi;
    switch (f) {
    case FamilyId::ExA: {
        const double t = std::acos(a / 2);
        return (3 * pi - 7 * t) / (14 * pi - 32 * t);
    }
    case FamilyId::ExB: {
        const double a0 = alpha0();
        if (std::fabs(a - a0) <= 1e-12) return (2 * a0 * a0 + 1) / (9 * a0 * a0 + 4);
        if (a < a0) return std::nullopt;
        const auto [m1, m2] = family_matrices(f, a);
        const double l1 = std::log(dominant_eigenvalue(m1.trace()));
        const double l2 = std::log(dominant_eigenvalue(m2.trace()));
        return (l2 + 3 * l1) / (4 * l2 + 13 * l1);
    }
    case FamilyId::ExC:
        return 0.2;
    }
    return std::nullopt;
}

struct SpectralData {
    std::optional<double> theta;    ///< family A: a = 2 cos(theta)
    std::optional<double> lambda1;  ///< dominant eigenvalue of M1 when hyperbolic
    std::optional<double> lambda2;  ///< dominant eigenvalue of M2 when hyperbolic
    std::vector<std::pair<std::string, double>> minimal_poly_residuals;
};

inline SpectralData spectral_data(FamilyId f, double a) {
    SpectralData s;
    const auto [m1, m2] = family_matrices(f, a);
    if (f == FamilyId::ExA) s.theta = std::acos(a / 2);
    if (std::fabs(m1.trace()) > 2) s.lambda1 = dominant_eigenvalue(m1.trace());
    if (std::fabs(m2.trace()) > 2) s.lambda2 = dominant_eigenvalue(m2.trace());
    constexpr double near = 1e-6;
    switch (f) {
    case FamilyId::ExA:
        if (std::fabs(a - special_a_ex_a()) <= near) {
            const std::complex<double> z = std::polar(1.0, *s.theta);
            const std::complex<double> z2 = z * z;
            const auto v = (((z2 + 4.0) * z2 + 4.0) * z2 + 4.0) * z2 + 1.0;
            s.minimal_poly_residuals.push_back({"z^8+4z^6+4z^4+4z^2+1 at e^(i theta)", std::abs(v)});
        }
        break;
    case FamilyId::ExB:
        if (std::fabs(a - special_a_ex_b()) <= near && s.lambda1 && s.lambda2) {
            s.minimal_poly_residuals.push_back(
                {"x^4-7x^3+13x^2-7x+1 at lambda1", std::fabs(detail::poly({1, -7, 13, -7, 1}, *s.lambda1))});
            s.minimal_poly_residuals.push_back(
                {"x^8+23x^6-77x^4+23x^2+1 at lambda2",
                 std::fabs(detail::poly({1, 0, 23, 0, -77, 0, 23, 0, 1}, *s.lambda2))});
        }
        break;
    case FamilyId::ExC:
        if (std::fabs(a - special_a_ex_c()) <= near) {
            s.minimal_poly_residuals.push_back(
                {"x^6-x^5-x^4-2x^2+3x+1 at a", std::fabs(detail::poly({1, -1, -1, 0, -2, 3, 1}, a))});
        }
        break;
    }
    return s;
}

struct VerificationCheck {
    std::string name;
    bool passed = false;
    double residual = 0;
    std::string detail;
};

struct VerificationReport {
    FamilyId family = FamilyId::ExA;
    double a = 0;
    double b = 0;
    std::int64_t relation_index = 0;  ///< signed n with T^n(0, 1) = (0, -1)
    std::vector<PlanePoint> orbit;    ///< v_0 .. v_n from family_start
    SignWord signs;                   ///< signs of v_1 .. v_(n-1)
    std::optional<ConicClass> regime;
    std::optional<double> closed_rotation;
    RotationEstimate winding;
    bool divergent = false;
    SpectralData spectral;
    std::vector<VerificationCheck> checks;
    std::vector<std::string> notes;

    bool all_passed() const {
        for (const auto& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }
};

struct VerifyOptions {
    std::int64_t rotation_steps = 1000000;
    std::int64_t divergence_steps = 100000;
    double matrix_tol = 1e-9;
};

namespace detail {

inline double relative_matrix_error(const StepMatrix& got, const StepMatrix& want) {
    return max_abs_diff(got, want) / std::max(1.0, want.max_abs());
}

/// max |v_k| / |v_0| over k steps forward and backward from (0, 1).
inline double norm_growth(const Params& p, std::int64_t steps) {
    double growth = 1;
    for (int dir : {1, -1}) {
        PlanePoint v{0, 1};
        for (std::int64_t k = 0; k < steps; ++k) {
            try {
                v = dir > 0 ? step(p, v) : inverse_step(p, v);
            } catch (const OverflowError&) {
                return kOverflowLimit;
            }
            growth = std::max(growth, norm(v));
            if (growth > 1e12) return growth;
        }
    }
    return growth;
}

} // namespace detail

/// Numerical audit of a family member against its closed forms. Failures
/// are recorded in the report, not thrown; only an out-of-range a throws.
inline VerificationReport verify_family(FamilyId f, double a, const VerifyOptions& opt = {}) {
    VerificationReport rep;
    rep.family = f;
    rep.a = a;
    rep.b = family_b(f, a);
    const Params p{rep.a, rep.b};
    const std::int64_t n = family_period(f);
    auto add = [&rep](std::string name, bool ok, double residual, std::string detail = {}) {
        rep.checks.push_back({std::move(name), ok, residual, std::move(detail)});
    };

    if (f == FamilyId::ExB) {
        rep.notes.push_back("orbit table starts at (0,1): v1 = T(0,1) = (-1,0)");
        rep.notes.push_back("b is the root of (a^3-2a)b^2 - 3(a^2-1)b + 2a = 0 in (-sqrt2, 0)");
        rep.notes.push_back("the 4-step piece lies on the counterclockwise second subsector [v*, v10)");
    }
    if (f == FamilyId::ExA) {
        rep.notes.push_back("first piece itinerary -+++- on the open subsector; the boundary ray v4 "
                            "reaches x = 0 at step 5 and reads -++++ under the x = 0 tie rule");
    }

    // orbit table
    try {
        const Orbit orbit = iterate(p, family_start(f), n);
        rep.orbit = orbit.points;
        for (std::int64_t j = 1; j < n; ++j) rep.signs.push_back(sign_of(orbit.points[j].x));
        add("sign table", rep.signs == family_table_signs(f), 0,
            "got " + rep.signs.str() + ", expected " + family_table_signs(f).str());
        const PlanePoint end = orbit.points.back();
        const PlanePoint want = -family_start(f);
        const double err = norm(end - want);
        add("orbit endpoint T^n(v0) = -v0", err <= 1e-9, err);
    } catch (const OverflowError& e) {
        add("sign table", false, 0, e.what());
    }

    // relation index
    if (const auto rel = orbit_relation(p, 4 * n); rel && rel->flips()) {
        rep.relation_index = rel->n;
        const std::int64_t want = f == FamilyId::ExB ? n : -n;
        add("relation index", rel->n == want, std::fabs(rel->lambda + 1),
            "n = " + std::to_string(rel->n) + ", expected " + std::to_string(want));
    } else {
        add("relation index", false, 0, "no lambda = -1 relation found");
    }

    // reference sector, breakpoint, pieces
    const auto [m1_closed, m2_closed] = family_matrices(f, a);
    const auto [w1, w2] = family_words(f);
    if (rep.orbit.size() == static_cast<std::size_t>(n) + 1) {
        const FamilySector fs = family_sector(f, a);
        try {
            std::vector<Ray> rays;
            for (std::int64_t j = 1; j <= n; ++j) rays.push_back(Ray::through(rep.orbit[j]));
            const Sector J(Ray::through(rep.orbit[fs.start_index]), Ray::through(rep.orbit[fs.end_index]));
            const ReturnMap rm = return_map(p, J, rays);
            add("piece count", rm.pieces.size() == 2, 0, std::to_string(rm.pieces.size()) + " pieces");
            if (rm.pieces.size() == 2) {
                const double d = angular_distance(rm.pieces[1].subsector.start(), Ray::through(fs.breakpoint));
                add("breakpoint", d <= 1e-10, d);
            }
            for (const auto& [word, closed, label] :
                 {std::tuple{w1, m1_closed, "M1"}, std::tuple{w2, m2_closed, "M2"}}) {
                const ReturnPiece* hit = nullptr;
                for (const auto& piece : rm.pieces) {
                    if (piece.word == word) hit = &piece;
                }
                if (!hit) {
                    add(std::string(label) + " word", false, 0, "no piece with itinerary " + word.str());
                    continue;
                }
                add(std::string(label) + " word", true, 0, word.str());
                const double err = detail::relative_matrix_error(hit->matrix, closed);
                add(std::string(label) + " matrix", err <= opt.matrix_tol, err);
            }
            if (rm.pieces.size() == 2) {
                const double c = commutator_residual(rm.pieces[0].matrix, rm.pieces[1].matrix);
                add("pieces commute", c <= 1e-9, c);
            }
        } catch (const Error& e) {
            add("return map", false, 0, e.what());
        }
    }

    // trace and regime
    const double tr = m1_closed.trace();
    switch (f) {
    case FamilyId::ExA: {
        const double err = std::fabs(tr - (3 * a - a * a * a));
        add("trace M1 = 3a - a^3", err <= 1e-12, err);
        rep.regime = classify_trace(tr);
        add("regime ELLIPSE", rep.regime == ConicClass::ELLIPSE, std::fabs(tr));
        break;
    }
    case FamilyId::ExB: {
        const double a0 = alpha0();
        const double b = rep.b;
        const double err = std::fabs(tr - ((a * a - 1) * (b * b - 1) - 2 * a * b + 1));
        add("trace M1 closed form", err <= 1e-12, err);
        ConicClass want = ConicClass::ELLIPSE;
        if (std::fabs(a - a0) <= 1e-12) {
            want = ConicClass::PARALLEL_LINES;
            const double berr = std::fabs(b - (a0 * a0 * a0 + 2 * a0 * a0 + a0 - 1));
            add("b(alpha0) = alpha0^3 + 2alpha0^2 + alpha0 - 1", berr <= 1e-12, berr);
        } else if (a > a0) {
            want = ConicClass::HYPERBOLA;
        }
        rep.regime = classify_trace(tr);
        add(std::string("regime ") + to_string(want), rep.regime == want, std::fabs(std::fabs(tr) - 2));
        if (want == ConicClass::HYPERBOLA) {
            // M1 w+ = lambda1 w+ forces M2 w+ = w+ / lambda2
            const double l1 = dominant_eigenvalue(tr);
            const double l2 = dominant_eigenvalue(m2_closed.trace());
            const double s1 = tr < 0 ? -1.0 : 1.0;
            const double mu = s1 * l1;
            PlanePoint w{m1_closed.m12, mu - m1_closed.m11};
            if (norm(w) < 1e-12) w = {mu - m1_closed.m22, m1_closed.m21};
            const PlanePoint img = m2_closed.apply(w);
            const double s2 = m2_closed.trace() < 0 ? -1.0 : 1.0;
            const double e = norm(img - (s2 / l2) * w) / norm(w);
            add("shared eigenvector contracts under M2", e <= 1e-9, e);
        }
        break;
    }
    case FamilyId::ExC:
        rep.regime = classify_trace(tr);
        add("regime HYPERBOLA", rep.regime == ConicClass::HYPERBOLA, std::fabs(tr));
        break;
    }

    // minimal polynomials at the special points
    rep.spectral = spectral_data(f, a);
    for (const auto& [name, r] : rep.spectral.minimal_poly_residuals) {
        const double tol = name.rfind("x^8", 0) == 0 ? 1e-7 : 1e-8;
        add("minimal polynomial " + name, r <= tol, r);
    }

    // rotation number
    rep.winding = rotation_number(p, UnitPoint::from_angle(1.0), opt.rotation_steps);
    rep.winding.snap = snap_rational(rep.winding, 256);
    rep.closed_rotation = closed_rotation(f, a);
    if (rep.closed_rotation) {
        const double d = std::fabs(*rep.closed_rotation - rep.winding.value);
        add("closed-form rotation vs winding", d <= 2 * rep.winding.error_bound, d);
    } else {
        rep.notes.push_back("no closed-form rotation number below alpha0; winding estimate only");
    }

    if (f == FamilyId::ExC) {
        // J' = [(-1,0), (-1,-1)) sits in the first piece and is mapped into itself.
        const Sector jp(Ray::through({-1, 0}), Ray::through({-1, -1}));
        bool inside = true;
        double worst = 0;
        for (const PlanePoint& v : {PlanePoint{-1, 0}, PlanePoint{-1, -0.5}, PlanePoint{-1, -1}}) {
            const PlanePoint img = m1_closed.apply(v);
            const double off = jp.offset(img);
            const bool ok = off <= jp.width() + 1e-12;
            inside = inside && ok;
            worst = std::max(worst, ok ? 0.0 : off - jp.width());
        }
        add("J' mapped into itself", inside, worst);
        const auto rays = eigenrays(m1_closed);
        const Sector J(Ray::through(rep.orbit.size() > 9 ? rep.orbit[9] : PlanePoint{-1, 0}), Ray::through({0, -1}));
        int in_j1 = 0;
        for (const Ray& r : rays) in_j1 += J.contains(r.point()) ? 1 : 0;
        add("two asymptotes in J1", in_j1 == 2, 0, std::to_string(in_j1) + " eigenrays inside");
        const double growth = detail::norm_growth(p, opt.divergence_steps);
        rep.divergent = growth > 1e6;
        add("orbits diverge", rep.divergent, growth);
        const bool snaps = rep.winding.snap && *rep.winding.snap == Rational{1, 5};
        add("rotation snaps to 1/5", snaps, std::fabs(rep.winding.value - 0.2));
    }
    return rep;
}

/// Line (a, b) = (a0 + t da, b0 + t db) in parameter space.
struct Slice {
    double a0 = 0, b0 = 0, da = 1, db = -1;
    Params at(double t) const { return {a0 + t * da, b0 + t * db}; }
};

/// x-coordinate of the direction of T^k(0, 1) (k < 0 runs backward).
inline PlanePoint direction_after(const Params& p, std::int64_t k) {
    PlanePoint v{0, 1};
    const std::int64_t count = k < 0 ? -k : k;
    for (std::int64_t i = 0; i < count; ++i) {
        v = UnitPoint::normalized(k > 0 ? step(p, v) : inverse_step(p, v)).point();
    }
    return v;
}

/// Bisection for T^k(0, 1) on the negative y-axis along a slice.
/// Returns nothing when the sign change is a jump rather than a zero (no
/// lambda = -1 relation at the limit point).
inline std::optional<double> curve_find(std::int64_t k, const Slice& slice, std::pair<double, double> bracket,
                                        double tol = 1e-13) {
    if (k == 0) throw DomainError("curve_find: k must be nonzero");
    auto f = [&](double t) { return direction_after(slice.at(t), k).x; };
    const double t = detail::bisect_root(f, bracket.first, bracket.second, tol);
    const Params p = slice.at(t);
    if (direction_after(p, k).y >= 0) {
        throw SignConstraintError("T^k(0,1) lands on the positive y-axis at t = " + std::to_string(t));
    }
    const auto rel = orbit_relation(p, k < 0 ? -k : k);
    if (!rel || !rel->flips()) return std::nullopt;
    return t;
}

} // namespace pwlin
