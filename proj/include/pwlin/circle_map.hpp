#pragma once

// The induced circle map S(u) = T(u) / |T(u)| and rotation-number estimates
// from a lift of it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "core_map.hpp"
#include "errors.hpp"

namespace pwlin {

/// A direction, stored as a point on the unit circle.
template <class Real>
class BasicUnitPoint {
public:
    BasicUnitPoint() : x_(1), y_(0) {}

    /// Normalizes p; throws DegenerateError for the origin.
    static BasicUnitPoint normalized(const BasicPoint<Real>& p) {
        const Real r = norm(p);
        if (!(r > 0)) throw DegenerateError("cannot normalize the origin");
        return BasicUnitPoint(p.x / r, p.y / r);
    }

    static BasicUnitPoint from_angle(const Real& theta) {
        using std::cos;
        using std::sin;
        return BasicUnitPoint(cos(theta), sin(theta));
    }

    const Real& x() const noexcept { return x_; }
    const Real& y() const noexcept { return y_; }
    BasicPoint<Real> point() const { return {x_, y_}; }

    /// Counterclockwise angle in [0, 2 pi).
    Real angle() const {
        using std::atan2;
        Real t = atan2(y_, x_);
        if (t < 0) t += boost::math::constants::two_pi<Real>();
        if (t >= boost::math::constants::two_pi<Real>()) t = 0;
        return t;
    }

    friend bool operator==(const BasicUnitPoint&, const BasicUnitPoint&) = default;

private:
    BasicUnitPoint(Real x, Real y) : x_(std::move(x)), y_(std::move(y)) {}
    Real x_, y_;
};

using UnitPoint = BasicUnitPoint<double>;

/// Reduced fraction p/q with q > 0.
struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;

    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Birkhoff average of the lift displacement, in turns.
struct RotationEstimate {
    double value = 0;        ///< raw (not clamped), nominally in [0, 1/2]
    std::int64_t steps = 0;  ///< N
    double error_bound = 0;  ///< 1/N turns
    std::optional<Rational> snap;
};

/// S(u) = T(u)/|T(u)|.
template <class Real>
BasicUnitPoint<Real> s_step(const BasicParams<Real>& params, const BasicUnitPoint<Real>& u) {
    const BasicPoint<Real> p = u.point();
    return BasicUnitPoint<Real>::normalized({params.slope(p.x) * p.x - p.y, p.x});
}

namespace detail {

// Signed angle from u to T(u), reduced into [-pi/2, 3pi/2).
//
// The right half-plane x > 0 maps into the upper half-plane (the image has
// y = x > 0) and x < 0 maps into the lower half-plane, while (0, 1) and
// (0, -1) go to (-1, 0) and (1, 0), a displacement of exactly +pi/2. So on
// each open half-plane the displacement is continuous, strictly between
// -pi/2 and 3pi/2, and equal to pi/2 at the boundary directions; the
// representative in [-pi/2, 3pi/2) is therefore the continuous lift.
template <class Real>
Real displacement_from(const BasicPoint<Real>& u, const BasicPoint<Real>& image) {
    using std::atan2;
    Real d = atan2(cross(u, image), dot(u, image));  // (-pi, pi]
    if (d < -boost::math::constants::half_pi<Real>()) d += boost::math::constants::two_pi<Real>();
    return d;
}

} // namespace detail

/// Lift displacement of S at u, in radians, in [-pi/2, 3pi/2).
template <class Real>
Real lift_displacement(const BasicParams<Real>& params, const BasicUnitPoint<Real>& u) {
    const BasicPoint<Real> p = u.point();
    return detail::displacement_from(p, BasicPoint<Real>{params.slope(p.x) * p.x - p.y, p.x});
}

/// Rotation number from N steps of S starting at u0. The estimate is within
/// 1/N of the true rotation number (lift bound for degree-one monotone maps).
///
/// Displacements are accumulated relative to a quarter turn, so a map that
/// advances exactly pi/2 per step reports exactly 0.25.
template <class Real>
RotationEstimate rotation_number(const BasicParams<Real>& params, const BasicUnitPoint<Real>& u0,
                                 std::int64_t steps) {
    if (steps < 1) throw DomainError("rotation_number: need at least one step");
    const Real quarter = boost::math::constants::half_pi<Real>();
    Real excess = 0;
    BasicUnitPoint<Real> u = u0;
    for (std::int64_t n = 0; n < steps; ++n) {
        const BasicPoint<Real> p = u.point();
        const BasicPoint<Real> image{params.slope(p.x) * p.x - p.y, p.x};
        excess += detail::displacement_from(p, image) - quarter;
        u = BasicUnitPoint<Real>::normalized(image);
    }
    const Real turns = excess / (boost::math::constants::two_pi<Real>() * Real(steps));
    RotationEstimate est;
    est.value = 0.25 + static_cast<double>(turns);
    est.steps = steps;
    est.error_bound = 1.0 / static_cast<double>(steps);
    return est;
}

/// Continued-fraction convergents of x with denominator at most q_max.
inline std::vector<Rational> convergents(double x, std::int64_t q_max) {
    std::vector<Rational> out;
    // h_{-1} = 1, h_{-2} = 0; k_{-1} = 0, k_{-2} = 1
    std::int64_t h = 1, h_prev = 0;
    std::int64_t k = 0, k_prev = 1;
    long double y = x;
    for (int iter = 0; iter < 64; ++iter) {
        const long double fl = std::floor(y);
        if (std::fabs(fl) > 1e15L) break;
        const auto term = static_cast<std::int64_t>(fl);
        const std::int64_t h_next = term * h + h_prev;
        const std::int64_t k_next = term * k + k_prev;
        if (k_next > q_max) break;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        out.push_back({h, k});
        const long double frac = y - fl;
        if (frac < 1e-18L) break;
        y = 1.0L / frac;
    }
    return out;
}

/// First convergent p/q of the estimate with q <= q_max, q^2 <= N/4 and
/// |value - p/q| <= 2/N. A snap is a candidate only; periodicity has to be
/// confirmed separately.
inline std::optional<Rational> snap_rational(const RotationEstimate& est, std::int64_t q_max) {
    if (q_max < 1) throw DomainError("snap_rational: q_max must be >= 1");
    for (const Rational& c : convergents(est.value, q_max)) {
        const double q = static_cast<double>(c.q);
        if (q * q > static_cast<double>(est.steps) / 4.0) break;
        const double tol = std::min(2.0 * est.error_bound, 1.0 / (2.0 * q * q));
        if (std::fabs(est.value - c.value()) <= tol) return c;
    }
    return std::nullopt;
}

} // namespace pwlin
