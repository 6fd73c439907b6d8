#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "circle_map.hpp"
#include "core_map.hpp"
#include "errors.hpp"

namespace pwlin {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle into [0, 2 pi).
inline double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0) t += kTwoPi;
    if (t >= kTwoPi) t = 0;
    return t;
}

/// Counterclockwise angle of p in [0, 2 pi).
inline double angle_of(const PlanePoint& p) { return wrap_angle(std::atan2(p.y, p.x)); }

/// A ray from the origin.
struct Ray {
    UnitPoint direction;

    static Ray through(const PlanePoint& p) { return {UnitPoint::normalized(p)}; }
    static Ray at_angle(double theta) { return {UnitPoint::from_angle(theta)}; }

    double angle() const { return direction.angle(); }
    PlanePoint point() const { return direction.point(); }
};

/// Angular distance between two rays, in [0, pi].
inline double angular_distance(const Ray& r, const Ray& s) {
    return std::fabs(std::atan2(cross(r.point(), s.point()), dot(r.point(), s.point())));
}

/// Half-open counterclockwise sector R+[start, end).
///
/// Membership accepts an optional angular tolerance: directions within `tol`
/// of the start ray count as on the start ray (inside), and directions within
/// `tol` of the end ray count as on the end ray (outside). This keeps
/// boundary hits that carry rounding noise on a deterministic side.
class Sector {
public:
    Sector(Ray start, Ray end) : start_(start), end_(end) {
        width_ = wrap_angle(end_.angle() - start_.angle());
        if (width_ <= 1e-12 || width_ >= kTwoPi - 1e-12) {
            throw DomainError("sector endpoints must be separated by more than 1e-12 rad");
        }
    }

    static Sector from_angles(double start, double end) { return {Ray::at_angle(start), Ray::at_angle(end)}; }

    const Ray& start() const noexcept { return start_; }
    const Ray& end() const noexcept { return end_; }
    double width() const noexcept { return width_; }

    /// Counterclockwise angle from the start ray to p, in [0, 2 pi).
    double offset(const PlanePoint& p) const { return wrap_angle(angle_of(p) - start_.angle()); }

    bool contains(const PlanePoint& p, double tol = 0.0) const {
        const double off = offset(p);
        if (tol > 0 && off >= kTwoPi - tol) return true;
        return off < width_ - tol;
    }

    /// Direction at a given offset from the start ray.
    Ray ray_at(double offset) const { return Ray::at_angle(start_.angle() + offset); }

    std::string str() const {
        return "[" + std::to_string(start_.angle()) + ", " + std::to_string(end_.angle()) + ")";
    }

private:
    Ray start_;
    Ray end_;
    double width_ = 0;
};

} // namespace pwlin
