#pragma once

// Reference computations used by the tests. Each is written from scratch
// in the most direct way available and shares no code with the library
// beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

struct P {
    double x, y;
};

// T by its defining cases, long double inside.
inline P step(double a, double b, P p) {
    const long double x = p.x, y = p.y;
    if (x >= 0) return {static_cast<double>(a * x - y), static_cast<double>(x)};
    return {static_cast<double>(b * x - y), static_cast<double>(x)};
}

inline P inverse(double a, double b, P p) {
    // solve (F(x) x - y, x) = p for (x, y): x = p.y, y = F(p.y) p.y - p.x
    const double x = p.y;
    const double f = x >= 0 ? a : b;
    return {x, f * x - p.x};
}

// 2x2 as array {m11, m12, m21, m22}.
struct M {
    double v[4];
};

inline M mul(const M& l, const M& r) {
    return {{l.v[0] * r.v[0] + l.v[1] * r.v[2], l.v[0] * r.v[1] + l.v[1] * r.v[3],
             l.v[2] * r.v[0] + l.v[3] * r.v[2], l.v[2] * r.v[1] + l.v[3] * r.v[3]}};
}

inline M power(const M& m, int k) {
    M r{{1, 0, 0, 1}};
    for (int i = 0; i < k; ++i) r = mul(m, r);
    return r;
}

inline double max_abs(const M& m) {
    double r = 0;
    for (double v : m.v) r = std::max(r, std::fabs(v));
    return r;
}

// Every p/q with q <= q_max within tol of x, smallest q first.
inline std::optional<std::pair<long, long>> brute_force_fraction(double x, long q_max, double tol) {
    for (long q = 1; q <= q_max; ++q) {
        for (long p = 0; p <= q; ++p) {
            if (std::fabs(x - static_cast<double>(p) / q) <= tol) return std::pair{p, q};
        }
    }
    return std::nullopt;
}

// Winding of a closed polyline about the origin, via summed atan2 steps.
inline double winding_number(const std::vector<P>& poly) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const P& u = poly[i];
        const P& w = poly[i + 1];
        total += std::atan2(u.x * w.y - u.y * w.x, u.x * w.x + u.y * w.y);
    }
    return total / (2 * std::numbers::pi);
}

// Plain bisection with midpoint evaluation.
template <class F>
double bisection(F f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Distance from q to the segment [u, w].
inline double segment_distance(P q, P u, P w) {
    const double dx = w.x - u.x, dy = w.y - u.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((q.x - u.x) * dx + (q.y - u.y) * dy) / len2 : 0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(q.x - (u.x + t * dx), q.y - (u.y + t * dy));
}

inline double polyline_distance(P q, const std::vector<P>& poly) {
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) best = std::min(best, segment_distance(q, poly[i], poly[i + 1]));
    return best;
}

// Random SL(2) matrix exp-like: rotation * diag(s, 1/s) * shear.
inline M random_sl2(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), sc(0.3, 3), sh(-2, 2);
    const double t = ang(rng), s = sc(rng), h = sh(rng);
    const M rot{{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}};
    const M diag{{s, 0, 0, 1 / s}};
    const M shear{{1, h, 0, 1}};
    return mul(rot, mul(diag, shear));
}

} // namespace oracle
