#pragma once

// The two-slope plane map T(x, y) = (F(x) x - y, x), F(x) = a for x >= 0 and
// b for x < 0, together with its inverse, sign itineraries and the 2x2
// matrix cocycle along an orbit.
//
// Everything here is templated on the scalar type so that an extended
// precision backend (long double, boost::multiprecision) can be swapped in
// without touching call sites. The rest of the library instantiates double.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace pwlin {

/// Magnitude above which an orbit component is treated as overflow.
inline constexpr double kOverflowLimit = 1e300;

template <class Real>
struct BasicParams {
    Real a{};  ///< slope for x >= 0
    Real b{};  ///< slope for x < 0

    /// mu = (a - b) / 2, so that a = nu + mu and b = nu - mu.
    Real mu() const { return (a - b) / 2; }
    Real nu() const { return (a + b) / 2; }

    /// Slope selected by the sign of x. x = 0 takes the a-branch.
    Real slope(const Real& x) const { return x >= 0 ? a : b; }

    static BasicParams from_mu_nu(const Real& mu, const Real& nu) { return {nu + mu, nu - mu}; }

    friend bool operator==(const BasicParams&, const BasicParams&) = default;
};

/// A point of the plane, read as a column vector (x, y).
template <class Real>
struct BasicPoint {
    Real x{};
    Real y{};

    friend bool operator==(const BasicPoint&, const BasicPoint&) = default;
    friend BasicPoint operator+(const BasicPoint& p, const BasicPoint& q) { return {p.x + q.x, p.y + q.y}; }
    friend BasicPoint operator-(const BasicPoint& p, const BasicPoint& q) { return {p.x - q.x, p.y - q.y}; }
    friend BasicPoint operator-(const BasicPoint& p) { return {-p.x, -p.y}; }
    friend BasicPoint operator*(const Real& s, const BasicPoint& p) { return {s * p.x, s * p.y}; }
};

template <class Real>
Real norm(const BasicPoint<Real>& p) {
    using std::hypot;
    return hypot(p.x, p.y);
}

template <class Real>
Real dot(const BasicPoint<Real>& p, const BasicPoint<Real>& q) { return p.x * q.x + p.y * q.y; }

/// z-component of p x q; positive when q lies counterclockwise of p.
template <class Real>
Real cross(const BasicPoint<Real>& p, const BasicPoint<Real>& q) { return p.x * q.y - p.y * q.x; }

/// 2x2 matrix [[m11, m12], [m21, m22]].
template <class Real>
struct BasicMatrix2 {
    Real m11{1}, m12{0}, m21{0}, m22{1};

    static BasicMatrix2 identity() { return {Real(1), Real(0), Real(0), Real(1)}; }

    Real det() const { return m11 * m22 - m12 * m21; }
    Real trace() const { return m11 + m22; }

    /// Inverse assuming det = 1.
    BasicMatrix2 sl2_inverse() const { return {m22, -m12, -m21, m11}; }

    BasicPoint<Real> apply(const BasicPoint<Real>& p) const {
        return {m11 * p.x + m12 * p.y, m21 * p.x + m22 * p.y};
    }

    Real max_abs() const {
        using std::abs;
        Real r = abs(m11);
        for (const Real& v : {m12, m21, m22}) {
            if (abs(v) > r) r = abs(v);
        }
        return r;
    }

    friend BasicMatrix2 operator*(const BasicMatrix2& l, const BasicMatrix2& r) {
        return {l.m11 * r.m11 + l.m12 * r.m21, l.m11 * r.m12 + l.m12 * r.m22,
                l.m21 * r.m11 + l.m22 * r.m21, l.m21 * r.m12 + l.m22 * r.m22};
    }
    friend BasicMatrix2 operator+(const BasicMatrix2& l, const BasicMatrix2& r) {
        return {l.m11 + r.m11, l.m12 + r.m12, l.m21 + r.m21, l.m22 + r.m22};
    }
    friend BasicMatrix2 operator-(const BasicMatrix2& l, const BasicMatrix2& r) {
        return {l.m11 - r.m11, l.m12 - r.m12, l.m21 - r.m21, l.m22 - r.m22};
    }
    friend BasicMatrix2 operator*(const Real& s, const BasicMatrix2& m) {
        return {s * m.m11, s * m.m12, s * m.m21, s * m.m22};
    }
    friend bool operator==(const BasicMatrix2&, const BasicMatrix2&) = default;
};

using Params = BasicParams<double>;
using PlanePoint = BasicPoint<double>;
using StepMatrix = BasicMatrix2<double>;

/// Largest |entry| of a - b.
template <class Real>
Real max_abs_diff(const BasicMatrix2<Real>& a, const BasicMatrix2<Real>& b) { return (a - b).max_abs(); }

/// Distance of m from the nearer of +I and -I, in max-abs-entry norm.
template <class Real>
Real distance_to_plus_minus_identity(const BasicMatrix2<Real>& m) {
    const auto id = BasicMatrix2<Real>::identity();
    const Real plus = max_abs_diff(m, id);
    const Real minus = max_abs_diff(m, Real(-1) * id);
    return plus < minus ? plus : minus;
}

enum class Sign : unsigned char { plus, minus };

/// Itinerary over {+, -}. Symbol k is + iff the x-coordinate before step k
/// is >= 0.
class SignWord {
public:
    SignWord() = default;
    explicit SignWord(std::vector<Sign> symbols) : symbols_(std::move(symbols)) {}

    /// Parses a string over {'+', '-'}; the Unicode minus U+2212 is accepted
    /// too. Throws DomainError on any other character.
    static SignWord parse(std::string_view text) {
        std::vector<Sign> out;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '+') {
                out.push_back(Sign::plus);
            } else if (c == '-') {
                out.push_back(Sign::minus);
            } else if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < text.size() &&
                       static_cast<unsigned char>(text[i + 1]) == 0x88 &&
                       static_cast<unsigned char>(text[i + 2]) == 0x92) {
                out.push_back(Sign::minus);
                i += 2;
            } else {
                throw DomainError("sign word: unexpected character '" + std::string(1, c) + "'");
            }
        }
        return SignWord(std::move(out));
    }

    std::string str() const {
        std::string s;
        s.reserve(symbols_.size());
        for (Sign v : symbols_) s.push_back(v == Sign::plus ? '+' : '-');
        return s;
    }

    void push_back(Sign s) { symbols_.push_back(s); }
    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    Sign operator[](std::size_t i) const { return symbols_[i]; }
    auto begin() const noexcept { return symbols_.begin(); }
    auto end() const noexcept { return symbols_.end(); }
    const std::vector<Sign>& symbols() const noexcept { return symbols_; }

    friend bool operator==(const SignWord&, const SignWord&) = default;

private:
    std::vector<Sign> symbols_;
};

template <class Real>
Sign sign_of(const Real& x) { return x >= 0 ? Sign::plus : Sign::minus; }

namespace detail {

template <class Real>
bool out_of_range(const Real& v) {
    using std::abs;
    using std::isfinite;
    return !isfinite(v) || abs(v) > Real(kOverflowLimit);
}

template <class Real>
void check_range(const BasicPoint<Real>& p, std::int64_t index) {
    if (out_of_range(p.x) || out_of_range(p.y)) {
        throw OverflowError(index, "orbit overflow at iterate " + std::to_string(index));
    }
}

} // namespace detail

/// One forward step: (a x - y, x) if x >= 0, else (b x - y, x).
template <class Real>
BasicPoint<Real> step(const BasicParams<Real>& params, const BasicPoint<Real>& p) {
    BasicPoint<Real> q{params.slope(p.x) * p.x - p.y, p.x};
    detail::check_range(q, 1);
    return q;
}

/// One backward step: T^-1(x, y) = (y, -x + F(y) y).
template <class Real>
BasicPoint<Real> inverse_step(const BasicParams<Real>& params, const BasicPoint<Real>& p) {
    BasicPoint<Real> q{p.y, -p.x + params.slope(p.y) * p.y};
    detail::check_range(q, -1);
    return q;
}

/// Orbit segment produced by iterate().
template <class Real>
struct BasicOrbit {
    std::vector<BasicPoint<Real>> points;  ///< p0, T^(+-1) p0, ..., |n|+1 entries
    SignWord word;                         ///< forward runs: sign of x before each step
    SignWord backward_word;                ///< backward runs: sign of x of each new preimage
};

using Orbit = BasicOrbit<double>;

/// Iterates n steps (n < 0 runs the inverse). Throws OverflowError carrying
/// the signed index of the first out-of-range iterate.
template <class Real>
BasicOrbit<Real> iterate(const BasicParams<Real>& params, const BasicPoint<Real>& p0, std::int64_t n) {
    BasicOrbit<Real> orbit;
    const std::int64_t count = n < 0 ? -n : n;
    orbit.points.reserve(static_cast<std::size_t>(count) + 1);
    orbit.points.push_back(p0);
    BasicPoint<Real> p = p0;
    for (std::int64_t k = 1; k <= count; ++k) {
        if (n > 0) {
            orbit.word.push_back(sign_of(p.x));
            p = {params.slope(p.x) * p.x - p.y, p.x};
            detail::check_range(p, k);
        } else {
            p = {p.y, -p.x + params.slope(p.y) * p.y};
            detail::check_range(p, -k);
            orbit.backward_word.push_back(sign_of(p.x));
        }
        orbit.points.push_back(p);
    }
    return orbit;
}

/// The single-step factor [[F, -1], [1, 0]] for a symbol.
template <class Real>
BasicMatrix2<Real> step_factor(const BasicParams<Real>& params, Sign s) {
    return {s == Sign::plus ? params.a : params.b, Real(-1), Real(1), Real(0)};
}

/// Cocycle product: the factor of the first symbol is applied first, i.e.
/// sits rightmost. Empty word gives the identity.
template <class Real>
BasicMatrix2<Real> word_matrix(const BasicParams<Real>& params, const SignWord& word) {
    auto m = BasicMatrix2<Real>::identity();
    for (Sign s : word) m = step_factor(params, s) * m;
    return m;
}

/// Swapping the slopes conjugates the map by the point reflection p -> -p.
template <class Real>
BasicParams<Real> swap_conjugate(const BasicParams<Real>& params) { return {params.b, params.a}; }

/// x_{n+2} = mu |x_{n+1}| + nu x_{n+1} - x_n, evaluated in (mu, nu) form.
/// Matches the x component of step() up to rounding.
template <class Real>
Real difference_step(const BasicParams<Real>& params, const Real& x_prev, const Real& x_cur) {
    using std::abs;
    return params.mu() * abs(x_cur) + params.nu() * x_cur - x_prev;
}

} // namespace pwlin
