#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pwlin/conic.hpp"
#include "pwlin/families.hpp"

using namespace pwlin;
using Catch::Matchers::WithinAbs;
constexpr double pi = std::numbers::pi;

namespace {

StepMatrix random_word_matrix(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> par(-2, 2);
    std::uniform_int_distribution<int> coin(0, 1), len(1, 12);
    const Params p{par(rng), par(rng)};
    SignWord w;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) w.push_back(coin(rng) ? Sign::plus : Sign::minus);
    return word_matrix(p, w);
}

} // namespace

TEST_CASE("invariant_form of a quarter rotation is the circle") {
    const QuadraticForm q = invariant_form(StepMatrix{0, -1, 1, 0});
    CHECK(q.A == 1);
    CHECK(q.B == 0);
    CHECK(q.C == 1);
    CHECK(q.disc() < 0);
    CHECK_THROWS_AS(invariant_form(StepMatrix::identity()), DegenerateMatrixError);
    CHECK_THROWS_AS(invariant_form(StepMatrix{-1, 0, 0, -1}), DegenerateMatrixError);
    CHECK_THROWS_AS(invariant_form(StepMatrix{2, 0, 0, 2}), DegenerateMatrixError);
}

TEST_CASE("forms are invariant and normalized") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1, 1);
    int done = 0;
    while (done < 100) {
        const StepMatrix m = random_word_matrix(rng);
        if (distance_to_plus_minus_identity(m) < 1e-6 || m.max_abs() > 1e4) continue;
        ++done;
        const QuadraticForm q = invariant_form(m);
        CHECK(std::max({std::fabs(q.A), std::fabs(2 * q.B), std::fabs(q.C)}) == 1.0);
        for (int i = 0; i < 100; ++i) {
            const PlanePoint v{u(rng), u(rng)};
            const double r = std::fabs(q.value(m.apply(v)) - q.value(v));
            REQUIRE(r <= 1e-10 * std::max(1.0, m.max_abs() * m.max_abs()) * dot(v, v));
        }
        const QuadraticForm qi = invariant_form(m.sl2_inverse());
        CHECK_THAT(qi.A, WithinAbs(q.A, 1e-9));
        CHECK_THAT(qi.B, WithinAbs(q.B, 1e-9));
        CHECK_THAT(qi.C, WithinAbs(q.C, 1e-9));
        // discriminant sign follows the trace
        const ConicClass c = classify(m, 1e-9);
        if (c == ConicClass::ELLIPSE) CHECK(q.disc() < 0);
        if (c == ConicClass::HYPERBOLA) CHECK(q.disc() > 0);
    }
}

TEST_CASE("classification of the family pieces") {
    const double a = std::pow(2.0, 0.25);
    const auto [m1, m2] = family_matrices(FamilyId::ExA, a);
    CHECK(classify(m1, 1e-9) == ConicClass::ELLIPSE);
    CHECK(invariant_form(m1).disc() < 0);
    CHECK(classify(family_matrices(FamilyId::ExB, alpha0()).first, 1e-9) == ConicClass::PARALLEL_LINES);
    CHECK(classify(family_matrices(FamilyId::ExB, 0.78615).first, 1e-9) == ConicClass::HYPERBOLA);

    // m2 preserves the form of m1
    const QuadraticForm q = invariant_form(m1);
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 1000; ++i) {
        const PlanePoint v{u(rng), u(rng)};
        REQUIRE(std::fabs(q.value(m2.apply(v)) - q.value(v)) <= 1e-10);
    }
}

TEST_CASE("level_through is homogeneous of degree two") {
    const QuadraticForm circle{1, 0, 1};
    CHECK(level_through(circle, {0, 1}) == 1);
    const QuadraticForm q{0.3, -0.2, 1};
    CHECK_THAT(level_through(q, {1.4, -0.6}) * 4, WithinAbs(level_through(q, {2.8, -1.2}), 1e-14));
    CHECK_THROWS_AS(level_through(q, {0, 0}), DegenerateError);

    const double a = 1.2;
    const auto [m1, m2] = family_matrices(FamilyId::ExA, a);
    const QuadraticForm f = invariant_form(m1);
    const Params p{a, family_b(FamilyId::ExA, a)};
    const PlanePoint v4 = iterate(p, PlanePoint{0, -1}, 4).points.back();
    CHECK_THAT(level_through(f, m1.apply(v4)), WithinAbs(level_through(f, v4), 1e-10));
}

TEST_CASE("eigenrays") {
    const auto r = eigenrays(StepMatrix{2, 0, 0, 0.5});
    REQUIRE(r.size() == 4);
    int axes = 0;
    for (const Ray& ray : r) {
        for (const PlanePoint& e : {PlanePoint{1, 0}, PlanePoint{-1, 0}, PlanePoint{0, 1}, PlanePoint{0, -1}}) {
            if (angular_distance(ray, Ray::through(e)) < 1e-15) ++axes;
        }
    }
    CHECK(axes == 4);
    CHECK(eigenrays(StepMatrix{std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4)}).empty());
}

TEST_CASE("arc_in_sector on the unit circle") {
    const Sector q1 = Sector::from_angles(0, pi / 2);
    const ConicArc arc = arc_in_sector(QuadraticForm{1, 0, 1}, 1.0, q1, {std::sqrt(0.5), std::sqrt(0.5)}, 64);
    REQUIRE(arc.samples.size() == 64);
    CHECK(norm(arc.samples.front() - PlanePoint{1, 0}) < 1e-9);
    CHECK(norm(arc.samples.back() - PlanePoint{0, 1}) < 1e-9);
    for (std::size_t k = 0; k < arc.samples.size(); ++k) {
        CHECK(std::fabs(norm(arc.samples[k]) - 1) < 1e-12);
        if (k) CHECK(cross(arc.samples[k - 1], arc.samples[k]) > 0);
    }
    CHECK_THROWS_AS(arc_in_sector(QuadraticForm{1, 0, 1}, 1.0, q1, {2, 0}, 8), DomainError);
}

TEST_CASE("arc_in_sector rejects sectors containing an asymptote") {
    // Q = xy: asymptotes along the axes
    const QuadraticForm q{0, 0.5, 0};
    const Sector wide = Sector::from_angles(-0.3, 0.6);
    const PlanePoint anchor{1, 0.2};
    try {
        arc_in_sector(q, q.value(anchor), wide, anchor, 16);
        FAIL("expected an asymptote error");
    } catch (const AsymptoteInSectorError& e) {
        CHECK(angular_distance(e.eigenray(), Ray::through({1, 0})) < 1e-12);
    }
    const Sector narrow = Sector::from_angles(0.1, 0.6);
    const ConicArc ok = arc_in_sector(q, q.value(anchor), narrow, anchor, 16);
    for (const auto& s : ok.samples) CHECK(std::fabs(q.value(s) - q.value(anchor)) < 1e-12);
}

TEST_CASE("family C first piece has its asymptotes in J1") {
    const double a = special_a_ex_c();
    const Params p{a, -a};
    const Orbit o = iterate(p, PlanePoint{0, -1}, 9);
    const Sector j1(Ray::through(o.points[9]), Ray::through({0, -1}));
    const auto [m1, m2] = family_matrices(FamilyId::ExC, a);
    int inside = 0;
    for (const Ray& r : eigenrays(m1)) inside += j1.contains(r.point()) ? 1 : 0;
    CHECK(inside == 2);
    const QuadraticForm f = invariant_form(m1);
    CHECK_THROWS_AS(arc_in_sector(f, f.value(o.points[9]), j1, o.points[9], 64), AsymptoteInSectorError);
}
