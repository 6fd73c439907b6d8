#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pwlin/core_map.hpp"
#include "pwlin/families.hpp"

using namespace pwlin;
using Catch::Matchers::WithinAbs;

TEST_CASE("step: boundary directions go to the x-axis for any slopes") {
    for (Params p : {Params{0, 0}, Params{1.3, -0.4}, Params{-2, 3}}) {
        CHECK(step(p, PlanePoint{0, 1}) == PlanePoint{-1, 0});
        CHECK(step(p, PlanePoint{0, -1}) == PlanePoint{1, 0});
        CHECK(step(p, PlanePoint{0, 0}) == PlanePoint{0, 0});
    }
}

TEST_CASE("step: x = 0 takes the a branch, branches agree with the oracle") {
    const Params p{1.2, -0.7};
    CHECK(step(p, PlanePoint{1, 0}) == PlanePoint{1.2, 1});
    CHECK(step(p, PlanePoint{0.0, 2.0}).x == -2.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 1000; ++i) {
        const PlanePoint q{u(rng), u(rng)};
        const auto o = oracle::step(p.a, p.b, {q.x, q.y});
        const auto r = step(p, q);
        CHECK_THAT(r.x, WithinAbs(o.x, 1e-13));
        CHECK(r.y == o.y);
    }
}

TEST_CASE("inverse_step undoes step") {
    const Params p{1.3, -0.4};
    CHECK(inverse_step(p, PlanePoint{-1, 0}) == PlanePoint{0, 1});
    CHECK(inverse_step(p, PlanePoint{1, 0}) == PlanePoint{0, -1});
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 10000; ++i) {
        const PlanePoint q{u(rng), u(rng)};
        const PlanePoint back = inverse_step(p, step(p, q));
        REQUIRE(norm(back - q) <= 1e-12 * std::max(1.0, norm(q)));
        const auto o = oracle::inverse(p.a, p.b, {q.x, q.y});
        const auto r = inverse_step(p, q);
        CHECK_THAT(r.y, WithinAbs(o.y, 1e-12));
    }
}

TEST_CASE("overflow is reported with its index") {
    const Params p{4, 4};
    try {
        iterate(p, PlanePoint{0, 1}, 2000);
        FAIL("expected overflow");
    } catch (const OverflowError& e) {
        CHECK(e.index() > 0);
        CHECK(e.index() <= 2000);
    }
    try {
        iterate(p, PlanePoint{0, 1}, -2000);
        FAIL("expected overflow");
    } catch (const OverflowError& e) {
        CHECK(e.index() < 0);
    }
    CHECK_THROWS_AS(step(p, PlanePoint{1e300, 0}), OverflowError);
}

TEST_CASE("iterate: lengths, empty runs and words") {
    const Params p{1.2, family_b(FamilyId::ExA, 1.2)};
    const Orbit zero = iterate(p, PlanePoint{0.3, 0.1}, 0);
    CHECK(zero.points.size() == 1);
    CHECK(zero.word.empty());

    const Orbit o = iterate(p, PlanePoint{0, -1}, 8);
    REQUIRE(o.points.size() == 9);
    CHECK(norm(o.points.back() - PlanePoint{0, 1}) <= 1e-10);
    // word[0] is the sign at v0 = (0,-1): x = 0, so +
    CHECK(o.word.str().substr(1) == "+++-+++");

    const Orbit back = iterate(p, PlanePoint{0, 1}, -8);
    CHECK(back.word.empty());
    CHECK(back.backward_word.size() == 8);
    CHECK(norm(back.points.back() - PlanePoint{0, -1}) <= 1e-10);

    const double a = 0.1;
    const Orbit ob = iterate(Params{a, family_b(FamilyId::ExB, a)}, PlanePoint{0, 1}, 10);
    CHECK(norm(ob.points.back() - PlanePoint{0, -1}) <= 1e-10);
}

TEST_CASE("word_matrix: factors, identity, determinant and orbit reproduction") {
    const Params p{1.1, -0.3};
    const StepMatrix plus = word_matrix(p, SignWord::parse("+"));
    CHECK(plus == StepMatrix{1.1, -1, 1, 0});
    CHECK(word_matrix(p, SignWord{}) == StepMatrix::identity());

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coin(0, 1), len(0, 100);
    for (int i = 0; i < 200; ++i) {
        SignWord w;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) w.push_back(coin(rng) ? Sign::plus : Sign::minus);
        const StepMatrix m = word_matrix(p, w);
        CHECK(std::fabs(m.det() - 1) <= 1e-12 * std::max(1.0, m.max_abs() * m.max_abs()));
    }

    const Orbit o = iterate(p, PlanePoint{0.4, -0.9}, 25);
    const StepMatrix m = word_matrix(p, o.word);
    CHECK(norm(m.apply(o.points.front()) - o.points.back()) <= 1e-12 * norm(o.points.back()));
}

TEST_CASE("sign words parse ASCII and Unicode minus") {
    CHECK(SignWord::parse("-+\xE2\x88\x92+").str() == "-+-+");
    CHECK_THROWS_AS(SignWord::parse("+x"), DomainError);
}

TEST_CASE("swap_conjugate negates orbits") {
    CHECK(swap_conjugate(Params{1.2, -0.5}) == Params{-0.5, 1.2});
    CHECK(swap_conjugate(Params{0.7, 0.7}) == Params{0.7, 0.7});
    const Params p{0.7, -1.1};
    const Params s = swap_conjugate(p);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 100; ++i) {
        PlanePoint q{u(rng), u(rng)};
        PlanePoint r = -q;
        for (int k = 0; k < 100; ++k) {
            q = step(p, q);
            r = step(s, r);
            REQUIRE(norm(r + q) <= 1e-10 * std::max(1.0, norm(q)));
        }
    }
}

TEST_CASE("difference_step matches the x-component of step") {
    CHECK(difference_step(Params{1, -1}, 0.0, -2.0) == 2.0);
    CHECK(difference_step(Params{0.6, 0.6}, 0.5, 2.0) == 0.6 * 2.0 - 0.5);
    const Params p{1.2, -1.3095238095};
    CHECK_THAT(difference_step(p, 1.0, 1.2), WithinAbs(step(p, PlanePoint{1.2, 1}).x, 1e-14));
    const Orbit o = iterate(Params{1.3, -0.8}, PlanePoint{0.2, 0.7}, 200);
    for (std::size_t k = 1; k + 1 < o.points.size(); ++k) {
        const double x_next = o.points[k + 1].x;
        const double pred = difference_step(Params{1.3, -0.8}, o.points[k].y, o.points[k].x);
        CHECK_THAT(pred, WithinAbs(x_next, 1e-12 * std::max(1.0, std::fabs(x_next))));
    }
}

TEST_CASE("positive homogeneity is exact") {
    const Params p{1.7, -0.6};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 1000; ++i) {
        const PlanePoint q{u(rng), u(rng)};
        for (double lam : {2.0, 0.5, 4.0}) {
            CHECK(step(p, lam * q) == lam * step(p, q));
        }
    }
}

TEST_CASE("extended precision backends agree with double") {
    const BasicParams<long double> pl{1.2L, -0.9L};
    const auto ol = iterate(pl, BasicPoint<long double>{0, 1}, 50);
    const Orbit od = iterate(Params{1.2, -0.9}, PlanePoint{0, 1}, 50);
    CHECK(std::fabs(static_cast<double>(ol.points.back().x) - od.points.back().x) < 1e-8);
    CHECK(ol.word == od.word);
}
