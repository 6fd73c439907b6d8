#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pwlin/families.hpp"

using namespace pwlin;

TEST_CASE("family b and intervals") {
    CHECK(family_b(FamilyId::ExA, 1.2) == Catch::Approx(-1.3095238095238095).epsilon(1e-14));
    CHECK(family_period(FamilyId::ExA) == 8);
    CHECK(family_period(FamilyId::ExB) == 10);
    CHECK(family_period(FamilyId::ExC) == 13);
    CHECK(family_b(FamilyId::ExA, std::pow(2.0, 0.25)) == Catch::Approx(-std::pow(2.0, 0.25)).epsilon(1e-14));
    CHECK(std::fabs(family_b(FamilyId::ExB, special_a_ex_b()) + special_a_ex_b()) < 1e-12);
    CHECK(std::fabs(family_b(FamilyId::ExC, special_a_ex_c()) + special_a_ex_c()) < 1e-12);
    CHECK_THROWS_AS(family_b(FamilyId::ExA, 0.5), DomainError);
    CHECK(parse_family("B") == FamilyId::ExB);
    CHECK_THROWS_AS(parse_family("Z"), DomainError);
}

TEST_CASE("special roots against plain bisection") {
    const double a0 = oracle::bisection([](double x) { return (((x + 3) * x + 3) * x + 1) * x - 1; }, 0, 1);
    CHECK(std::fabs(alpha0() - a0) < 1e-12);
    CHECK(std::fabs(alpha0() - 0.3802775690976) < 1e-10);
    const double c2 = oracle::bisection(
        [](double x) { return std::pow(x, 6) - std::pow(x, 5) - std::pow(x, 4) - 2 * x * x + 3 * x + 1; }, 1.2, 1.3);
    CHECK(std::fabs(special_a_ex_c() - c2) < 1e-12);
    CHECK(std::fabs(special_a_ex_c() - 1.235877977) < 1e-9);
}

TEST_CASE("family orbits follow the tabulated signs") {
    for (FamilyId f : {FamilyId::ExA, FamilyId::ExB, FamilyId::ExC}) {
        const auto [lo, hi] = family_interval(f);
        std::mt19937_64 rng(17 + static_cast<int>(f));
        std::uniform_real_distribution<double> u(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo));
        for (int t = 0; t < 20; ++t) {
            const double a = f == FamilyId::ExC ? special_a_ex_c() : u(rng);
            const Params p = family_params(f, a);
            oracle::P v{family_start(f).x, family_start(f).y};
            std::string signs;
            const auto n = family_period(f);
            for (std::int64_t k = 0; k < n; ++k) {
                v = oracle::step(p.a, p.b, v);
                if (k + 1 < n) signs += v.x >= 0 ? '+' : '-';
            }
            CHECK(std::fabs(v.x + family_start(f).x) < 1e-9);
            CHECK(std::fabs(v.y + family_start(f).y) < 1e-9);
            CHECK(signs == family_table_signs(f).str());
        }
    }
}

TEST_CASE("closed-form matrices match word products") {
    for (FamilyId f : {FamilyId::ExA, FamilyId::ExB}) {
        const auto [lo, hi] = family_interval(f);
        for (int t = 1; t < 20; ++t) {
            const double a = lo + (hi - lo) * t / 20.0;
            const Params p = family_params(f, a);
            const auto [w1, w2] = family_words(f);
            const auto [m1, m2] = family_matrices(f, a);
            CHECK(max_abs_diff(word_matrix(p, w1), m1) < 1e-9 * std::max(1.0, m1.max_abs()));
            CHECK(max_abs_diff(word_matrix(p, w2), m2) < 1e-9 * std::max(1.0, m2.max_abs()));
        }
    }
}

TEST_CASE("family A trace identity") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1.0, std::sqrt(2.0));
    for (int t = 0; t < 100; ++t) {
        const double a = u(rng);
        const Params p = family_params(FamilyId::ExA, a);
        const double tr = word_matrix(p, family_words(FamilyId::ExA).first).trace();
        CHECK(std::fabs(tr - (-a * a * a + 3 * a)) < 1e-12);
    }
}

TEST_CASE("verification reports pass at the special points") {
    VerifyOptions opt;
    opt.rotation_steps = 1000000;
    for (FamilyId f : {FamilyId::ExA, FamilyId::ExB, FamilyId::ExC}) {
        const double a = f == FamilyId::ExA ? special_a_ex_a() : f == FamilyId::ExB ? special_a_ex_b() : special_a_ex_c();
        const VerificationReport rep = verify_family(f, a, opt);
        INFO(to_string(f));
        for (const auto& c : rep.checks) {
            INFO(c.name << " residual " << c.residual << " " << c.detail);
            CHECK(c.passed);
        }
    }
    const VerificationReport lines = verify_family(FamilyId::ExB, alpha0(), opt);
    CHECK(lines.all_passed());
    REQUIRE(lines.regime);
    CHECK(*lines.regime == ConicClass::PARALLEL_LINES);
    REQUIRE(lines.closed_rotation);
    const double a0 = alpha0();
    CHECK(std::fabs(*lines.closed_rotation - (2 * a0 * a0 + 1) / (9 * a0 * a0 + 4)) < 1e-15);
    CHECK(std::fabs(*lines.closed_rotation - lines.winding.value) <= 2e-6);
}

TEST_CASE("family B spectra at the hyperbolic special point") {
    const SpectralData s = spectral_data(FamilyId::ExB, special_a_ex_b());
    REQUIRE(s.lambda1);
    REQUIRE(s.lambda2);
    const double l1 = *s.lambda1, l2 = *s.lambda2;
    CHECK(std::fabs(l1 * l1 * l1 * l1 - 7 * l1 * l1 * l1 + 13 * l1 * l1 - 7 * l1 + 1) < 1e-8);
    const double z = l2 * l2;
    CHECK(std::fabs(z * z * z * z + 23 * z * z * z - 77 * z * z + 23 * z + 1) < 1e-7);
}

TEST_CASE("curve finder recovers the special points") {
    const Slice slice{0, 0, 1, -1};
    const auto a8 = curve_find(-8, slice, {1.1, 1.3});
    REQUIRE(a8);
    CHECK(std::fabs(*a8 - std::pow(2.0, 0.25)) < 1e-9);
    const auto a10 = curve_find(10, slice, {0.7, 0.85});
    REQUIRE(a10);
    CHECK(std::fabs(*a10 - std::sqrt((std::sqrt(5.0) - 1) / 2)) < 1e-9);
    const auto a13 = curve_find(-13, slice, {1.22, 1.25});
    REQUIRE(a13);
    const double c = oracle::bisection(
        [](double x) { return std::pow(x, 6) - std::pow(x, 5) - std::pow(x, 4) - 2 * x * x + 3 * x + 1; }, 1.2, 1.3);
    CHECK(std::fabs(*a13 - c) < 1e-9);
    CHECK_THROWS_AS(curve_find(-8, slice, {1.5, 1.6}), NoBracketError);
}
