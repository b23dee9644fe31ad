#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclab/scalar_core.hpp"

using namespace fraclab;

TEST_CASE("compute_K in one dimension") {
    CHECK(compute_K(1, 0.5, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double s : {0.05, 0.3, 0.5, 0.77, 0.999}) {
        for (double p : {1.1, 1.5, 2.0, 3.0, 7.5}) {
            CHECK(std::fabs(compute_K(1, s, p) * 2.0 - p * (1.0 - s)) <= 1e-15 * p);
        }
    }
    // Linear vanishing as s -> 1.
    const double k1 = compute_K(1, 1.0 - 1e-3, 3.0);
    const double k2 = compute_K(1, 1.0 - 2e-3, 3.0);
    CHECK(k2 / k1 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("compute_K in two dimensions against a trapezoid oracle") {
    // The periodic trapezoid rule is spectrally accurate for |cos|^p with
    // even integer p, and converges fast enough for the others.
    auto oracle = [](double p) {
        const int m = 1 << 16;
        double sum = 0.0;
        for (int k = 0; k < m; ++k) sum += std::pow(std::fabs(std::cos(2.0 * std::numbers::pi * k / m)), p);
        return sum * 2.0 * std::numbers::pi / m;
    };
    CHECK(compute_K(2, 0.5, 2.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    for (double p : {2.0, 4.0, 6.0}) {
        CHECK(circle_moment(p) == doctest::Approx(oracle(p)).epsilon(1e-12));
    }
    for (double p : {1.3, 2.5, 3.7}) {
        CHECK(circle_moment(p) == doctest::Approx(oracle(p)).epsilon(1e-7));
    }
    CHECK(compute_K(2, 0.25, 3.0) == doctest::Approx(3.0 * 0.75 / oracle(3.0)).epsilon(1e-7));
}

TEST_CASE("compute_K rejects bad arguments") {
    CHECK_THROWS_AS(compute_K(3, 0.5, 2.0), DomainError);
    CHECK_THROWS_AS(compute_K(0, 0.5, 2.0), DomainError);
    CHECK_THROWS_AS(compute_K(1, 0.0, 2.0), DomainError);
    CHECK_THROWS_AS(compute_K(1, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(compute_K(1, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(compute_K(1, 0.5, std::nan("")), DomainError);
    CHECK_THROWS_WITH(FracParams::make(1, 1.5, 2.0), doctest::Contains("s must lie in (0,1)"));
}

TEST_CASE("phi_p examples") {
    CHECK(phi_p(-3.0, 2.0) == -3.0);
    CHECK(phi_p(0.0, 1.2) == 0.0);
    CHECK(phi_p(4.0, 1.5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(phi_p(2.0, 3.0) == 4.0);
    CHECK(phi_p(-2.0, 3.0) == -4.0);
    CHECK_THROWS_AS(phi_p(1.0, 0.5), DomainError);
}

TEST_CASE("phi_p is odd and strictly increasing") {
    for (double p : {1.1, 1.5, 2.0, 2.5, 3.0, 6.0}) {
        double prev = -std::numeric_limits<double>::infinity();
        for (int k = -400; k <= 400; ++k) {
            const double t = k * 0.0137;
            CHECK(phi_p(-t, p) == -phi_p(t, p));
            const double v = phi_p(t, p);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("picone_gap examples") {
    CHECK(picone_gap(1, 2, 1, 2, 3) == doctest::Approx(0.0));
    CHECK(picone_gap(1, 0, 1, 1, 2) == 1.0);
    CHECK(picone_gap(2, 1, 1, 2, 3) == doctest::Approx(8.75).epsilon(1e-14));
    CHECK_THROWS_AS(picone_gap(-1, 1, 1, 1, 2), DomainError);
    CHECK_THROWS_AS(picone_gap(1, 1, 0, 1, 2), DomainError);
    CHECK_THROWS_AS(picone_gap(1, 1, 1, -1, 2), DomainError);
}

TEST_CASE("picone_gap is non-negative and vanishes on proportional tuples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> a(0.0, 10.0);
    std::uniform_real_distribution<double> b(1e-3, 10.0);
    std::uniform_real_distribution<double> k(0.0, 5.0);
    for (double p : {1.2, 2.0, 3.0, 5.0}) {
        for (int i = 0; i < 5000; ++i) {
            const double b1 = b(rng), b2 = b(rng);
            CHECK(picone_gap(a(rng), a(rng), b1, b2, p) >= -1e-12);
            const double c = k(rng);
            const double scale = 1.0 + std::pow(c * std::max(b1, b2), p);
            CHECK(std::fabs(picone_gap(c * b1, c * b2, b1, b2, p)) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("picone_gap grows quadratically off the proportional ray") {
    // Equality holds only on the ray, but the gap is second order in the
    // distance from it: gap(k b + e) ~ C e^2.
    for (double p : {1.5, 2.0, 3.0}) {
        const double b1 = 1.0, b2 = 2.0;
        const double g1 = picone_gap(1.0 + 1e-2, 2.0, b1, b2, p);
        const double g2 = picone_gap(1.0 + 1e-3, 2.0, b1, b2, p);
        CHECK(g1 > 0.0);
        CHECK(g2 > 0.0);
        CHECK(g1 / g2 == doctest::Approx(100.0).epsilon(0.05));
    }
}

TEST_CASE("picone_gap agrees with the direct formula") {
    auto direct = [](double a1, double a2, double b1, double b2, double p) {
        const double d = b1 - b2;
        return std::pow(std::fabs(a1 - a2), p) -
               std::pow(std::fabs(d), p - 2.0) * d * (std::pow(a1, p) / std::pow(b1, p - 1.0) - std::pow(a2, p) / std::pow(b2, p - 1.0));
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (double p : {1.2, 2.0, 3.0, 5.0}) {
        for (int i = 0; i < 2000; ++i) {
            const double a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng);
            const double ref = direct(a1, a2, b1, b2, p);
            CHECK(picone_gap(a1, a2, b1, b2, p) == doctest::Approx(ref).epsilon(1e-9).scale(1e3));
        }
        CHECK(picone_gap(0.0, 2.0, 1.0, 3.0, p) == doctest::Approx(direct(0.0, 2.0, 1.0, 3.0, p)).epsilon(1e-12));
        CHECK(picone_gap(2.0, 0.0, 1.0, 3.0, p) == doctest::Approx(direct(2.0, 0.0, 1.0, 3.0, p)).epsilon(1e-12));
        CHECK(picone_gap(2.0, 1.0, 1.5, 1.5, p) == doctest::Approx(1.0).epsilon(1e-12));
    }
}
