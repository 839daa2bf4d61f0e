#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "mfl/errors.hpp"
#include "mfl/kato.hpp"

using namespace mfl;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent sphere quadrature of the angular integral at d = 3, reduced to
// cos(theta) with the plain Gauss-Kronrod rule (no library code involved).
double sphere_oracle(double v, double exponent) {
    const double c = 1.0 / std::sqrt(v);
    double error = 0.0;
    const double slice =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [c, exponent](double u) {
                return std::pow(1.0 + c * c - 2.0 * c * u, -0.5 * exponent);
            },
            -1.0, 1.0, 12, 1e-11, &error);
    return 2.0 * kPi * slice;
}

} // namespace

TEST_CASE("sharp smoothing constant and dimension guard") {
    CHECK(std::abs(kato_bound(3) - kPi) <= 1e-15);
    CHECK(std::abs(kato_bound(4) - kPi / 2.0) <= 1e-15);
    CHECK(std::abs(kato_bound(5) - kPi / 3.0) <= 1e-15);
    CHECK_THROWS_AS(kato_bound(2), config_error);

    CHECK(std::abs(sphere_area(2) - 2.0 * kPi) <= 1e-13);
    CHECK(std::abs(sphere_area(3) - 4.0 * kPi) <= 1e-13);
    CHECK(std::abs(sphere_area(4) - 2.0 * kPi * kPi) <= 1e-12);
}

TEST_CASE("gaussian weight reduces to the spread variance formula") {
    const std::vector<double> times{0.0, 0.3, 1.7};
    for (int d = 3; d <= 5; ++d) {
        for (double t : times) {
            CAPTURE(d);
            CAPTURE(t);
            const double want = 2.0 / ((d - 2) * (1.0 + 4.0 * t * t));
            CHECK(std::abs(gaussian_weight_at(d, t) - want) <= 1e-9);
        }
    }
    CHECK(std::abs(gaussian_weight_at(3, -2.4) - gaussian_weight_at(3, 2.4)) <=
          1e-12);
    CHECK_THROWS_AS(gaussian_weight_at(2, 0.0), config_error);
}

TEST_CASE("gaussian data saturates the smoothing bound") {
    for (int d = 3; d <= 5; ++d) {
        CAPTURE(d);
        CHECK(std::abs(gaussian_kato_integral(d) - kato_bound(d)) <= 1e-6);
    }
}

TEST_CASE("truncated time windows increase monotonically to the limit") {
    const double v_half = gaussian_kato_integral(3, 1e-9, 0.5);
    const double v_two = gaussian_kato_integral(3, 1e-9, 2.0);
    const double v_eight = gaussian_kato_integral(3, 1e-9, 8.0);
    const double full = gaussian_kato_integral(3);
    CHECK(v_half < v_two);
    CHECK(v_two < v_eight);
    CHECK(v_eight < full);
    // Missing tails carry exactly pi - atan(2 T) each side.
    const double tail = kPi - 2.0 * std::atan(16.0);
    CHECK(std::abs((full - v_eight) - tail) <= 1e-6);
}

TEST_CASE("newton angular integral: piecewise values and continuity") {
    CHECK(std::abs(newton_g(4.0, 3) - 2.0 * kPi) <= 1e-13);
    CHECK(std::abs(newton_g(0.25, 3) - kPi) <= 1e-13);
    CHECK(std::abs(newton_g(1.0, 3) - 2.0 * kPi) <= 1e-13);
    CHECK(std::abs(newton_g(1.0 + 1e-6, 3) - 2.0 * kPi) <= 1e-4);
    CHECK(std::abs(newton_g(1.0 - 1e-6, 3) - 2.0 * kPi) <= 1e-4);

    double prev = -1.0;
    for (int i = 0; i <= 10; ++i) {
        const double v = 0.1 * i;
        const double g = newton_g(v, 3);
        CHECK(g >= prev);
        prev = g;
    }
    for (double v : {1.5, 3.0, 10.0})
        CHECK(newton_g(v, 3) == newton_g(2.0, 3));

    // |S^3| = 2 pi^2, so below the kink the d = 4 value is pi^2 v.
    CHECK(std::abs(newton_g(0.49, 4) - kPi * kPi * 0.49) <= 1e-12);

    CHECK_THROWS_AS(newton_g(-0.1, 3), config_error);
    CHECK_THROWS_AS(newton_g(1.0, 2), config_error);
}

TEST_CASE("newton formula matches direct sphere quadrature at d = 3") {
    for (double v : {0.1, 0.5, 0.9, 1.1, 4.0}) {
        CAPTURE(v);
        const double direct = 0.5 * sphere_oracle(v, 1.0);
        CHECK(std::abs(newton_g(v, 3) - direct) <= 1e-8);
        // Closed form of the same integral without Newton's theorem.
        const double root = std::sqrt(v);
        const double closed =
            kPi * root * ((1.0 + 1.0 / root) - std::abs(1.0 - 1.0 / root));
        CHECK(std::abs(newton_g(v, 3) - closed) <= 1e-12);
    }
}

TEST_CASE("pair reduction factor from centre-of-mass coordinates") {
    CHECK(std::abs(pair_reduction_factor(1.0) - kPi / 2.0) <= 1e-15);
    CHECK(pair_reduction_factor(0.0) == 0.0);
    CHECK(std::abs(pair_reduction_factor(2.0) - 2.0 * kPi) <= 1e-14);
}

TEST_CASE("generalized estimate: angular supremum is finite in range") {
    // At gamma = 1 the exponent is d - 2 and Newton's theorem applies:
    // the integral is 4 pi min(1, sqrt(v)), so the supremum is exactly 4 pi.
    CHECK(std::abs(angular_supremum(3, 1.0) - 4.0 * kPi) <= 1e-6);

    for (double gamma : {0.8, 1.2}) {
        CAPTURE(gamma);
        const double sup = angular_supremum(3, gamma);
        CHECK(std::isfinite(sup));
        CHECK(sup >= sphere_area(3) - 1e-7);
        CHECK(sup >= angular_integral(3, gamma, 1.0) - 1e-7);
    }
    CHECK(std::isfinite(angular_supremum(4, 1.0)));

    // Touching point v = 1 in closed form for gamma = 0.8 at d = 3:
    // 2 pi int (2 - 2u)^{-0.7} du = (2 pi / 0.3) 2^{-0.4}.
    const double touch = (2.0 * kPi / 0.3) * std::pow(2.0, -0.4);
    CHECK(std::abs(angular_integral(3, 0.8, 1.0) - touch) <= 1e-6);
    CHECK(angular_integral(3, 0.8, 0.0) == 0.0);
    // Direct quadrature agreement away from the touching point.
    CHECK(std::abs(angular_integral(3, 0.8, 0.5) - sphere_oracle(0.5, 1.4)) <=
          1e-8);

    CHECK_THROWS_AS(angular_supremum(3, 0.5), config_error);
    CHECK_THROWS_AS(angular_supremum(3, 1.5), config_error);
    CHECK_THROWS_AS(angular_supremum(1, 0.7), config_error);
}

TEST_CASE("l1 time integral obeys the Cauchy-Schwarz majorant") {
    for (double t : {0.1, 1.0, 10.0}) {
        CAPTURE(t);
        CHECK(l1_time_value(3, t) <= l1_time_bound(1.0, t));
    }
    // d = 3 closed form: int_0^1 sqrt(2/(1+4s^2)) ds = asinh(2)/sqrt(2).
    CHECK(std::abs(l1_time_value(3, 1.0) - std::asinh(2.0) / std::sqrt(2.0)) <=
          1e-8);
    CHECK(l1_time_value(3, 0.0) == 0.0);
    CHECK_THROWS_AS(l1_time_value(3, -1.0), config_error);
}

TEST_CASE("report carries the query and the verdict") {
    const KatoReport sharp = kato_check(3);
    CHECK(sharp.d == 3);
    CHECK_FALSE(sharp.gamma.has_value());
    REQUIRE(sharp.bound.has_value());
    CHECK(std::abs(*sharp.bound - kPi) <= 1e-15);
    REQUIRE(sharp.abs_err.has_value());
    CHECK(*sharp.abs_err <= 1e-6);

    const nlohmann::json j = nlohmann::json::parse(kato_report_json(sharp));
    CHECK(j.at("d").get<int>() == 3);
    CHECK(j.at("gamma").is_null());
    CHECK(std::abs(j.at("computed").get<double>() - sharp.computed) == 0.0);
    CHECK(std::abs(j.at("bound").get<double>() - kPi) <= 1e-15);

    const KatoReport general = kato_check(3, 0.8);
    CHECK_FALSE(general.bound.has_value());
    CHECK_FALSE(general.abs_err.has_value());
    CHECK(std::isfinite(general.computed));
    const nlohmann::json g = nlohmann::json::parse(kato_report_json(general));
    CHECK(std::abs(g.at("gamma").get<double>() - 0.8) <= 1e-15);
    CHECK(g.at("bound").is_null());
    CHECK(g.at("abs_err").is_null());

    CHECK_THROWS_AS(kato_check(2), config_error);
}
