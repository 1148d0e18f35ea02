#include <cmath>
#include <limits>
#include <random>

#include "curvemean/core.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curvemean;
using testing::kPi;

TEST_SUITE("core") {

TEST_CASE("sampled signal validation") {
    CHECK_THROWS_AS(SampledSignal({1.0}), DomainError);
    CHECK_THROWS_AS(SampledSignal({1.0, std::numeric_limits<double>::quiet_NaN()}), DomainError);
    const SampledSignal s({1.0, 2.0, 3.0, 4.0});
    CHECK(s.size() == 4);
    CHECK(s.time(0) == doctest::Approx(0.25));
    CHECK(s.time(3) == 1.0);
}

TEST_CASE("evaluate constant and pure harmonic") {
    CHECK(evaluate(SmoothedCurve::constant(3.0), 0.77) == 3.0);
    const auto cosine = SmoothedCurve::fourier({0.0, 0.5});
    CHECK(evaluate(cosine, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(cosine, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("evaluate rejects non-finite time") {
    const auto c = SmoothedCurve::constant(1.0);
    CHECK_THROWS_AS(evaluate(c, std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(evaluate_derivative(c, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("periodicity over random times") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    const auto fourier = testing::random_fourier(rng, 12);
    const auto grid = SmoothedCurve::grid(testing::random_vector(rng, 32));
    for (int i = 0; i < 100; ++i) {
        const double t = uni(rng);
        CHECK(std::abs(evaluate(fourier, t) - evaluate(fourier, t + 1.0)) <= 1e-12);
        CHECK(std::abs(evaluate(fourier, t) - evaluate(fourier, t - 2.0)) <= 1e-12);
        CHECK(std::abs(evaluate(grid, t) - evaluate(grid, t + 1.0)) <= 1e-12);
    }
}

TEST_CASE("Fourier evaluation matches term-by-term series") {
    std::mt19937_64 rng(5);
    const auto curve = testing::random_fourier(rng, 9);
    std::vector<std::complex<double>> c(curve.coefficients().begin(), curve.coefficients().end());
    for (double t : {0.0, 0.1, 0.333, 0.72, 0.999})
        CHECK(evaluate(curve, t) == doctest::Approx(testing::fourier_value(c, t)).epsilon(1e-12));
}

TEST_CASE("derivatives") {
    CHECK(evaluate_derivative(SmoothedCurve::constant(2.0), 0.4) == 0.0);
    const auto cosine = SmoothedCurve::fourier({0.0, 0.5});
    CHECK(std::abs(evaluate_derivative(cosine, 0.0)) <= 1e-12);
    CHECK(evaluate_derivative(cosine, 0.25) == doctest::Approx(-2.0 * kPi).epsilon(1e-12));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto curve = testing::random_fourier(rng, 10);
        const double t = uni(rng);
        const double h = 1e-6;
        const double fd = (evaluate(curve, t + h) - evaluate(curve, t - h)) / (2.0 * h);
        const double d = evaluate_derivative(curve, t);
        CHECK(std::abs(fd - d) <= 1e-4 * std::max(1.0, std::abs(d)));
    }
}

TEST_CASE("grid form interpolates linearly with wraparound") {
    // samples at t = 1/4, 1/2, 3/4, 1
    const auto g = SmoothedCurve::grid({1.0, 2.0, 4.0, 0.0});
    CHECK(evaluate(g, 0.25) == doctest::Approx(1.0));
    CHECK(evaluate(g, 0.375) == doctest::Approx(1.5));
    CHECK(evaluate(g, 0.0) == doctest::Approx(0.0));
    CHECK(evaluate(g, 1.0) == doctest::Approx(0.0));
    // between t = 0 (sample 4) and t = 1/4 (sample 1)
    CHECK(evaluate(g, 0.125) == doctest::Approx(0.5));
    CHECK(evaluate_derivative(g, 0.6) == doctest::Approx((4.0 - 2.0) * 4.0));
    CHECK(evaluate_derivative(g, 0.9) == doctest::Approx((0.0 - 4.0) * 4.0));
    const auto s = g.sample(4);
    CHECK(s[0] == 1.0);
    CHECK(s[3] == 0.0);
}

TEST_CASE("project_zero_mean examples") {
    const auto a = project_zero_mean(std::vector<std::vector<double>>{{0.1}, {-0.1}});
    CHECK(a(0, 0) == doctest::Approx(0.1));
    CHECK(a(1, 0) == doctest::Approx(-0.1));

    const auto b = project_zero_mean(std::vector<std::vector<double>>{{1.0}, {1.0}, {1.0}});
    for (std::size_t j = 0; j < 3; ++j) CHECK(b(j, 0) == 0.0);

    const auto c = project_zero_mean(std::vector<std::vector<double>>{{2.0, 0.0}, {0.0, 2.0}});
    CHECK(c(0, 0) == 1.0);
    CHECK(c(0, 1) == -1.0);
    CHECK(c(1, 0) == -1.0);
    CHECK(c(1, 1) == 1.0);

    CHECK_THROWS_AS(project_zero_mean(std::vector<std::vector<double>>{}), DomainError);
    CHECK_THROWS_AS(project_zero_mean(std::vector<std::vector<double>>{{1.0}, {1.0, 2.0}}), DomainError);
}

TEST_CASE("project_zero_mean is idempotent and lands in the constraint set") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t J = 2 + trial % 7, p = 1 + trial % 4;
        ParamArray raw(J, p);
        for (double& v : raw.flat()) v = std::normal_distribution<double>(0.0, 3.0)(rng);
        const auto once = project_zero_mean(raw);
        const auto twice = project_zero_mean(once);
        CHECK(max_column_sum(once) <= 1e-12 * static_cast<double>(J));
        for (std::size_t i = 0; i < once.flat().size(); ++i)
            CHECK(std::abs(once.flat()[i] - twice.flat()[i]) <= 1e-14);
    }
}

TEST_CASE("parallel_for visits every index once and rethrows") {
    for (int threads : {1, 2, 5}) {
        std::vector<int> hits(37, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw DomainError("boom");
                    }),
                    DomainError);
}

}
