#include <algorithm>
#include <cmath>
#include <random>

#include "curvemean/estimators.hpp"
#include "curvemean/synthetic.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curvemean;

namespace {

const SmoothedCurve& bump() {
    static const SmoothedCurve shape = bump_shape({{0.5, 0.05, 1.0}});
    return shape;
}

// Noiseless signals f(t - theta_j) on the n-point grid.
std::vector<SampledSignal> shifted_copies(const SmoothedCurve& f, const std::vector<double>& shifts, std::size_t n) {
    std::vector<SampledSignal> out;
    for (double s : shifts) out.push_back(testing::rotate_fourier(f, s).sample(n));
    return out;
}

std::vector<double> as_vector(const SampledSignal& s) { return {s.values().begin(), s.values().end()}; }

SampledSignal roll(const SampledSignal& s, std::size_t k) {
    auto v = as_vector(s);
    std::rotate(v.rbegin(), v.rbegin() + static_cast<std::ptrdiff_t>(k), v.rend());
    return SampledSignal(std::move(v));
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("euclidean mean") {
    std::mt19937_64 rng(1);
    const SampledSignal y(testing::random_vector(rng, 16));
    CHECK(as_vector(euclidean_mean({y})) == as_vector(y));
    auto neg = as_vector(y);
    for (double& v : neg) v = -v;
    CHECK(testing::max_abs(as_vector(euclidean_mean({y, SampledSignal(neg)}))) == 0.0);

    std::vector<SampledSignal> five;
    for (int j = 0; j < 5; ++j) five.emplace_back(testing::random_vector(rng, 16));
    const auto mean = euclidean_mean(five);
    for (std::size_t l = 0; l < 16; ++l) {
        double s = 0.0;
        for (const auto& sig : five) s += sig[l];
        CHECK(mean[l] == doctest::Approx(s / 5.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(euclidean_mean({}), DomainError);
    CHECK_THROWS_AS(euclidean_mean({y, SampledSignal(std::vector<double>(8, 0.0))}), DomainError);
}

TEST_CASE("mse") {
    std::mt19937_64 rng(2);
    const SampledSignal truth(testing::random_vector(rng, 32));
    CHECK(mse(truth, truth) == 0.0);
    auto plus = as_vector(truth);
    for (double& v : plus) v += 0.3;
    CHECK(mse(SampledSignal(plus), truth) == doctest::Approx(0.09).epsilon(1e-12));
    const SampledSignal other(testing::random_vector(rng, 32));
    double direct = 0.0;
    for (std::size_t l = 0; l < 32; ++l) direct += (other[l] - truth[l]) * (other[l] - truth[l]) / 32.0;
    CHECK(mse(other, truth) == doctest::Approx(direct).epsilon(1e-14));
    CHECK_THROWS_AS(mse(truth, SampledSignal({1.0, 2.0})), DomainError);
}

TEST_CASE("smoother spec strings") {
    CHECK(SmootherSpec::parse("none").method == SmootherSpec::Method::none);
    CHECK(SmootherSpec::parse("fourier-gcv").method == SmootherSpec::Method::fourier_gcv);
    const auto fixed = SmootherSpec::parse("fourier-fixed:7");
    CHECK(fixed.method == SmootherSpec::Method::fourier_fixed);
    CHECK(fixed.cutoff == 7);
    const auto wav = SmootherSpec::parse("wavelet:haar:2");
    CHECK(wav.filter == WaveletFilter::haar);
    CHECK(wav.coarse_level == 2);
    for (const char* text : {"none", "fourier-gcv", "fourier-fixed:7", "wavelet:db4:3"})
        CHECK(SmootherSpec::parse(text).to_string() == text);
    for (const char* bad : {"", "fourier", "fourier-fixed", "fourier-fixed:x", "fourier-fixed:-1", "wavelet:sym8",
                            "none:1"})
        CHECK_THROWS_AS(SmootherSpec::parse(bad), DomainError);
    CHECK_THROWS_AS(make_family("affine"), DomainError);
    CHECK(make_family("diffeo", 8, 3).dim() == 8);
}

TEST_CASE("frechet mean of identical signals") {
    const auto y = bump().sample(64);
    const auto result = frechet_mean({y, y, y}, SmootherSpec::parse("fourier-fixed:10"), DeformationFamily::translation());
    CHECK(result.ensemble.max_abs() == 0.0);
    const auto smoothed = fourier_smooth(y, 10).sample(64);
    CHECK(testing::max_abs_diff(as_vector(result.mean_curve), as_vector(smoothed)) <= 1e-12);
    CHECK_THROWS_AS(frechet_mean({y}, {}, DeformationFamily::translation()), DomainError);
}

TEST_CASE("frechet mean recovers noiseless shifts") {
    const std::vector<double> shifts{0.06, -0.03, 0.08, -0.1, -0.01};
    const auto signals = shifted_copies(bump(), shifts, 128);
    OptimizerConfig cfg;
    cfg.rho = 1e-10;
    const auto result = frechet_mean(signals, {}, DeformationFamily::translation(), cfg);
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(result.ensemble(j, 0) - shifts[j]) <= 1e-3);
    CHECK(testing::max_abs_diff(as_vector(result.mean_curve), as_vector(bump().sample(128))) <= 1e-2);
}

TEST_CASE("frechet mean with all-zero parameters is the average of the smoothed curves") {
    std::mt19937_64 rng(3);
    std::vector<SampledSignal> signals;
    for (int j = 0; j < 4; ++j) signals.emplace_back(testing::random_vector(rng, 32));
    OptimizerConfig cfg;
    cfg.max_iterations = 0;
    const auto spec = SmootherSpec::parse("fourier-fixed:5");
    const auto result = frechet_mean(signals, spec, DeformationFamily::translation(), cfg);
    CHECK(result.ensemble.max_abs() == 0.0);
    std::vector<SampledSignal> smoothed;
    for (const auto& s : signals) smoothed.push_back(fourier_smooth(s, 5).sample(32));
    CHECK(testing::max_abs_diff(as_vector(result.mean_curve), as_vector(euclidean_mean(smoothed))) <= 1e-12);
}

TEST_CASE("translation frechet mean is equivariant to a common circular shift") {
    Rng rng(4);
    SimulationConfig sim;
    sim.J = 6;
    const auto data = simulate_dataset(default_mean_shape(), sim, rng);
    const auto base = frechet_mean(data.signals, {}, DeformationFamily::translation());
    for (std::size_t k : {1, 5, 40}) {
        std::vector<SampledSignal> moved;
        for (const auto& s : data.signals) moved.push_back(roll(s, k));
        const auto shifted = frechet_mean(moved, {}, DeformationFamily::translation());
        CHECK(testing::max_abs_diff(as_vector(shifted.mean_curve), as_vector(roll(base.mean_curve, k))) <= 1e-6);
    }
}

TEST_CASE("frechet mean is independent of the thread count") {
    Rng rng(5);
    SimulationConfig sim;
    sim.J = 7;
    const auto data = simulate_dataset(default_mean_shape(), sim, rng);
    for (const auto& family : {DeformationFamily::translation(), DeformationFamily::diffeo(VelocityBasis())}) {
        const auto one = frechet_mean(data.signals, {}, family, {}, 1);
        const auto four = frechet_mean(data.signals, {}, family, {}, 4);
        CHECK(as_vector(one.mean_curve) == as_vector(four.mean_curve));
        CHECK(one.criterion_values() == four.criterion_values());
    }
}

TEST_CASE("procrustes mean of identical signals") {
    const auto y = bump().sample(64);
    const auto result = procrustes_mean({y, y, y}, DeformationFamily::translation());
    CHECK(result.ensemble.max_abs() == 0.0);
    CHECK(result.iterations == 1);
    CHECK(testing::max_abs_diff(as_vector(result.mean_curve), as_vector(y)) <= 1e-14);
    CHECK_THROWS_AS(procrustes_mean({}, DeformationFamily::translation()), DomainError);
}

TEST_CASE("procrustes mean recovers shifts up to a constant") {
    const std::vector<double> shifts{0.05, -0.02, 0.07, -0.08, 0.0};
    const auto signals = shifted_copies(bump(), shifts, 128);
    const auto result = procrustes_mean(signals, DeformationFamily::translation());
    double est_mean = 0.0, true_mean = 0.0;
    for (std::size_t j = 0; j < 5; ++j) est_mean += result.ensemble(j, 0) / 5.0, true_mean += shifts[j] / 5.0;
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(std::abs((result.ensemble(j, 0) - est_mean) - (shifts[j] - true_mean)) <= 1e-2);
}

TEST_CASE("procrustes residual never increases across rounds") {
    for (std::uint64_t seed : {1, 2, 3}) {
        Rng rng(seed);
        SimulationConfig sim;
        sim.J = seed == 1 ? 15 : 5;
        const auto data = simulate_dataset(default_mean_shape(), sim, rng);
        for (const auto& family : {DeformationFamily::translation(), DeformationFamily::diffeo(VelocityBasis())}) {
            ProcrustesConfig cfg;
            cfg.max_rounds = 5;
            const auto values = procrustes_mean(data.signals, family, cfg).criterion_values();
            REQUIRE(!values.empty());
            for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] <= values[i - 1] * (1.0 + 1e-12));
        }
    }
}

}

// Replicated simulation checks, registered as their own test so that their
// outcome stays visible next to the deterministic contracts above.
TEST_SUITE("monte-carlo") {

TEST_CASE("frechet mean beats the euclidean mean on shifted noisy data") {
    SimulationConfig sim;
    int wins = 0;
    const auto truth = default_mean_shape().sample(sim.n);
    for (int m = 0; m < 100; ++m) {
        Rng rng(11, static_cast<std::uint64_t>(m));
        const auto data = simulate_dataset(default_mean_shape(), sim, rng);
        const auto frechet = frechet_mean(data.signals, {}, DeformationFamily::translation());
        wins += mse(frechet.mean_curve, truth) < mse(euclidean_mean(data.signals), truth);
    }
    MESSAGE("frechet below euclidean in " << wins << " of 100");
    CHECK(wins >= 90);
}

}
