#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "curvemean/core.hpp"
#include "curvemean/estimators.hpp"

namespace curvemean {

/// Seeded 64-bit Mersenne Twister. Independent streams are derived from
/// (seed, stream) through std::seed_seq, so replication m always sees the
/// same numbers whatever the thread schedule.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> standard_{0.0, 1.0};
};

struct SimulationConfig {
    std::size_t n = 128;
    std::size_t J = 15;
    double shift_variance = 0.004;  ///< mu^2
    double sigma = 0.3;             ///< noise level, also the GP coefficient scale
    int gp_truncation = 50;         ///< K
    int replications = 100;         ///< M
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

/// Z(t) = a_0 + sum_{k<=K} k^{-3/2} (a_k sqrt2 cos(2 pi k t) + b_k sqrt2 sin(2 pi k t)),
/// all coefficients i.i.d. N(0, sigma^2), drawn in the order a_0, a_1, b_1, a_2, b_2, ...
SmoothedCurve sample_gp(double sigma, int truncation, Rng& rng);

/// Var Z(t) = sigma^2 (1 + 2 sum_{k<=K} k^{-3}).
double gp_variance(double sigma, int truncation);

struct SyntheticDataset {
    std::vector<SampledSignal> signals;
    std::vector<double> true_shifts;
};

/// Y_j^l = f(t_l - theta_j) + Z_j(t_l - theta_j) + sigma eps_j^l.
/// Draw order: the J shifts, then the GP coefficients of every signal, then
/// the noise row by row.
SyntheticDataset simulate_dataset(const SmoothedCurve& shape, const SimulationConfig& cfg, Rng& rng);

/// Default mean shape: +1 and -1 Gaussian bumps (sd 0.05) centred at 0.4
/// and 0.6, periodized, as a Fourier series.
SmoothedCurve default_mean_shape();

/// Periodized sum of Gaussian bumps, fitted as a Fourier series from a dense
/// sampling.
struct Bump {
    double centre;
    double width;
    double amplitude;
};
SmoothedCurve bump_shape(const std::vector<Bump>& bumps);

struct FiveNumberSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

/// Quartiles by linear interpolation between order statistics.
FiveNumberSummary summarize(std::vector<double> values);

struct BenchmarkResult {
    std::vector<double> frechet_mses;
    std::vector<double> procrustes_mses;
    FiveNumberSummary frechet;
    FiveNumberSummary procrustes;
    int frechet_wins = 0;  ///< replications with a strictly smaller Frechet MSE
};

/// Per replication: simulate, estimate by the GCV-smoothed translation
/// Frechet mean and by the unsmoothed translation Procrustes mean, and
/// score both against the shape on the grid.
BenchmarkResult run_benchmark(const SmoothedCurve& shape, const SimulationConfig& cfg,
                              const OptimizerConfig& optimizer = {}, const ProcrustesConfig& procrustes = {});

}  // namespace curvemean
