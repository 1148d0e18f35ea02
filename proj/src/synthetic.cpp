#include "curvemean/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvemean/smoothing.hpp"

namespace curvemean {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double Rng::normal() { return standard_(engine_); }

void SimulationConfig::validate() const {
    if (n < 2) throw DomainError("simulation needs n >= 2");
    if (J < 1) throw DomainError("simulation needs J >= 1");
    if (!(shift_variance >= 0.0)) throw DomainError("shift variance must be non-negative");
    if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    if (gp_truncation < 1) throw DomainError("GP truncation K must be at least 1");
    if (replications < 1) throw DomainError("need at least one replication");
}

SmoothedCurve sample_gp(double sigma, int truncation, Rng& rng) {
    if (truncation < 1) throw DomainError("GP truncation K must be at least 1");
    std::vector<std::complex<double>> c(static_cast<std::size_t>(truncation) + 1);
    c[0] = sigma * rng.normal();
    for (int k = 1; k <= truncation; ++k) {
        const double a = sigma * rng.normal();
        const double b = sigma * rng.normal();
        // 2 Re(c_k e^{2 pi i k t}) = sqrt2 k^{-3/2} (a cos + b sin)
        const double scale = std::pow(static_cast<double>(k), -1.5) / std::numbers::sqrt2;
        c[static_cast<std::size_t>(k)] = {scale * a, -scale * b};
    }
    return SmoothedCurve::fourier(std::move(c));
}

double gp_variance(double sigma, int truncation) {
    double s = 1.0;
    for (int k = 1; k <= truncation; ++k) s += 2.0 * std::pow(static_cast<double>(k), -3.0);
    return sigma * sigma * s;
}

SyntheticDataset simulate_dataset(const SmoothedCurve& shape, const SimulationConfig& cfg, Rng& rng) {
    cfg.validate();
    SyntheticDataset out;
    const double spread = std::sqrt(cfg.shift_variance);
    out.true_shifts.resize(cfg.J);
    for (auto& s : out.true_shifts) s = spread * rng.normal();

    std::vector<SmoothedCurve> processes;
    processes.reserve(cfg.J);
    for (std::size_t j = 0; j < cfg.J; ++j) processes.push_back(sample_gp(cfg.sigma, cfg.gp_truncation, rng));

    out.signals.reserve(cfg.J);
    for (std::size_t j = 0; j < cfg.J; ++j) {
        std::vector<double> y(cfg.n);
        for (std::size_t l = 0; l < cfg.n; ++l) {
            const double t = static_cast<double>(l + 1) / static_cast<double>(cfg.n) - out.true_shifts[j];
            y[l] = shape.value(t) + processes[j].value(t) + cfg.sigma * rng.normal();
        }
        out.signals.emplace_back(std::move(y));
    }
    return out;
}

SmoothedCurve bump_shape(const std::vector<Bump>& bumps) {
    constexpr std::size_t kDense = 4096;
    constexpr int kCutoff = 400;
    std::vector<double> y(kDense, 0.0);
    for (std::size_t l = 0; l < kDense; ++l) {
        const double t = static_cast<double>(l + 1) / static_cast<double>(kDense);
        for (const auto& b : bumps)
            for (int wrap = -1; wrap <= 1; ++wrap) {
                const double z = (t - b.centre + wrap) / b.width;
                y[l] += b.amplitude * std::exp(-0.5 * z * z);
            }
    }
    return fourier_smooth(SampledSignal(std::move(y)), kCutoff);
}

SmoothedCurve default_mean_shape() { return bump_shape({{0.4, 0.05, 1.0}, {0.6, 0.05, -1.0}}); }

FiveNumberSummary summarize(std::vector<double> values) {
    if (values.empty()) throw DomainError("cannot summarize an empty sample");
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    FiveNumberSummary s;
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    double total = 0.0;
    for (double v : values) total += v;
    s.mean = total / static_cast<double>(values.size());
    return s;
}

BenchmarkResult run_benchmark(const SmoothedCurve& shape, const SimulationConfig& cfg,
                              const OptimizerConfig& optimizer, const ProcrustesConfig& procrustes) {
    cfg.validate();
    if (cfg.J < 2) throw DomainError("the benchmark needs J >= 2 signals");
    const auto M = static_cast<std::size_t>(cfg.replications);
    BenchmarkResult out;
    out.frechet_mses.resize(M);
    out.procrustes_mses.resize(M);
    const SampledSignal truth = shape.sample(cfg.n);
    const SmootherSpec gcv = SmootherSpec::parse("fourier-gcv");
    const auto family = DeformationFamily::translation();
    ProcrustesConfig pcfg = procrustes;
    pcfg.threads = 1;

    parallel_for(M, cfg.threads, [&](std::size_t m) {
        Rng rng(cfg.seed, m);
        const auto data = simulate_dataset(shape, cfg, rng);
        const auto frechet = frechet_mean(data.signals, gcv, family, optimizer, 1);
        const auto baseline = procrustes_mean(data.signals, family, pcfg);
        out.frechet_mses[m] = mse(frechet.mean_curve, truth);
        out.procrustes_mses[m] = mse(baseline.mean_curve, truth);
    });

    out.frechet = summarize(out.frechet_mses);
    out.procrustes = summarize(out.procrustes_mses);
    for (std::size_t m = 0; m < M; ++m)
        if (out.frechet_mses[m] < out.procrustes_mses[m]) ++out.frechet_wins;
    return out;
}

}  // namespace curvemean
