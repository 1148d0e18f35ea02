#include "curvemean/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace curvemean {

int max_fourier_cutoff(std::size_t n) { return static_cast<int>((n - 1) / 2); }

int max_gcv_cutoff(std::size_t n) {
    // need 2*lambda + 1 < n
    return static_cast<int>(n) % 2 == 0 ? static_cast<int>(n) / 2 - 1 : (static_cast<int>(n) - 3) / 2;
}

namespace {

std::vector<std::complex<double>> dft_range(const SampledSignal& signal, std::size_t count) {
    const std::size_t n = signal.size();
    std::vector<std::complex<double>> twiddle(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        twiddle[m] = {std::cos(angle), std::sin(angle)};
    }
    std::vector<std::complex<double>> c(count);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < count; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t l = 1; l <= n; ++l) acc += signal[l - 1] * twiddle[(k * l) % n];
        c[k] = acc * inv_n;
    }
    return c;
}

}  // namespace

std::vector<std::complex<double>> dft_coefficients(const SampledSignal& signal) {
    return dft_range(signal, signal.size());
}

FourierFit fourier_fit(const SampledSignal& signal, int cutoff) {
    if (cutoff < 0 || cutoff > max_fourier_cutoff(signal.size()))
        throw DomainError("Fourier cutoff " + std::to_string(cutoff) + " outside [0, " +
                          std::to_string(max_fourier_cutoff(signal.size())) + "]");
    return {dft_range(signal, static_cast<std::size_t>(cutoff) + 1), cutoff};
}

SmoothedCurve fourier_smooth(const SampledSignal& signal, int cutoff) {
    return SmoothedCurve::fourier(fourier_fit(signal, cutoff).coefficients);
}

std::vector<double> fourier_rss_path(const SampledSignal& signal, int max_cutoff) {
    const std::size_t n = signal.size();
    if (max_cutoff < 0 || max_cutoff > max_fourier_cutoff(n))
        throw DomainError("maximum cutoff outside the admissible range");
    const auto c = dft_coefficients(signal);
    // Parseval: RSS(lambda) = n * sum of |c_k|^2 over the discarded indices
    // lambda < k < n - lambda. Accumulate from the middle outwards.
    std::vector<double> rss(static_cast<std::size_t>(max_fourier_cutoff(n)) + 1);
    double tail = 0.0;
    if (n % 2 == 0) tail += std::norm(c[n / 2]);
    for (int lambda = max_fourier_cutoff(n); lambda >= 0; --lambda) {
        rss[static_cast<std::size_t>(lambda)] = static_cast<double>(n) * tail;
        if (lambda > 0) {
            const auto k = static_cast<std::size_t>(lambda);
            tail += std::norm(c[k]) + std::norm(c[n - k]);
        }
    }
    rss.resize(static_cast<std::size_t>(max_cutoff) + 1);
    return rss;
}

std::vector<double> gcv_scores(const SampledSignal& signal, int max_cutoff) {
    const std::size_t n = signal.size();
    if (max_cutoff < 0 || max_cutoff > max_gcv_cutoff(n))
        throw DomainError("GCV maximum cutoff " + std::to_string(max_cutoff) +
                          " makes the GCV denominator vanish (need 2*cutoff+1 < n = " + std::to_string(n) + ")");
    const auto rss = fourier_rss_path(signal, max_cutoff);
    const double nd = static_cast<double>(n);
    std::vector<double> score(rss.size());
    for (std::size_t lambda = 0; lambda < rss.size(); ++lambda) {
        const double shrink = 1.0 - (2.0 * static_cast<double>(lambda) + 1.0) / nd;
        score[lambda] = (rss[lambda] / nd) / (shrink * shrink);
    }
    return score;
}

int gcv_select_cutoff(const SampledSignal& signal, int max_cutoff) {
    const auto score = gcv_scores(signal, max_cutoff);
    std::size_t best = 0;
    for (std::size_t lambda = 1; lambda < score.size(); ++lambda)
        if (score[lambda] < score[best]) best = lambda;
    return static_cast<int>(best);
}

WaveletFilter parse_wavelet_filter(std::string_view name) {
    if (name == "haar") return WaveletFilter::haar;
    if (name == "db4") return WaveletFilter::db4;
    throw DomainError("unknown wavelet filter '" + std::string(name) + "' (expected haar or db4)");
}

std::string_view wavelet_filter_name(WaveletFilter filter) {
    return filter == WaveletFilter::haar ? "haar" : "db4";
}

const std::vector<double>& wavelet_lowpass(WaveletFilter filter) {
    static const std::vector<double> haar{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
    // Daubechies, 4 vanishing moments (8 taps)
    static const std::vector<double> db4{
        0.23037781330885523,  0.7148465705525415,  0.6308807679295904,   -0.02798376941698385,
        -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278};
    return filter == WaveletFilter::haar ? haar : db4;
}

bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

namespace {

int log2_exact(std::size_t n) {
    int l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

std::vector<double> highpass_from(const std::vector<double>& h) {
    const std::size_t len = h.size();
    std::vector<double> g(len);
    for (std::size_t i = 0; i < len; ++i) g[i] = (i % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - i];
    return g;
}

void analysis_step(const std::vector<double>& x, const std::vector<double>& h, const std::vector<double>& g,
                   std::vector<double>& approx, std::vector<double>& detail) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double v = x[(2 * k + i) % n];
            a += h[i] * v;
            d += g[i] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

std::vector<double> synthesis_step(const std::vector<double>& approx, const std::vector<double>& detail,
                                   const std::vector<double>& h, const std::vector<double>& g) {
    const std::size_t half = approx.size();
    const std::size_t n = 2 * half;
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < half; ++k)
        for (std::size_t i = 0; i < h.size(); ++i) x[(2 * k + i) % n] += h[i] * approx[k] + g[i] * detail[k];
    return x;
}

}  // namespace

WaveletCoefficients dwt(const SampledSignal& signal, WaveletFilter filter, int m0) {
    const std::size_t n = signal.size();
    if (!is_power_of_two(n))
        throw DomainError("wavelet transform needs a power-of-two length, got " + std::to_string(n) +
                          " (use Fourier smoothing instead)");
    const int levels = log2_exact(n);
    if (m0 < 0 || m0 > levels - 1)
        throw DomainError("coarse level m0 = " + std::to_string(m0) + " outside [0, " + std::to_string(levels - 1) + "]");
    const auto& h = wavelet_lowpass(filter);
    const auto g = highpass_from(h);

    WaveletCoefficients out;
    out.coarse_level = m0;
    out.detail.resize(static_cast<std::size_t>(levels - m0));
    std::vector<double> current(signal.values().begin(), signal.values().end());
    std::vector<double> approx, detail;
    for (int m = levels - 1; m >= m0; --m) {
        analysis_step(current, h, g, approx, detail);
        out.detail[static_cast<std::size_t>(m - m0)] = detail;
        current.swap(approx);
    }
    out.scaling = std::move(current);
    return out;
}

std::vector<double> idwt(const WaveletCoefficients& coefficients, WaveletFilter filter) {
    const auto& h = wavelet_lowpass(filter);
    const auto g = highpass_from(h);
    std::vector<double> current = coefficients.scaling;
    for (const auto& detail : coefficients.detail) {
        if (detail.size() != current.size()) throw DomainError("inconsistent wavelet coefficient layout");
        current = synthesis_step(current, detail, h, g);
    }
    return current;
}

namespace {

double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

double mad_noise_estimate(std::span<const double> finest_detail) {
    if (finest_detail.empty()) throw DomainError("MAD of an empty coefficient set");
    std::vector<double> v(finest_detail.begin(), finest_detail.end());
    const double centre = median_of(v);
    for (double& x : v) x = std::abs(x - centre);
    return median_of(std::move(v)) / 0.6745;
}

WaveletFit wavelet_fit(const SampledSignal& signal, WaveletFilter filter, int m0) {
    WaveletFit fit;
    fit.coefficients = dwt(signal, filter, m0);
    fit.noise_estimate = mad_noise_estimate(fit.coefficients.detail.back());
    fit.threshold = fit.noise_estimate * std::sqrt(2.0 * std::log(static_cast<double>(signal.size())));
    for (auto& level : fit.coefficients.detail) {
        for (double& beta : level) {
            ++fit.total;
            if (std::abs(beta) >= fit.threshold)
                ++fit.kept;
            else
                beta = 0.0;
        }
    }
    return fit;
}

SmoothedCurve wavelet_smooth(const SampledSignal& signal, WaveletFilter filter, int m0) {
    const auto fit = wavelet_fit(signal, filter, m0);
    return SmoothedCurve::grid(idwt(fit.coefficients, filter));
}

}  // namespace curvemean
