#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "curvemean/core.hpp"

namespace curvemean {

// ---------------------------------------------------------------------------
// Low-pass Fourier filtering
// ---------------------------------------------------------------------------

struct FourierFit {
    std::vector<std::complex<double>> coefficients;  ///< c_0..c_cutoff
    int cutoff = 0;
};

/// Largest admissible cutoff for n samples: floor((n-1)/2).
int max_fourier_cutoff(std::size_t n);

/// c_k = (1/n) sum_l y_l exp(-2 pi i k l / n) for k = 0..n-1, with l = 1..n.
std::vector<std::complex<double>> dft_coefficients(const SampledSignal& signal);

FourierFit fourier_fit(const SampledSignal& signal, int cutoff);
SmoothedCurve fourier_smooth(const SampledSignal& signal, int cutoff);

/// Residual sum of squares of the cutoff-lambda fit, for lambda = 0..max_cutoff.
std::vector<double> fourier_rss_path(const SampledSignal& signal, int max_cutoff);

/// GCV(lambda) = (RSS/n) / (1 - (2 lambda + 1)/n)^2 for lambda = 0..max_cutoff.
std::vector<double> gcv_scores(const SampledSignal& signal, int max_cutoff);

/// argmin of gcv_scores; ties go to the smallest cutoff.
int gcv_select_cutoff(const SampledSignal& signal, int max_cutoff);

/// Largest cutoff for which the GCV denominator stays positive.
int max_gcv_cutoff(std::size_t n);

// ---------------------------------------------------------------------------
// Wavelet hard thresholding
// ---------------------------------------------------------------------------

enum class WaveletFilter { haar, db4 };

/// Accepts "haar" and "db4".
WaveletFilter parse_wavelet_filter(std::string_view name);
std::string_view wavelet_filter_name(WaveletFilter filter);

/// Orthonormal low-pass reconstruction filter taps.
const std::vector<double>& wavelet_lowpass(WaveletFilter filter);

struct WaveletCoefficients {
    int coarse_level = 0;                   ///< m0
    std::vector<double> scaling;            ///< 2^m0 coefficients at level m0
    std::vector<std::vector<double>> detail;  ///< detail[m - m0] holds 2^m coefficients, m = m0..m1
};

struct WaveletFit {
    WaveletCoefficients coefficients;  ///< after thresholding
    double threshold = 0.0;
    double noise_estimate = 0.0;
    std::size_t kept = 0;
    std::size_t total = 0;
};

bool is_power_of_two(std::size_t n);

/// Periodic DWT from n = 2^L samples down to level m0.
WaveletCoefficients dwt(const SampledSignal& signal, WaveletFilter filter, int m0);
std::vector<double> idwt(const WaveletCoefficients& coefficients, WaveletFilter filter);

/// median(|b - median(b)|) / 0.6745
double mad_noise_estimate(std::span<const double> finest_detail);

WaveletFit wavelet_fit(const SampledSignal& signal, WaveletFilter filter, int m0);
SmoothedCurve wavelet_smooth(const SampledSignal& signal, WaveletFilter filter, int m0 = 3);

}  // namespace curvemean
