#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "curvemean/core.hpp"
#include "curvemean/criterion.hpp"
#include "curvemean/optimizer.hpp"
#include "curvemean/smoothing.hpp"

namespace curvemean {

/// Per-signal denoising choice, written as one of
///   "none", "fourier-gcv", "fourier-fixed:<cutoff>", "wavelet[:<filter>[:<m0>]]".
struct SmootherSpec {
    enum class Method { none, fourier_gcv, fourier_fixed, wavelet };

    Method method = Method::fourier_gcv;
    int cutoff = 0;
    WaveletFilter filter = WaveletFilter::db4;
    int coarse_level = 3;

    static SmootherSpec parse(std::string_view text);
    std::string to_string() const;
};

SmoothedCurve smooth(const SampledSignal& signal, const SmootherSpec& spec);
std::vector<SmoothedCurve> smooth_all(const std::vector<SampledSignal>& signals, const SmootherSpec& spec,
                                      int threads = 1);

/// "translation", or "diffeo" with the given basis and ODE settings.
DeformationFamily make_family(std::string_view name, int basis_size = 10, int degree = 3, int ode_steps = kDefaultOdeSteps);

SampledSignal euclidean_mean(const std::vector<SampledSignal>& signals);

/// Smooth every signal, align by minimizing M over the zero-mean ensembles,
/// and average the back-transformed smoothed curves on the signal grid.
AlignmentResult frechet_mean(const std::vector<SampledSignal>& signals, const SmootherSpec& smoother,
                             const DeformationFamily& family, const OptimizerConfig& config = {},
                             int threads = 1);

struct ProcrustesConfig {
    int max_rounds = 20;
    double tolerance = 1e-8;     ///< sup-norm template change that ends the rounds
    double search_radius = 0.25;  ///< translation search interval [-r, r]
    double search_precision = 1e-6;
    OptimizerConfig registration;  ///< used for non-rigid registration
    int threads = 1;
};

/// Template-based alternation on the linear interpolants of the raw data.
/// The trace holds the mean squared registration residual of every round;
/// parameters follow the back-transform convention of frechet_mean.
AlignmentResult procrustes_mean(const std::vector<SampledSignal>& signals, const DeformationFamily& family,
                                const ProcrustesConfig& config = {});

/// (1/n) sum_l (estimate_l - truth_l)^2
double mse(const SampledSignal& estimate, const SampledSignal& truth);

}  // namespace curvemean
