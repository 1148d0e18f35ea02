#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "curvemean/core.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

// Random real Fourier curve with c_k ~ N(0, 1)/(1 + k)^2 for k = 0..cutoff.
inline curvemean::SmoothedCurve random_fourier(std::mt19937_64& rng, int cutoff, double decay = 2.0) {
    std::normal_distribution<double> normal;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(cutoff) + 1);
    for (int k = 0; k <= cutoff; ++k) {
        const double scale = 1.0 / std::pow(1.0 + k, decay);
        c[static_cast<std::size_t>(k)] = {scale * normal(rng), k == 0 ? 0.0 : scale * normal(rng)};
    }
    return curvemean::SmoothedCurve::fourier(std::move(c));
}

// Series evaluated term by term, negative frequencies included explicitly.
inline double fourier_value(const std::vector<std::complex<double>>& c, double t) {
    std::complex<double> sum = c[0];
    for (std::size_t k = 1; k < c.size(); ++k) {
        const std::complex<double> e = std::exp(std::complex<double>(0.0, 2.0 * kPi * static_cast<double>(k) * t));
        sum += c[k] * e + std::conj(c[k]) * std::conj(e);
    }
    return sum.real();
}

// Circular shift: returns the curve t -> f(t - c).
inline curvemean::SmoothedCurve rotate_fourier(const curvemean::SmoothedCurve& curve, double c) {
    std::vector<std::complex<double>> coeffs(curve.coefficients().begin(), curve.coefficients().end());
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        coeffs[k] *= std::exp(std::complex<double>(0.0, -2.0 * kPi * static_cast<double>(k) * c));
    return curvemean::SmoothedCurve::fourier(std::move(coeffs));
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    std::vector<double> v(n);
    for (double& x : v) x = normal(rng);
    return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

// Relative error measured in the sup norm over all components.
inline double relative_error(const std::vector<double>& got, const std::vector<double>& want) {
    const double scale = max_abs(want);
    return scale > 0.0 ? max_abs_diff(got, want) / scale : max_abs(got);
}

// Cardinal B-spline of degree d on [0, d+1] from the truncated-power formula.
inline double cardinal_bspline(double x, int d) {
    if (x <= 0.0 || x >= d + 1.0) return 0.0;
    double sum = 0.0, binom = 1.0, fact = 1.0;
    for (int i = 1; i <= d; ++i) fact *= i;
    for (int i = 0; i <= d + 1; ++i) {
        if (i > 0) binom = binom * (d + 2 - i) / i;
        const double y = x - i;
        if (y > 0.0) sum += (i % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(y, d);
    }
    return sum / fact;
}

// psi(1, t) for the field sum_k theta_k h_k by explicit Euler with many steps.
template <class Field>
double euler_flow(const Field& field, double t, int steps) {
    double psi = t;
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) psi += h * field(psi);
    return psi;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("curvemean_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace testing
