#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace curvemean {

/// Raised when an argument violates an operation's precondition.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Raised by the file readers; the message names the offending row/column.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// n samples observed at t_l = l/n, l = 1..n. Sample l (1-based) lives at
/// index l-1, so the last sample sits at t = 1, which is t = 0 periodically.
class SampledSignal {
public:
    SampledSignal() = default;
    explicit SampledSignal(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Grid time of the sample stored at index i.
    double time(std::size_t i) const {
        return static_cast<double>(i + 1) / static_cast<double>(values_.size());
    }

private:
    std::vector<double> values_;
};

/// Continuous, 1-periodic representation of a denoised signal.
///
/// Fourier form stores c_0..c_lambda; negative frequencies are implied by
/// conjugate symmetry so the series is real. Grid form stores samples at the
/// grid times of SampledSignal and interpolates linearly, wrapping the last
/// sample onto the first.
class SmoothedCurve {
public:
    static SmoothedCurve constant(double value);
    static SmoothedCurve fourier(std::vector<std::complex<double>> coefficients);
    static SmoothedCurve grid(std::vector<double> samples);

    bool is_fourier() const { return std::holds_alternative<FourierForm>(rep_); }

    /// Highest retained frequency. Fourier form only.
    int cutoff() const;
    std::span<const std::complex<double>> coefficients() const;
    std::span<const double> samples() const;

    double value(double t) const;
    double derivative(double t) const;

    /// Both value and derivative at t, sharing the trigonometric work.
    void value_and_derivative(double t, double& value, double& slope) const;

    /// Values at the n grid points t_l = l/n.
    SampledSignal sample(std::size_t n) const;

private:
    struct FourierForm {
        std::vector<std::complex<double>> c;
    };
    struct GridForm {
        std::vector<double> y;
    };

    SmoothedCurve() = default;
    std::variant<FourierForm, GridForm> rep_;
};

double evaluate(const SmoothedCurve& curve, double t);
double evaluate_derivative(const SmoothedCurve& curve, double t);

/// Reduces t to [0, 1). Throws DomainError for non-finite t.
double wrap_unit(double t);

/// J parameter vectors of common length p, stored row-major.
class ParamArray {
public:
    ParamArray() = default;
    ParamArray(std::size_t count, std::size_t dim, double fill = 0.0);
    static ParamArray from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t count() const { return count_; }
    std::size_t dim() const { return dim_; }

    std::span<double> row(std::size_t j) { return {data_.data() + j * dim_, dim_}; }
    std::span<const double> row(std::size_t j) const { return {data_.data() + j * dim_, dim_}; }
    double& operator()(std::size_t j, std::size_t q) { return data_[j * dim_ + q]; }
    double operator()(std::size_t j, std::size_t q) const { return data_[j * dim_ + q]; }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    std::vector<std::vector<double>> rows() const;

    double norm() const;
    double max_abs() const;

    bool operator==(const ParamArray&) const = default;

private:
    std::size_t count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// A ParamArray whose rows sum to zero (the constraint set of the alignment).
using ParamEnsemble = ParamArray;

ParamEnsemble project_zero_mean(const ParamArray& raw);
ParamEnsemble project_zero_mean(const std::vector<std::vector<double>>& raw);

/// Largest absolute component-wise column sum.
double max_column_sum(const ParamArray& params);

struct TraceEntry {
    double criterion = 0.0;
    double step = 0.0;
    int backtracks = 0;
};

struct AlignmentResult {
    ParamEnsemble ensemble;
    SampledSignal mean_curve;
    std::vector<TraceEntry> trace;
    int iterations = 0;
    bool converged = false;

    std::vector<double> criterion_values() const;
};

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// must write only its own output slot; the first exception is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace curvemean
