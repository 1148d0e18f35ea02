#include "curvemean/core.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace curvemean {

SampledSignal::SampledSignal(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw DomainError("a sampled signal needs at least 2 samples");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("sampled signal contains a non-finite value");
}

double wrap_unit(double t) {
    if (!std::isfinite(t)) throw DomainError("curve evaluated at a non-finite time");
    double r = t - std::floor(t);
    // t slightly below an integer can round up to exactly 1
    return r >= 1.0 ? 0.0 : r;
}

SmoothedCurve SmoothedCurve::constant(double value) {
    return fourier({std::complex<double>(value, 0.0)});
}

SmoothedCurve SmoothedCurve::fourier(std::vector<std::complex<double>> coefficients) {
    if (coefficients.empty()) throw DomainError("Fourier curve needs at least the constant coefficient");
    for (auto c : coefficients)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw DomainError("Fourier curve has a non-finite coefficient");
    // c_0 = conj(c_0) for a real series
    coefficients[0] = {coefficients[0].real(), 0.0};
    SmoothedCurve out;
    out.rep_ = FourierForm{std::move(coefficients)};
    return out;
}

SmoothedCurve SmoothedCurve::grid(std::vector<double> samples) {
    if (samples.size() < 2) throw DomainError("grid curve needs at least 2 samples");
    for (double v : samples)
        if (!std::isfinite(v)) throw DomainError("grid curve has a non-finite sample");
    SmoothedCurve out;
    out.rep_ = GridForm{std::move(samples)};
    return out;
}

int SmoothedCurve::cutoff() const {
    if (!is_fourier()) throw DomainError("cutoff requested from a grid-form curve");
    return static_cast<int>(std::get<FourierForm>(rep_).c.size()) - 1;
}

std::span<const std::complex<double>> SmoothedCurve::coefficients() const {
    if (!is_fourier()) throw DomainError("coefficients requested from a grid-form curve");
    return std::get<FourierForm>(rep_).c;
}

std::span<const double> SmoothedCurve::samples() const {
    if (is_fourier()) throw DomainError("samples requested from a Fourier-form curve");
    return std::get<GridForm>(rep_).y;
}

void SmoothedCurve::value_and_derivative(double t, double& value, double& slope) const {
    const double u = wrap_unit(t);
    if (const auto* f = std::get_if<FourierForm>(&rep_)) {
        const auto& c = f->c;
        const double angle = 2.0 * std::numbers::pi * u;
        const std::complex<double> step(std::cos(angle), std::sin(angle));
        std::complex<double> z = step;
        double v = c[0].real();
        double d = 0.0;
        for (std::size_t k = 1; k < c.size(); ++k) {
            const std::complex<double> term = c[k] * z;
            v += 2.0 * term.real();
            // Re(2*pi*i*k*term) = -2*pi*k*Im(term)
            d -= 2.0 * 2.0 * std::numbers::pi * static_cast<double>(k) * term.imag();
            z *= step;
        }
        value = v;
        slope = d;
        return;
    }
    const auto& y = std::get<GridForm>(rep_).y;
    const std::size_t n = y.size();
    const double pos = u * static_cast<double>(n);
    std::size_t node = static_cast<std::size_t>(pos);
    if (node >= n) node = n - 1;
    const double frac = pos - static_cast<double>(node);
    // grid node m sits at t = m/n and holds sample index m-1 (node 0 wraps to n-1)
    const double left = y[node == 0 ? n - 1 : node - 1];
    const double right = y[node];
    value = left + frac * (right - left);
    slope = (right - left) * static_cast<double>(n);
}

double SmoothedCurve::value(double t) const {
    double v, d;
    value_and_derivative(t, v, d);
    return v;
}

double SmoothedCurve::derivative(double t) const {
    double v, d;
    value_and_derivative(t, v, d);
    return d;
}

SampledSignal SmoothedCurve::sample(std::size_t n) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = value(static_cast<double>(i + 1) / static_cast<double>(n));
    return SampledSignal(std::move(out));
}

double evaluate(const SmoothedCurve& curve, double t) { return curve.value(t); }

double evaluate_derivative(const SmoothedCurve& curve, double t) { return curve.derivative(t); }

ParamArray::ParamArray(std::size_t count, std::size_t dim, double fill)
    : count_(count), dim_(dim), data_(count * dim, fill) {}

ParamArray ParamArray::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    ParamArray out(rows.size(), rows.front().size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != out.dim_) throw DomainError("parameter vectors have different lengths");
        std::copy(rows[j].begin(), rows[j].end(), out.row(j).begin());
    }
    return out;
}

std::vector<std::vector<double>> ParamArray::rows() const {
    std::vector<std::vector<double>> out(count_);
    for (std::size_t j = 0; j < count_; ++j) out[j].assign(row(j).begin(), row(j).end());
    return out;
}

double ParamArray::norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double ParamArray::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

ParamEnsemble project_zero_mean(const ParamArray& raw) {
    if (raw.count() == 0) throw DomainError("cannot project an empty parameter ensemble");
    ParamArray out = raw;
    const double inv = 1.0 / static_cast<double>(raw.count());
    for (std::size_t q = 0; q < raw.dim(); ++q) {
        double mean = 0.0;
        for (std::size_t j = 0; j < raw.count(); ++j) mean += raw(j, q);
        mean *= inv;
        for (std::size_t j = 0; j < raw.count(); ++j) out(j, q) = raw(j, q) - mean;
    }
    return out;
}

ParamEnsemble project_zero_mean(const std::vector<std::vector<double>>& raw) {
    if (raw.empty()) throw DomainError("cannot project an empty parameter ensemble");
    return project_zero_mean(ParamArray::from_rows(raw));
}

double max_column_sum(const ParamArray& params) {
    double worst = 0.0;
    for (std::size_t q = 0; q < params.dim(); ++q) {
        double s = 0.0;
        for (std::size_t j = 0; j < params.count(); ++j) s += params(j, q);
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

std::vector<double> AlignmentResult::criterion_values() const {
    std::vector<double> out;
    out.reserve(trace.size());
    for (const auto& e : trace) out.push_back(e.criterion);
    return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += workers) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace curvemean
