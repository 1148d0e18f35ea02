#include "curvemean/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace curvemean {

namespace {

int parse_int(std::string_view text, std::string_view what) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw DomainError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

void check_equal_lengths(const std::vector<SampledSignal>& signals) {
    if (signals.empty()) throw DomainError("no signals given");
    for (std::size_t j = 1; j < signals.size(); ++j)
        if (signals[j].size() != signals[0].size())
            throw DomainError("signal " + std::to_string(j) + " has " + std::to_string(signals[j].size()) +
                              " samples, expected " + std::to_string(signals[0].size()));
}

}  // namespace

SmootherSpec SmootherSpec::parse(std::string_view text) {
    SmootherSpec spec;
    const auto parts = split(text, ':');
    const auto head = parts.front();
    if (head == "none" && parts.size() == 1) {
        spec.method = Method::none;
    } else if (head == "fourier-gcv" && parts.size() == 1) {
        spec.method = Method::fourier_gcv;
    } else if (head == "fourier-fixed" && parts.size() == 2) {
        spec.method = Method::fourier_fixed;
        spec.cutoff = parse_int(parts[1], "Fourier cutoff");
        if (spec.cutoff < 0) throw DomainError("Fourier cutoff must be non-negative");
    } else if (head == "wavelet" && parts.size() <= 3) {
        spec.method = Method::wavelet;
        if (parts.size() >= 2) spec.filter = parse_wavelet_filter(parts[1]);
        if (parts.size() == 3) spec.coarse_level = parse_int(parts[2], "coarse wavelet level");
    } else {
        throw DomainError("unknown smoother '" + std::string(text) +
                          "' (expected none, fourier-gcv, fourier-fixed:<cutoff> or wavelet:<haar|db4>:<m0>)");
    }
    return spec;
}

std::string SmootherSpec::to_string() const {
    switch (method) {
        case Method::none: return "none";
        case Method::fourier_gcv: return "fourier-gcv";
        case Method::fourier_fixed: return "fourier-fixed:" + std::to_string(cutoff);
        case Method::wavelet:
            return "wavelet:" + std::string(wavelet_filter_name(filter)) + ":" + std::to_string(coarse_level);
    }
    return {};
}

SmoothedCurve smooth(const SampledSignal& signal, const SmootherSpec& spec) {
    switch (spec.method) {
        case SmootherSpec::Method::none:
            return SmoothedCurve::grid({signal.values().begin(), signal.values().end()});
        case SmootherSpec::Method::fourier_gcv:
            return fourier_smooth(signal, gcv_select_cutoff(signal, max_gcv_cutoff(signal.size())));
        case SmootherSpec::Method::fourier_fixed:
            return fourier_smooth(signal, spec.cutoff);
        case SmootherSpec::Method::wavelet:
            return wavelet_smooth(signal, spec.filter, spec.coarse_level);
    }
    throw DomainError("unhandled smoother");
}

std::vector<SmoothedCurve> smooth_all(const std::vector<SampledSignal>& signals, const SmootherSpec& spec,
                                      int threads) {
    std::vector<std::optional<SmoothedCurve>> slots(signals.size());
    parallel_for(signals.size(), threads, [&](std::size_t j) { slots[j] = smooth(signals[j], spec); });
    std::vector<SmoothedCurve> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

DeformationFamily make_family(std::string_view name, int basis_size, int degree, int ode_steps) {
    if (name == "translation") return DeformationFamily::translation();
    if (name == "diffeo") return DeformationFamily::diffeo(VelocityBasis(basis_size, degree), ode_steps);
    throw DomainError("unknown deformation family '" + std::string(name) + "' (expected translation or diffeo)");
}

SampledSignal euclidean_mean(const std::vector<SampledSignal>& signals) {
    check_equal_lengths(signals);
    std::vector<double> acc(signals[0].size(), 0.0);
    for (const auto& s : signals)
        for (std::size_t l = 0; l < acc.size(); ++l) acc[l] += s[l];
    for (double& v : acc) v /= static_cast<double>(signals.size());
    return SampledSignal(std::move(acc));
}

AlignmentResult frechet_mean(const std::vector<SampledSignal>& signals, const SmootherSpec& smoother,
                             const DeformationFamily& family, const OptimizerConfig& config, int threads) {
    check_equal_lengths(signals);
    CriterionContext ctx(smooth_all(signals, smoother, threads), family, signals[0].size(), threads);
    return minimize(ctx, config);
}

namespace {

// Registration of one interpolated signal onto a template sampled on the grid,
// in the back-transform convention: residual of Y(phi_{-theta}(t_l)) - T_l.
class Registration {
public:
    Registration(const SmoothedCurve& signal, const std::vector<double>& target, const DeformationFamily& family)
        : signal_(signal), target_(target), family_(family) {}

    double node(std::size_t l) const {
        return static_cast<double>(l + 1) / static_cast<double>(target_.size());
    }

    std::vector<double> nodes() const {
        std::vector<double> out(target_.size());
        for (std::size_t l = 0; l < out.size(); ++l) out[l] = node(l);
        return out;
    }

    std::vector<double> warped(std::span<const double> theta) const {
        std::vector<double> out(target_.size());
        if (family_.is_translation()) {
            for (std::size_t l = 0; l < out.size(); ++l) out[l] = signal_.value(node(l) + theta[0]);
            return out;
        }
        std::vector<double> neg(theta.size());
        for (std::size_t q = 0; q < theta.size(); ++q) neg[q] = -theta[q];
        const DiffeoOperator op(family_.basis(), std::move(neg), family_.ode_steps());
        op.flow(nodes(), out);
        for (double& v : out) v = signal_.value(v);
        return out;
    }

    double residual(std::span<const double> theta) const {
        const auto w = warped(theta);
        double s = 0.0;
        for (std::size_t l = 0; l < w.size(); ++l) {
            const double r = w[l] - target_[l];
            s += r * r;
        }
        return s / static_cast<double>(target_.size());
    }

    ParamArray gradient(const ParamArray& theta) const {
        const std::size_t p = family_.dim();
        std::vector<double> neg(p);
        for (std::size_t q = 0; q < p; ++q) neg[q] = -theta(0, q);
        const DiffeoOperator op(family_.basis(), std::move(neg), family_.ode_steps());
        ParamArray grad(1, p);
        const auto samples = op.sample(nodes());
        for (std::size_t l = 0; l < target_.size(); ++l) {
            const auto& s = samples[l];
            double v, d;
            signal_.value_and_derivative(s.value, v, d);
            const double w = 2.0 * (v - target_[l]) * d / static_cast<double>(target_.size());
            for (std::size_t q = 0; q < p; ++q) grad(0, q) -= w * s.gradient[q];
        }
        return grad;
    }

private:
    const SmoothedCurve& signal_;
    const std::vector<double>& target_;
    const DeformationFamily& family_;
};

double golden_section(const std::function<double(double)>& f, double lo, double hi, double precision) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > precision) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> register_translation(const Registration& reg, double previous, const ProcrustesConfig& cfg) {
    const auto cost = [&](double theta) { return reg.residual({&theta, 1}); };
    double theta = golden_section(cost, -cfg.search_radius, cfg.search_radius, cfg.search_precision);
    // never worse than the previous round, so the residual cannot grow
    if (cost(previous) <= cost(theta)) theta = previous;
    return {theta};
}

std::vector<double> register_diffeo(const Registration& reg, std::span<const double> previous,
                                    const DeformationFamily& family, const OptimizerConfig& cfg) {
    Objective obj;
    obj.value = [&](const ParamArray& p) { return reg.residual(p.row(0)); };
    obj.gradient = [&](const ParamArray& p) { return reg.gradient(p); };
    obj.zero_mean = false;
    obj.parameter_bound = family.parameter_bound();
    ParamArray start(1, previous.size());
    std::copy(previous.begin(), previous.end(), start.row(0).begin());
    auto run = descend(obj, cfg, std::move(start));
    return run.params.rows().front();
}

}  // namespace

AlignmentResult procrustes_mean(const std::vector<SampledSignal>& signals, const DeformationFamily& family,
                                const ProcrustesConfig& config) {
    check_equal_lengths(signals);
    config.registration.validate();
    if (config.max_rounds < 1) throw DomainError("Procrustes needs at least one round");
    const std::size_t J = signals.size();
    const std::size_t n = signals[0].size();
    const std::size_t p = family.dim();

    std::vector<SmoothedCurve> interpolants;
    interpolants.reserve(J);
    for (const auto& s : signals) interpolants.push_back(SmoothedCurve::grid({s.values().begin(), s.values().end()}));

    auto euclid = euclidean_mean(signals);
    std::vector<double> templ(euclid.values().begin(), euclid.values().end());
    ParamArray params(J, p);

    AlignmentResult result;
    for (int round = 1; round <= config.max_rounds; ++round) {
        std::vector<std::vector<double>> warped(J);
        std::vector<double> residuals(J);
        parallel_for(J, config.threads, [&](std::size_t j) {
            const Registration reg(interpolants[j], templ, family);
            std::vector<double> theta =
                family.is_translation()
                    ? register_translation(reg, params(j, 0), config)
                    : register_diffeo(reg, params.row(j), family, config.registration);
            std::copy(theta.begin(), theta.end(), params.row(j).begin());
            residuals[j] = reg.residual(theta);
            warped[j] = reg.warped(theta);
        });

        std::vector<double> next(n, 0.0);
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t l = 0; l < n; ++l) next[l] += warped[j][l];
        double change = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            next[l] /= static_cast<double>(J);
            change = std::max(change, std::abs(next[l] - templ[l]));
        }
        double mean_residual = 0.0;
        for (double r : residuals) mean_residual += r;
        result.trace.push_back({mean_residual / static_cast<double>(J), 0.0, 0});
        result.iterations = round;
        templ = std::move(next);
        if (change <= config.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.ensemble = std::move(params);
    result.mean_curve = SampledSignal(std::move(templ));
    return result;
}

double mse(const SampledSignal& estimate, const SampledSignal& truth) {
    if (estimate.size() != truth.size())
        throw DomainError("MSE of signals with different lengths (" + std::to_string(estimate.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
    double s = 0.0;
    for (std::size_t l = 0; l < truth.size(); ++l) {
        const double d = estimate[l] - truth[l];
        s += d * d;
    }
    return s / static_cast<double>(truth.size());
}

}  // namespace curvemean
