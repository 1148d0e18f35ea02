#include "curvemean/criterion.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace curvemean {

DeformationFamily DeformationFamily::diffeo(VelocityBasis basis, int ode_steps) {
    if (ode_steps < 1) throw DomainError("ODE step count must be positive");
    DeformationFamily f;
    f.kind_ = Kind::diffeo;
    f.basis_ = basis;
    f.ode_steps_ = ode_steps;
    return f;
}

const VelocityBasis& DeformationFamily::basis() const {
    if (!basis_) throw DomainError("translation family has no velocity basis");
    return *basis_;
}

double DeformationFamily::parameter_bound() const {
    if (is_translation()) return std::numeric_limits<double>::infinity();
    return 5.0 / basis_->max_basis_value();
}

double DeformationFamily::backward_warp(std::span<const double> theta, double t) const {
    if (is_translation()) return t + theta[0];
    std::vector<double> neg(theta.size());
    for (std::size_t q = 0; q < theta.size(); ++q) neg[q] = -theta[q];
    return DiffeoOperator(*basis_, std::move(neg), ode_steps_).flow(t);
}

CriterionContext::CriterionContext(std::vector<SmoothedCurve> curves, DeformationFamily family,
                                   std::size_t quadrature_points, int threads)
    : curves_(std::move(curves)), family_(std::move(family)), nodes_(quadrature_points), threads_(threads) {
    if (curves_.size() < 2)
        throw DomainError("the alignment criterion needs J >= 2 curves, got " + std::to_string(curves_.size()));
    if (nodes_ == 0) {
        for (const auto& c : curves_)
            if (!c.is_fourier()) {
                nodes_ = c.samples().size();
                break;
            }
        if (nodes_ == 0) throw DomainError("quadrature_points must be given for Fourier-form curves");
    }
    if (nodes_ < 2) throw DomainError("need at least 2 quadrature points");
}

namespace {

void check_params(const CriterionContext& ctx, const ParamArray& params) {
    if (params.count() != ctx.count())
        throw DomainError("parameter ensemble has " + std::to_string(params.count()) + " rows for " +
                          std::to_string(ctx.count()) + " curves");
    if (params.dim() != ctx.family().dim())
        throw DomainError("parameter dimension " + std::to_string(params.dim()) + " does not match the family (" +
                          std::to_string(ctx.family().dim()) + ")");
}

// Per-curve quantities at every quadrature node.
struct Backtransformed {
    std::vector<std::vector<double>> values;  // f_j(phi_{-theta_j}(t_l))
    std::vector<std::vector<double>> slopes;  // f_j'(phi_{-theta_j}(t_l))
    std::vector<std::vector<double>> warp_gradient;  // d phi_{-theta_j}(t_l) / d theta_j, l-major, p entries
    std::vector<double> mean;
};

Backtransformed backtransform(const CriterionContext& ctx, const ParamArray& params, bool need_slopes,
                              bool need_warp_gradient) {
    check_params(ctx, params);
    const std::size_t J = ctx.count();
    const std::size_t Q = ctx.quadrature_points();
    const auto& family = ctx.family();
    Backtransformed out;
    out.values.assign(J, {});
    if (need_slopes) out.slopes.assign(J, {});
    if (need_warp_gradient) out.warp_gradient.assign(J, {});

    parallel_for(J, ctx.threads(), [&](std::size_t j) {
        const auto& curve = ctx.curves()[j];
        auto& vals = out.values[j];
        vals.resize(Q);
        std::vector<double>* slopes = need_slopes ? &out.slopes[j] : nullptr;
        if (slopes) slopes->resize(Q);
        const auto theta = params.row(j);

        if (family.is_translation()) {
            for (std::size_t l = 0; l < Q; ++l) {
                double v, d;
                curve.value_and_derivative(ctx.node(l) + theta[0], v, d);
                vals[l] = v;
                if (slopes) (*slopes)[l] = d;
            }
            return;
        }

        const std::size_t p = family.dim();
        std::vector<double> neg(p);
        for (std::size_t q = 0; q < p; ++q) neg[q] = -theta[q];
        const DiffeoOperator op(family.basis(), std::move(neg), family.ode_steps());
        std::vector<double>* grads = need_warp_gradient ? &out.warp_gradient[j] : nullptr;
        if (grads) grads->resize(Q * p);
        std::vector<double> nodes(Q);
        for (std::size_t l = 0; l < Q; ++l) nodes[l] = ctx.node(l);
        std::vector<double> warped(Q);
        if (grads) {
            const auto samples = op.sample(nodes);
            for (std::size_t l = 0; l < Q; ++l) {
                warped[l] = samples[l].value;
                // phi_{-theta} depends on theta through eta = -theta
                for (std::size_t q = 0; q < p; ++q) (*grads)[l * p + q] = -samples[l].gradient[q];
            }
        } else {
            op.flow(nodes, warped);
        }
        for (std::size_t l = 0; l < Q; ++l) {
            double v, d;
            curve.value_and_derivative(warped[l], v, d);
            vals[l] = v;
            if (slopes) (*slopes)[l] = d;
        }
    });

    out.mean.assign(Q, 0.0);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t l = 0; l < Q; ++l) out.mean[l] += out.values[j][l];
    for (double& m : out.mean) m /= static_cast<double>(J);
    return out;
}

}  // namespace

double backtransformed_mean(const CriterionContext& ctx, const ParamArray& params, double t) {
    check_params(ctx, params);
    double sum = 0.0;
    for (std::size_t j = 0; j < ctx.count(); ++j)
        sum += ctx.curves()[j].value(ctx.family().backward_warp(params.row(j), t));
    return sum / static_cast<double>(ctx.count());
}

std::vector<double> backtransformed_mean_on_nodes(const CriterionContext& ctx, const ParamArray& params) {
    return backtransform(ctx, params, false, false).mean;
}

double evaluate_M(const CriterionContext& ctx, const ParamArray& params) {
    const auto bt = backtransform(ctx, params, false, false);
    double total = 0.0;
    for (std::size_t j = 0; j < ctx.count(); ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < bt.mean.size(); ++l) {
            const double r = bt.values[j][l] - bt.mean[l];
            s += r * r;
        }
        total += s;
    }
    return total / (static_cast<double>(ctx.count()) * static_cast<double>(ctx.quadrature_points()));
}

ParamArray grad_translation_time(const CriterionContext& ctx, const ParamArray& params, TranslationGradientForm form) {
    if (!ctx.family().is_translation()) throw DomainError("translation gradient requested for a non-rigid family");
    const auto bt = backtransform(ctx, params, true, false);
    const std::size_t J = ctx.count();
    const std::size_t Q = ctx.quadrature_points();
    const double scale = 2.0 / (static_cast<double>(J) * static_cast<double>(Q));
    ParamArray grad(J, 1);
    for (std::size_t j = 0; j < J; ++j) {
        double s = 0.0;
        if (form == TranslationGradientForm::exact) {
            for (std::size_t l = 0; l < Q; ++l) s += (bt.values[j][l] - bt.mean[l]) * bt.slopes[j][l];
            grad(j, 0) = scale * s;
        } else {
            for (std::size_t l = 0; l < Q; ++l) s += bt.slopes[j][l] * bt.mean[l];
            const auto& f = ctx.curves()[j];
            const double theta = params(j, 0);
            const double upper = f.value(1.0 + theta);
            const double lower = f.value(theta);
            grad(j, 0) = -scale * s + 2.0 / static_cast<double>(J) * (upper * upper - lower * lower);
        }
    }
    return grad;
}

ParamArray grad_translation_fourier(const CriterionContext& ctx, const ParamArray& params) {
    if (!ctx.family().is_translation()) throw DomainError("Parseval gradient requested for a non-rigid family");
    check_params(ctx, params);
    int lambda = 0;
    for (const auto& c : ctx.curves()) {
        if (!c.is_fourier()) throw DomainError("Parseval gradient needs Fourier-form curves");
        lambda = std::max(lambda, c.cutoff());
    }
    const std::size_t J = ctx.count();
    const auto L = static_cast<std::size_t>(lambda);

    // shifted[j][k] = c_k^(j) exp(2 pi i k theta_j), zero-padded to the common cutoff
    std::vector<std::vector<std::complex<double>>> shifted(J, std::vector<std::complex<double>>(L + 1));
    std::vector<std::complex<double>> average(L + 1);
    for (std::size_t j = 0; j < J; ++j) {
        const auto c = ctx.curves()[j].coefficients();
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) * params(j, 0);
            shifted[j][k] = c[k] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        for (std::size_t k = 0; k <= L; ++k) average[k] += shifted[j][k];
    }
    for (auto& a : average) a /= static_cast<double>(J);

    ParamArray grad(J, 1);
    const std::complex<double> two_pi_i(0.0, 2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < J; ++j) {
        double s = 0.0;
        // the -k term equals the +k term, the k = 0 term vanishes
        for (std::size_t k = 1; k <= L; ++k)
            s += 2.0 * std::real(two_pi_i * static_cast<double>(k) * shifted[j][k] * std::conj(average[k]));
        grad(j, 0) = -2.0 / static_cast<double>(J) * s;
    }
    return grad;
}

ParamArray grad_nonrigid(const CriterionContext& ctx, const ParamArray& params) {
    if (ctx.family().is_translation()) throw DomainError("non-rigid gradient requested for the translation family");
    const auto bt = backtransform(ctx, params, true, true);
    const std::size_t J = ctx.count();
    const std::size_t Q = ctx.quadrature_points();
    const std::size_t p = ctx.family().dim();
    const double scale = 2.0 / (static_cast<double>(J) * static_cast<double>(Q));
    ParamArray grad(J, p);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t l = 0; l < Q; ++l) {
            const double weight = (bt.values[j][l] - bt.mean[l]) * bt.slopes[j][l];
            for (std::size_t q = 0; q < p; ++q) grad(j, q) += weight * bt.warp_gradient[j][l * p + q];
        }
        for (std::size_t q = 0; q < p; ++q) grad(j, q) *= scale;
    }
    return grad;
}

ParamArray gradient_M(const CriterionContext& ctx, const ParamArray& params) {
    return ctx.family().is_translation() ? grad_translation_time(ctx, params) : grad_nonrigid(ctx, params);
}

}  // namespace curvemean
