#include "curvemean/optimizer.hpp"

#include <cmath>

namespace curvemean {

void OptimizerConfig::validate() const {
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    if (!(kappa > 1.0)) throw DomainError("kappa must exceed 1");
    if (max_iterations < 0) throw DomainError("max_iterations must be non-negative");
    if (max_backtracks < 0) throw DomainError("max_backtracks must be non-negative");
}

namespace {

ParamArray step_from(const ParamArray& theta, const ParamArray& grad, double delta, bool zero_mean) {
    ParamArray out = theta;
    auto dst = out.flat();
    auto g = grad.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= delta * g[i];
    return zero_mean ? project_zero_mean(out) : out;
}

}  // namespace

DescentResult descend(const Objective& objective, const OptimizerConfig& config, ParamArray start) {
    config.validate();
    DescentResult out;
    out.params = objective.zero_mean ? project_zero_mean(start) : std::move(start);

    double current = objective.value(out.params);
    out.trace.push_back({current, 0.0, 0});
    ParamArray grad = objective.gradient(out.params);
    const double grad_norm = grad.norm();
    if (!(grad_norm > 0.0) || !std::isfinite(grad_norm) || current == 0.0) {
        // stationary start, no step size can be defined
        out.converged = true;
        return out;
    }
    double delta = 1.0 / grad_norm;
    out.trace[0].step = delta;

    double first_accepted = 0.0;
    for (int i = 0; i < config.max_iterations; ++i) {
        int backtracks = 0;
        ParamArray candidate;
        double next;
        for (;;) {
            candidate = step_from(out.params, grad, delta, objective.zero_mean);
            next = candidate.max_abs() <= objective.parameter_bound ? objective.value(candidate)
                                                                    : std::numeric_limits<double>::infinity();
            if (next < current) break;
            if (backtracks == config.max_backtracks) {
                out.converged = true;
                return out;
            }
            delta /= config.kappa;
            ++backtracks;
        }

        out.params = std::move(candidate);
        out.trace.push_back({next, delta, backtracks});
        ++out.iterations;

        if (i == 0) {
            first_accepted = next;
        } else if (!(current - next >= config.rho * (first_accepted - next))) {
            out.converged = true;
            return out;
        }
        current = next;
        if (current == 0.0) {
            out.converged = true;
            return out;
        }
        ParamArray next_grad = objective.gradient(out.params);
        if (!(next_grad.norm() > 0.0)) {
            out.converged = true;
            return out;
        }
        if (config.regrow_step) {
            // a reversed gradient means the step jumped across a valley: growing it again
            // would only bounce between its walls
            double turn = 0.0;
            for (std::size_t k = 0; k < grad.flat().size(); ++k) turn += grad.flat()[k] * next_grad.flat()[k];
            delta = turn > 0.0 ? delta * config.kappa : delta / config.kappa;
        }
        grad = std::move(next_grad);
    }
    return out;
}

Objective criterion_objective(const CriterionContext& ctx) {
    Objective obj;
    obj.value = [&ctx](const ParamArray& p) { return evaluate_M(ctx, p); };
    obj.gradient = [&ctx](const ParamArray& p) { return gradient_M(ctx, p); };
    obj.zero_mean = true;
    obj.parameter_bound = ctx.family().parameter_bound();
    return obj;
}

AlignmentResult minimize(const CriterionContext& ctx, const OptimizerConfig& config) {
    auto run = descend(criterion_objective(ctx), config, ParamArray(ctx.count(), ctx.family().dim()));
    AlignmentResult result;
    result.mean_curve = SampledSignal(backtransformed_mean_on_nodes(ctx, run.params));
    result.ensemble = std::move(run.params);
    result.trace = std::move(run.trace);
    result.iterations = run.iterations;
    result.converged = run.converged;
    return result;
}

}  // namespace curvemean
