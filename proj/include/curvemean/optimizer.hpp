#pragma once

#include <functional>
#include <limits>

#include "curvemean/core.hpp"
#include "curvemean/criterion.hpp"

namespace curvemean {

struct OptimizerConfig {
    double rho = 1e-4;   ///< relative-progress stopping parameter, > 0
    double kappa = 2.0;  ///< step shrink factor, > 1
    int max_iterations = 200;
    int max_backtracks = 50;
    /// After an accepted iteration, multiply the step by kappa while successive
    /// gradients agree in direction and divide it by kappa when they reverse.
    /// Off gives the pure shrink-only schedule.
    bool regrow_step = true;

    void validate() const;
};

/// A smooth function of a J x p parameter array.
struct Objective {
    std::function<double(const ParamArray&)> value;
    std::function<ParamArray(const ParamArray&)> gradient;
    /// Project every iterate onto sum_j theta_j = 0.
    bool zero_mean = true;
    /// Candidates with |theta|_inf above this are rejected like an increase.
    double parameter_bound = std::numeric_limits<double>::infinity();
};

struct DescentResult {
    ParamArray params;
    std::vector<TraceEntry> trace;  ///< trace[0] is the starting point
    int iterations = 0;
    bool converged = false;
};

/// Gradient descent with an adaptive step:
///   delta_0 = 1/|grad(theta^0)|,
///   candidate = P(theta - delta * grad), halve (divide by kappa) while the
///   value does not decrease, stop once C(i) - C(i+1) < rho (C(1) - C(i+1)).
DescentResult descend(const Objective& objective, const OptimizerConfig& config, ParamArray start);

/// Minimizes M over the zero-mean ensembles starting from theta = 0, and
/// evaluates the back-transformed mean on the quadrature nodes.
AlignmentResult minimize(const CriterionContext& ctx, const OptimizerConfig& config);

Objective criterion_objective(const CriterionContext& ctx);

}  // namespace curvemean
