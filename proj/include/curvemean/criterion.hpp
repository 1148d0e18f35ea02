#pragma once

#include <optional>
#include <vector>

#include "curvemean/core.hpp"
#include "curvemean/deformation.hpp"

namespace curvemean {

/// Which operator family deforms the time axis.
class DeformationFamily {
public:
    enum class Kind { translation, diffeo };

    static DeformationFamily translation() { return DeformationFamily(); }
    static DeformationFamily diffeo(VelocityBasis basis, int ode_steps = kDefaultOdeSteps);

    Kind kind() const { return kind_; }
    bool is_translation() const { return kind_ == Kind::translation; }
    std::size_t dim() const { return is_translation() ? 1 : static_cast<std::size_t>(basis_->size()); }
    const VelocityBasis& basis() const;
    int ode_steps() const { return ode_steps_; }

    /// Bound on |theta|_inf that keeps the flow well resolved; infinite for
    /// translations.
    double parameter_bound() const;

    /// phi_{-theta}(t): maps the mean-shape time axis onto curve j's.
    double backward_warp(std::span<const double> theta, double t) const;

private:
    DeformationFamily() = default;
    Kind kind_ = Kind::translation;
    std::optional<VelocityBasis> basis_;
    int ode_steps_ = kDefaultOdeSteps;
};

/// How the translation gradient is assembled in the time domain.
enum class TranslationGradientForm {
    /// Exact derivative of the quadrature-discretized criterion.
    exact,
    /// Drops the self term of each curve and adds the matching boundary term.
    literal,
};

class CriterionContext {
public:
    /// quadrature_points = 0 selects the sample count of the first grid-form
    /// curve; it must be given explicitly when every curve is Fourier-form.
    CriterionContext(std::vector<SmoothedCurve> curves, DeformationFamily family,
                     std::size_t quadrature_points = 0, int threads = 1);

    std::size_t count() const { return curves_.size(); }
    const std::vector<SmoothedCurve>& curves() const { return curves_; }
    const DeformationFamily& family() const { return family_; }
    std::size_t quadrature_points() const { return nodes_; }
    int threads() const { return threads_; }

    double node(std::size_t l) const { return static_cast<double>(l + 1) / static_cast<double>(nodes_); }

private:
    std::vector<SmoothedCurve> curves_;
    DeformationFamily family_;
    std::size_t nodes_;
    int threads_;
};

/// (1/J) sum_j f_j(phi_{-theta_j}(t))
double backtransformed_mean(const CriterionContext& ctx, const ParamArray& params, double t);

/// The back-transformed mean at every quadrature node.
std::vector<double> backtransformed_mean_on_nodes(const CriterionContext& ctx, const ParamArray& params);

/// M(theta) = (1/J) sum_j int_0^1 (f_j(phi_{-theta_j}(t)) - mean(t))^2 dt,
/// rectangle rule on the quadrature nodes.
double evaluate_M(const CriterionContext& ctx, const ParamArray& params);

ParamArray grad_translation_time(const CriterionContext& ctx, const ParamArray& params,
                                 TranslationGradientForm form = TranslationGradientForm::exact);

/// Parseval form; all curves must be Fourier-form.
ParamArray grad_translation_fourier(const CriterionContext& ctx, const ParamArray& params);

ParamArray grad_nonrigid(const CriterionContext& ctx, const ParamArray& params);

/// grad_translation_time (exact) or grad_nonrigid according to the family.
ParamArray gradient_M(const CriterionContext& ctx, const ParamArray& params);

}  // namespace curvemean
