#pragma once

#include <span>
#include <vector>

#include "curvemean/core.hpp"

namespace curvemean {

/// phi_theta(t) = t - theta.
inline double warp_translation(double theta, double t) { return t - theta; }

/// p B-splines of a given degree on the uniform knots i/(p + degree).
///
/// Only the splines whose support lies inside [0, 1] are kept, so every
/// h_k and its first degree-1 derivatives vanish at both endpoints.
class VelocityBasis {
public:
    explicit VelocityBasis(int size = 10, int degree = 3);

    int size() const { return size_; }
    int degree() const { return degree_; }
    double knot_spacing() const { return spacing_; }
    std::vector<double> knots() const;

    /// sup_t |h_k(t)|, identical for every k.
    double max_basis_value() const { return max_value_; }

    /// Nonzero basis functions at t: indices first..first+degree (clipped to
    /// [0, size)), values and derivatives in `values`/`slopes`. Returns first.
    /// Times outside [0, 1] give all zeros.
    int nonzero(double t, std::span<double> values, std::span<double> slopes) const;

    double basis(int k, double t) const;
    double basis_derivative(int k, double t) const;

    /// v(t) = sum_k theta_k h_k(t) and v'(t), without the domain check.
    void field(std::span<const double> theta, double t, double& value, double& slope) const;

    /// v_theta on each knot span as monomial coefficients in the local
    /// coordinate x = t / spacing - span: size + degree spans of degree + 1
    /// coefficients, lowest power first.
    std::vector<double> field_pieces(std::span<const double> theta) const;

private:
    int size_;
    int degree_;
    double spacing_;
    double max_value_ = 0.0;
    std::vector<double> span_monomials_;  // row r: spline starting at offset r of a span
};

/// v_theta(t) = sum_k theta_k h_k(t). t must lie in [0, 1].
double velocity(const VelocityBasis& basis, std::span<const double> theta, double t);

/// Flow state sampled at the RK4 nodes u_i = i / steps.
struct FlowTrajectory {
    std::vector<double> position;  ///< psi(u_i, t)
    std::vector<double> jacobian;  ///< d psi(u_i, t) / dt
};

/// Warp value, its t-derivative and its theta-gradient at one time.
struct FlowSample {
    double value = 0.0;
    double slope = 0.0;
    std::vector<double> gradient;
};

/// RK4 steps per unit time; keeps phi_{-theta}(phi_theta(t)) within 1e-4 of t
/// for |theta|_inf <= 1 with the default basis.
inline constexpr int kDefaultOdeSteps = 50;

/// phi_theta = psi_theta(1, .), the unit-time flow of v_theta, integrated by
/// fixed-step RK4.
class DiffeoOperator {
public:
    DiffeoOperator(VelocityBasis basis, std::vector<double> theta, int ode_steps = kDefaultOdeSteps);

    const VelocityBasis& basis() const { return basis_; }
    std::span<const double> theta() const { return theta_; }
    int ode_steps() const { return steps_; }

    DiffeoOperator inverse() const;

    double flow(double t) const;
    /// flow at many times at once; out[i] = flow(ts[i]).
    void flow(std::span<const double> ts, std::span<double> out) const;
    double flow_inverse(double t) const;
    FlowTrajectory trajectory(double t) const;

    /// d psi(u, t) / dt from the variational equation J' = v'(psi) J, J(0) = 1.
    double flow_time_derivative(double u, double t) const;

    /// d phi(t) / d theta_k = phi'(t) * int_0^1 h_k(psi(u,t)) / (d psi(u,t)/dt) du.
    std::vector<double> flow_param_gradient(double t) const;

    FlowSample sample(double t) const;
    std::vector<FlowSample> sample(std::span<const double> ts) const;

private:
    void rk4_step(double h, double& psi, double& jac) const;
    void field(double t, double& value, double& slope) const;
    // RK4 over all points stage by stage; visit(i, psi, jac) sees node u_i = i / steps.
    template <class Visit>
    void integrate(std::span<const double> ts, Visit&& visit) const;

    VelocityBasis basis_;
    std::vector<double> theta_;
    int steps_;
    double inv_spacing_;
    std::vector<double> pieces_;  // value coefficients per span, then slope coefficients per span
};

}  // namespace curvemean
