#include "curvemean/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvemean {

namespace {

constexpr int kMaxDegree = 7;

// Uniform B-splines of `degree` on the span [s, s+1), local coordinate x in
// [0, 1). out[r] is the spline that starts at knot s - degree + r; lower gets
// the degree - 1 splines from the same recursion.
void uniform_span_values(double x, int degree, double* out, double* lower = nullptr) {
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        if (lower && j == degree)
            for (int r = 0; r < degree; ++r) lower[r] = out[r];
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            // right[r+1] = r + 1 - x, left[j-r] = x + j - r - 1, their sum is j
            const double temp = out[r] / static_cast<double>(j);
            const double right = static_cast<double>(r + 1) - x;
            const double left = x + static_cast<double>(j - r - 1);
            out[r] = saved + right * temp;
            saved = left * temp;
        }
        out[j] = saved;
    }
}

// The same recursion on polynomials in x: row r of the result holds the
// monomial coefficients of out[r].
std::vector<double> uniform_span_monomials(int degree) {
    const auto w = static_cast<std::size_t>(degree + 1);
    std::vector<double> out(w * w, 0.0);
    auto row = [&](int r) { return out.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * w); };
    out[0] = 1.0;
    std::vector<double> temp(w), saved(w);
    for (int j = 1; j <= degree; ++j) {
        std::fill(saved.begin(), saved.end(), 0.0);
        for (int r = 0; r < j; ++r) {
            for (std::size_t e = 0; e < w; ++e) temp[e] = row(r)[static_cast<std::ptrdiff_t>(e)] / j;
            const double right = r + 1, left = j - r - 1;
            auto dst = row(r);
            // out[r] = saved + (right - x) temp, saved = (x + left) temp
            for (std::size_t e = 0; e < w; ++e) {
                const double shifted = e > 0 ? temp[e - 1] : 0.0;
                dst[static_cast<std::ptrdiff_t>(e)] = saved[e] + right * temp[e] - shifted;
                saved[e] = left * temp[e] + shifted;
            }
        }
        std::copy(saved.begin(), saved.end(), row(j));
    }
    return out;
}

}  // namespace

VelocityBasis::VelocityBasis(int size, int degree) : size_(size), degree_(degree) {
    if (size < 1) throw DomainError("velocity basis needs at least one function");
    if (degree < 2 || degree > kMaxDegree)
        throw DomainError("velocity basis degree must lie in [2, " + std::to_string(kMaxDegree) +
                          "] so that h_k' vanishes at the endpoints");
    spacing_ = 1.0 / static_cast<double>(size + degree);
    // every spline is a translate of the same cardinal spline
    double peak = 0.0;
    constexpr int kProbe = 4096;
    for (int i = 0; i <= kProbe; ++i) {
        const double t = static_cast<double>(degree + 1) * spacing_ * i / kProbe;
        peak = std::max(peak, std::abs(basis(0, t)));
    }
    max_value_ = peak;
    span_monomials_ = uniform_span_monomials(degree);
}

std::vector<double> VelocityBasis::field_pieces(std::span<const double> theta) const {
    const auto w = static_cast<std::size_t>(degree_ + 1);
    std::vector<double> out(static_cast<std::size_t>(size_ + degree_) * w, 0.0);
    for (int span = 0; span < size_ + degree_; ++span)
        for (int r = 0; r <= degree_; ++r) {
            const int k = span - degree_ + r;
            if (k < 0 || k >= size_) continue;
            const double c = theta[static_cast<std::size_t>(k)];
            for (std::size_t e = 0; e < w; ++e)
                out[static_cast<std::size_t>(span) * w + e] += c * span_monomials_[static_cast<std::size_t>(r) * w + e];
        }
    return out;
}

std::vector<double> VelocityBasis::knots() const {
    std::vector<double> k(static_cast<std::size_t>(size_ + degree_ + 1));
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i) * spacing_;
    return k;
}

int VelocityBasis::nonzero(double t, std::span<double> values, std::span<double> slopes) const {
    std::fill(values.begin(), values.end(), 0.0);
    std::fill(slopes.begin(), slopes.end(), 0.0);
    if (!(t >= 0.0 && t <= 1.0)) return 0;
    const double pos = t / spacing_;
    const int span = static_cast<int>(std::floor(pos));
    const double x = pos - span;

    double full[kMaxDegree + 1];
    double lower[kMaxDegree + 1];
    uniform_span_values(x, degree_, full, lower);

    const int first = span - degree_;
    // uniform knots: N'_{i,d} = (N_{i,d-1} - N_{i+1,d-1}) / spacing
    const double scale = 1.0 / spacing_;
    for (int r = 0; r <= degree_; ++r) {
        const int k = first + r;
        if (k < 0 || k >= size_) continue;
        // lower[r] starts at knot first + 1 + r
        const double a = r >= 1 ? lower[r - 1] : 0.0;
        const double b = r <= degree_ - 1 ? lower[r] : 0.0;
        values[static_cast<std::size_t>(r)] = full[r];
        slopes[static_cast<std::size_t>(r)] = scale * (a - b);
    }
    return first;
}

double VelocityBasis::basis(int k, double t) const {
    double v[kMaxDegree + 1], d[kMaxDegree + 1];
    const int first = nonzero(t, {v, static_cast<std::size_t>(degree_ + 1)}, {d, static_cast<std::size_t>(degree_ + 1)});
    const int r = k - first;
    return (r >= 0 && r <= degree_) ? v[r] : 0.0;
}

double VelocityBasis::basis_derivative(int k, double t) const {
    double v[kMaxDegree + 1], d[kMaxDegree + 1];
    const int first = nonzero(t, {v, static_cast<std::size_t>(degree_ + 1)}, {d, static_cast<std::size_t>(degree_ + 1)});
    const int r = k - first;
    return (r >= 0 && r <= degree_) ? d[r] : 0.0;
}

void VelocityBasis::field(std::span<const double> theta, double t, double& value, double& slope) const {
    value = 0.0;
    slope = 0.0;
    if (!(t >= 0.0 && t <= 1.0)) return;
    const double pos = t / spacing_;
    const int span = static_cast<int>(std::floor(pos));
    double full[kMaxDegree + 1];
    double lower[kMaxDegree + 1];
    uniform_span_values(pos - span, degree_, full, lower);
    // sum_k theta_k N'_k = sum_r (theta_{k} - theta_{k-1}) lower[r - 1] / spacing
    const int first = span - degree_;
    double diff = 0.0;
    for (int r = 0; r <= degree_; ++r) {
        const int k = first + r;
        const double c = (k >= 0 && k < size_) ? theta[static_cast<std::size_t>(k)] : 0.0;
        value += c * full[r];
        if (r >= 1) diff += (c - (k - 1 >= 0 && k - 1 < size_ ? theta[static_cast<std::size_t>(k - 1)] : 0.0)) * lower[r - 1];
    }
    slope = diff / spacing_;
}

double velocity(const VelocityBasis& basis, std::span<const double> theta, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("velocity evaluated outside [0, 1]");
    if (theta.size() != static_cast<std::size_t>(basis.size()))
        throw DomainError("velocity coefficients do not match the basis size");
    double v, d;
    basis.field(theta, t, v, d);
    return v;
}

DiffeoOperator::DiffeoOperator(VelocityBasis basis, std::vector<double> theta, int ode_steps)
    : basis_(basis), theta_(std::move(theta)), steps_(ode_steps) {
    if (theta_.size() != static_cast<std::size_t>(basis_.size()))
        throw DomainError("diffeomorphism parameters do not match the basis size");
    for (double v : theta_)
        if (!std::isfinite(v)) throw DomainError("diffeomorphism parameter is not finite");
    if (steps_ < 1) throw DomainError("ODE step count must be positive");
    inv_spacing_ = 1.0 / basis_.knot_spacing();
    pieces_ = basis_.field_pieces(theta_);
    const auto w = static_cast<std::size_t>(basis_.degree() + 1);
    const std::size_t spans = pieces_.size() / w;
    pieces_.resize(2 * pieces_.size(), 0.0);
    for (std::size_t s = 0; s < spans; ++s)
        for (std::size_t e = 1; e < w; ++e)
            pieces_[(spans + s) * w + e - 1] = static_cast<double>(e) * pieces_[s * w + e] * inv_spacing_;
}

void DiffeoOperator::field(double t, double& value, double& slope) const {
    value = 0.0;
    slope = 0.0;
    if (!(t >= 0.0 && t <= 1.0)) return;
    const int d = basis_.degree();
    const int spans = basis_.size() + d;
    const double pos = t * inv_spacing_;
    const int span = static_cast<int>(pos);
    if (span >= spans) return;
    const double x = pos - span;
    const auto w = static_cast<std::size_t>(d + 1);
    const double* c = pieces_.data() + static_cast<std::size_t>(span) * w;
    const double* g = c + static_cast<std::size_t>(spans) * w;
    value = c[d];
    slope = g[d - 1];
    for (int e = d - 1; e >= 0; --e) value = value * x + c[e];
    for (int e = d - 2; e >= 0; --e) slope = slope * x + g[e];
}

DiffeoOperator DiffeoOperator::inverse() const {
    std::vector<double> neg(theta_.size());
    std::transform(theta_.begin(), theta_.end(), neg.begin(), [](double v) { return -v; });
    return {basis_, std::move(neg), steps_};
}

void DiffeoOperator::rk4_step(double h, double& psi, double& jac) const {
    double v1, d1, v2, d2, v3, d3, v4, d4;
    field(psi, v1, d1);
    const double j1 = d1 * jac;
    field(psi + 0.5 * h * v1, v2, d2);
    const double j2 = d2 * (jac + 0.5 * h * j1);
    field(psi + 0.5 * h * v2, v3, d3);
    const double j3 = d3 * (jac + 0.5 * h * j2);
    field(psi + h * v3, v4, d4);
    const double j4 = d4 * (jac + h * j3);
    psi += h / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
    jac += h / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
}

namespace {

void check_unit(double t, const char* what) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

template <class Visit>
void DiffeoOperator::integrate(std::span<const double> ts, Visit&& visit) const {
    for (double t : ts) check_unit(t, "flow time t");
    const std::size_t n = ts.size();
    std::vector<double> psi(ts.begin(), ts.end()), jac(n, 1.0);
    std::vector<double> v(4 * n), d(4 * n), jk(4 * n);
    const double h = 1.0 / steps_;
    visit(0, psi, jac);
    for (int i = 1; i <= steps_; ++i) {
        // same arithmetic as rk4_step, one stage at a time over all points
        for (std::size_t p = 0; p < n; ++p) {
            field(psi[p], v[p], d[p]);
            jk[p] = d[p] * jac[p];
        }
        for (std::size_t p = 0; p < n; ++p) {
            field(psi[p] + 0.5 * h * v[p], v[n + p], d[n + p]);
            jk[n + p] = d[n + p] * (jac[p] + 0.5 * h * jk[p]);
        }
        for (std::size_t p = 0; p < n; ++p) {
            field(psi[p] + 0.5 * h * v[n + p], v[2 * n + p], d[2 * n + p]);
            jk[2 * n + p] = d[2 * n + p] * (jac[p] + 0.5 * h * jk[n + p]);
        }
        for (std::size_t p = 0; p < n; ++p) {
            field(psi[p] + h * v[2 * n + p], v[3 * n + p], d[3 * n + p]);
            jk[3 * n + p] = d[3 * n + p] * (jac[p] + h * jk[2 * n + p]);
        }
        for (std::size_t p = 0; p < n; ++p) {
            psi[p] += h / 6.0 * (v[p] + 2.0 * v[n + p] + 2.0 * v[2 * n + p] + v[3 * n + p]);
            jac[p] += h / 6.0 * (jk[p] + 2.0 * jk[n + p] + 2.0 * jk[2 * n + p] + jk[3 * n + p]);
        }
        visit(i, psi, jac);
    }
}

FlowTrajectory DiffeoOperator::trajectory(double t) const {
    FlowTrajectory out;
    integrate(std::span<const double>(&t, 1), [&](int, const std::vector<double>& psi, const std::vector<double>& jac) {
        out.position.push_back(psi[0]);
        out.jacobian.push_back(jac[0]);
    });
    return out;
}

double DiffeoOperator::flow(double t) const {
    double out;
    flow(std::span<const double>(&t, 1), std::span<double>(&out, 1));
    return out;
}

void DiffeoOperator::flow(std::span<const double> ts, std::span<double> out) const {
    if (out.size() != ts.size()) throw DomainError("flow output size does not match the input");
    integrate(ts, [&](int i, const std::vector<double>& psi, const std::vector<double>&) {
        if (i == steps_) std::copy(psi.begin(), psi.end(), out.begin());
    });
}

double DiffeoOperator::flow_inverse(double t) const { return inverse().flow(t); }

double DiffeoOperator::flow_time_derivative(double u, double t) const {
    check_unit(u, "flow time u");
    check_unit(t, "flow time t");
    double psi = t, jac = 1.0;
    const double h = 1.0 / steps_;
    const int full = static_cast<int>(std::floor(u * steps_));
    for (int i = 0; i < full && i < steps_; ++i) rk4_step(h, psi, jac);
    const double rest = u - static_cast<double>(full) * h;
    if (rest > 0.0) rk4_step(rest, psi, jac);
    return jac;
}

FlowSample DiffeoOperator::sample(double t) const { return std::move(sample(std::span<const double>(&t, 1)).front()); }

std::vector<FlowSample> DiffeoOperator::sample(std::span<const double> ts) const {
    const auto p = static_cast<std::size_t>(basis_.size());
    const int width = basis_.degree() + 1;
    std::vector<FlowSample> out(ts.size());
    for (auto& s : out) s.gradient.assign(p, 0.0);

    // composite Simpson on the RK4 nodes when the step count is even,
    // trapezoid otherwise
    const double h = 1.0 / steps_;
    const bool simpson = steps_ % 2 == 0;
    double v[kMaxDegree + 1], d[kMaxDegree + 1];
    integrate(ts, [&](int i, const std::vector<double>& psi, const std::vector<double>& jac) {
        double w;
        if (simpson)
            w = (i == 0 || i == steps_) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
        else
            w = (i == 0 || i == steps_) ? 0.5 * h : h;
        for (std::size_t n = 0; n < ts.size(); ++n) {
            const int first = basis_.nonzero(psi[n], {v, static_cast<std::size_t>(width)},
                                             {d, static_cast<std::size_t>(width)});
            const double scale = w / jac[n];
            for (int r = 0; r < width; ++r) {
                const int k = first + r;
                if (k < 0 || k >= basis_.size()) continue;
                out[n].gradient[static_cast<std::size_t>(k)] += scale * v[r];
            }
            if (i == steps_) {
                out[n].value = psi[n];
                out[n].slope = jac[n];
            }
        }
    });
    for (auto& s : out)
        for (double& g : s.gradient) g *= s.slope;
    return out;
}

std::vector<double> DiffeoOperator::flow_param_gradient(double t) const { return sample(t).gradient; }

}  // namespace curvemean
