#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curvemean/criterion.hpp"
#include "curvemean/deformation.hpp"
#include "curvemean/estimators.hpp"
#include "curvemean/smoothing.hpp"
#include "curvemean/synthetic.hpp"

namespace py = pybind11;
using namespace curvemean;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<SampledSignal> to_signals(const Array& data) {
    if (data.ndim() != 2) throw DomainError("signals must be a 2-D array (one signal per row)");
    const auto rows = static_cast<std::size_t>(data.shape(0)), cols = static_cast<std::size_t>(data.shape(1));
    std::vector<SampledSignal> out;
    out.reserve(rows);
    const double* p = data.data();
    for (std::size_t j = 0; j < rows; ++j) out.emplace_back(std::vector<double>(p + j * cols, p + (j + 1) * cols));
    return out;
}

SampledSignal to_signal(const Array& data) {
    if (data.ndim() != 1) throw DomainError("signal must be a 1-D array");
    return SampledSignal(std::vector<double>(data.data(), data.data() + data.size()));
}

Array to_array(const SampledSignal& s) {
    Array out(static_cast<py::ssize_t>(s.size()));
    std::copy(s.values().begin(), s.values().end(), out.mutable_data());
    return out;
}

Array to_array(const std::vector<SampledSignal>& signals) {
    const std::size_t n = signals.empty() ? 0 : signals.front().size();
    Array out({static_cast<py::ssize_t>(signals.size()), static_cast<py::ssize_t>(n)});
    for (std::size_t j = 0; j < signals.size(); ++j)
        std::copy(signals[j].values().begin(), signals[j].values().end(), out.mutable_data() + j * n);
    return out;
}

Array to_array(const ParamArray& p) {
    Array out({static_cast<py::ssize_t>(p.count()), static_cast<py::ssize_t>(p.dim())});
    std::copy(p.flat().begin(), p.flat().end(), out.mutable_data());
    return out;
}

ParamArray to_params(const Array& data) {
    if (data.ndim() != 2) throw DomainError("parameters must be a 2-D array (one row per signal)");
    ParamArray out(static_cast<std::size_t>(data.shape(0)), static_cast<std::size_t>(data.shape(1)));
    std::copy(data.data(), data.data() + data.size(), out.flat().begin());
    return out;
}

py::dict to_dict(const AlignmentResult& r) {
    py::list trace;
    for (const auto& e : r.trace)
        trace.append(py::dict(py::arg("criterion") = e.criterion, py::arg("step") = e.step,
                              py::arg("backtracks") = e.backtracks));
    return py::dict(py::arg("mean") = to_array(r.mean_curve), py::arg("parameters") = to_array(r.ensemble),
                    py::arg("trace") = trace, py::arg("iterations") = r.iterations,
                    py::arg("converged") = r.converged);
}

SimulationConfig simulation(std::uint64_t seed, std::size_t n, std::size_t J, double shift_variance, double sigma,
                            int gp_truncation, int replications, int threads) {
    SimulationConfig cfg;
    cfg.seed = seed;
    cfg.n = n;
    cfg.J = J;
    cfg.shift_variance = shift_variance;
    cfg.sigma = sigma;
    cfg.gp_truncation = gp_truncation;
    cfg.replications = replications;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_curvemean, m) {
    m.doc() = "Smoothed Frechet means of curves under time deformations.";
    m.attr("__version__") = CURVEMEAN_VERSION;

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("euclidean_mean", [](const Array& signals) { return to_array(euclidean_mean(to_signals(signals))); },
          py::arg("signals"), "Pointwise average of the rows.");

    m.def(
        "frechet_mean",
        [](const Array& signals, const std::string& smoother, const std::string& family, int basis_size, int degree,
           int ode_steps, double rho, double kappa, int max_iterations, int max_backtracks, bool regrow_step,
           int threads) {
            OptimizerConfig cfg;
            cfg.rho = rho;
            cfg.kappa = kappa;
            cfg.max_iterations = max_iterations;
            cfg.max_backtracks = max_backtracks;
            cfg.regrow_step = regrow_step;
            const auto data = to_signals(signals);
            const auto fam = make_family(family, basis_size, degree, ode_steps);
            const auto spec = SmootherSpec::parse(smoother);
            AlignmentResult result;
            {
                py::gil_scoped_release release;
                result = frechet_mean(data, spec, fam, cfg, threads);
            }
            return to_dict(result);
        },
        py::arg("signals"), py::arg("smoother") = "fourier-gcv", py::arg("family") = "translation",
        py::arg("basis_size") = 10, py::arg("degree") = 3, py::arg("ode_steps") = kDefaultOdeSteps,
        py::arg("rho") = 1e-4, py::arg("kappa") = 2.0, py::arg("max_iterations") = 200,
        py::arg("max_backtracks") = 50, py::arg("regrow_step") = true, py::arg("threads") = 1,
        "Smooth, align by minimizing the criterion, and average the back-transformed curves.");

    m.def(
        "procrustes_mean",
        [](const Array& signals, const std::string& family, int basis_size, int degree, int ode_steps, int max_rounds,
           double search_radius, int threads) {
            ProcrustesConfig cfg;
            cfg.max_rounds = max_rounds;
            cfg.search_radius = search_radius;
            cfg.threads = threads;
            const auto data = to_signals(signals);
            const auto fam = make_family(family, basis_size, degree, ode_steps);
            AlignmentResult result;
            {
                py::gil_scoped_release release;
                result = procrustes_mean(data, fam, cfg);
            }
            return to_dict(result);
        },
        py::arg("signals"), py::arg("family") = "translation", py::arg("basis_size") = 10, py::arg("degree") = 3,
        py::arg("ode_steps") = kDefaultOdeSteps, py::arg("max_rounds") = 20, py::arg("search_radius") = 0.25,
        py::arg("threads") = 1, "Template alternation on the raw signals.");

    m.def(
        "smooth",
        [](const Array& signal, const std::string& smoother) {
            const auto s = to_signal(signal);
            return to_array(curvemean::smooth(s, SmootherSpec::parse(smoother)).sample(s.size()));
        },
        py::arg("signal"), py::arg("smoother") = "fourier-gcv", "Denoised signal on its own grid.");

    m.def(
        "gcv_cutoff",
        [](const Array& signal) {
            const auto s = to_signal(signal);
            return gcv_select_cutoff(s, max_gcv_cutoff(s.size()));
        },
        py::arg("signal"), "Fourier cutoff chosen by generalized cross validation.");

    m.def(
        "alignment_criterion",
        [](const Array& signals, const Array& parameters, const std::string& family, int basis_size, int degree,
           int ode_steps) {
            std::vector<SmoothedCurve> curves;
            for (const auto& s : to_signals(signals))
                curves.push_back(SmoothedCurve::grid({s.values().begin(), s.values().end()}));
            const CriterionContext ctx(std::move(curves), make_family(family, basis_size, degree, ode_steps));
            const auto p = to_params(parameters);
            return py::make_tuple(evaluate_M(ctx, p), to_array(gradient_M(ctx, p)));
        },
        py::arg("signals"), py::arg("parameters"), py::arg("family") = "translation", py::arg("basis_size") = 10,
        py::arg("degree") = 3, py::arg("ode_steps") = kDefaultOdeSteps,
        "Criterion value and gradient for linearly interpolated signals.");

    m.def(
        "flow",
        [](const Array& theta, const Array& t, int degree, int ode_steps) {
            const auto th = to_signal(theta);
            const DiffeoOperator op(VelocityBasis(static_cast<int>(th.size()), degree),
                                    {th.values().begin(), th.values().end()}, ode_steps);
            const auto ts = to_signal(t);
            std::vector<double> out(ts.size());
            op.flow(ts.values(), out);
            return to_array(SampledSignal(std::move(out)));
        },
        py::arg("theta"), py::arg("t"), py::arg("degree") = 3, py::arg("ode_steps") = kDefaultOdeSteps,
        "Unit-time flow of the B-spline velocity field with coefficients theta.");

    m.def(
        "simulate",
        [](std::uint64_t seed, std::size_t n, std::size_t J, double shift_variance, double sigma, int gp_truncation) {
            const auto cfg = simulation(seed, n, J, shift_variance, sigma, gp_truncation, 1, 1);
            Rng rng(cfg.seed);
            const auto shape = default_mean_shape();
            const auto data = simulate_dataset(shape, cfg, rng);
            return py::dict(py::arg("signals") = to_array(data.signals), py::arg("true_shifts") = data.true_shifts,
                            py::arg("truth") = to_array(shape.sample(cfg.n)));
        },
        py::arg("seed"), py::arg("n") = 128, py::arg("J") = 15, py::arg("shift_variance") = 0.004,
        py::arg("sigma") = 0.3, py::arg("gp_truncation") = 50, "Shifted noisy copies of the two-bump shape.");

    m.def(
        "benchmark",
        [](std::uint64_t seed, int replications, std::size_t n, std::size_t J, double shift_variance, double sigma,
           int gp_truncation, int threads) {
            const auto cfg = simulation(seed, n, J, shift_variance, sigma, gp_truncation, replications, threads);
            BenchmarkResult r;
            {
                py::gil_scoped_release release;
                r = run_benchmark(default_mean_shape(), cfg);
            }
            return py::dict(py::arg("frechet_mse") = r.frechet_mses, py::arg("procrustes_mse") = r.procrustes_mses,
                            py::arg("frechet_median") = r.frechet.median,
                            py::arg("procrustes_median") = r.procrustes.median,
                            py::arg("frechet_wins") = r.frechet_wins);
        },
        py::arg("seed"), py::arg("replications") = 100, py::arg("n") = 128, py::arg("J") = 15,
        py::arg("shift_variance") = 0.004, py::arg("sigma") = 0.3, py::arg("gp_truncation") = 50,
        py::arg("threads") = 1, "Frechet versus Procrustes mean squared errors over seeded replications.");
}
