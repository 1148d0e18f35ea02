#include "curvemean/cli.hpp"

#include <algorithm>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "curvemean/estimators.hpp"
#include "curvemean/ingestion.hpp"
#include "curvemean/synthetic.hpp"
#include "json.hpp"

#ifndef CURVEMEAN_VERSION
#define CURVEMEAN_VERSION "0.0.0"
#endif

namespace curvemean::cli {

using nlohmann::json;

namespace {

struct AlignOptions {
    std::string input;
    std::string output;
    std::string params;
    std::string trace;
    std::string result;
    std::string method = "frechet";
    std::string family = "translation";
    std::string smoother = "fourier-gcv";
    int basis_size = 10;
    int degree = 3;
    int ode_steps = kDefaultOdeSteps;
    double rho = 1e-4;
    double kappa = 2.0;
    int max_iter = 200;
    int max_backtracks = 50;
    bool no_regrow = false;
    int rounds = 20;
    double search_radius = 0.25;
    int threads = 1;
};

struct SmoothOptions {
    std::string input;
    std::string output;
    std::string method = "fourier-gcv";
    std::optional<int> cutoff;
    std::string wavelet = "db4";
    int m0 = 3;
};

struct SegmentOptions {
    std::string input;
    std::string output;
    std::string peaks;
    double sample_rate = 0.0;
    std::size_t window = 0;
    bool power_of_two = false;
    std::optional<std::size_t> min_distance;
    double min_prominence = 0.0;
};

struct SimulationOptions {
    std::size_t n = 128;
    std::size_t J = 15;
    double shift_variance = 0.004;
    double sigma = 0.3;
    int gp_truncation = 50;
    int replications = 100;
    std::uint64_t seed = 0;
    std::string shape;
    std::string output;
    std::string shifts;
    std::string truth;
    std::string summary;
    int threads = 1;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_text_file(path, text);
}

DeformationFamily family_from(const AlignOptions& o) {
    return make_family(o.family, o.basis_size, o.degree, o.ode_steps);
}

OptimizerConfig optimizer_from(const AlignOptions& o) {
    OptimizerConfig cfg;
    cfg.rho = o.rho;
    cfg.kappa = o.kappa;
    cfg.max_iterations = o.max_iter;
    cfg.max_backtracks = o.max_backtracks;
    cfg.regrow_step = !o.no_regrow;
    cfg.validate();
    return cfg;
}

std::string params_json(const AlignmentResult& r, const AlignOptions& o) {
    json doc{{"method", o.method},
             {"family", o.family},
             {"parameters", r.ensemble.rows()},
             {"iterations", r.iterations},
             {"converged", r.converged}};
    if (o.method == "frechet") doc["smoother"] = o.smoother;
    return doc.dump(1) + "\n";
}

std::string trace_json(const AlignmentResult& r) {
    json trace = json::array();
    for (std::size_t i = 0; i < r.trace.size(); ++i)
        trace.push_back({{"iteration", i},
                         {"criterion", r.trace[i].criterion},
                         {"step", r.trace[i].step},
                         {"backtracks", r.trace[i].backtracks}});
    return json{{"trace", trace}}.dump(1) + "\n";
}

void add_align_options(CLI::App& sub, AlignOptions& o, bool with_method) {
    sub.add_option("-i,--input", o.input, "Dataset (CSV: one signal per row, or JSON)")->required();
    sub.add_option("-o,--output", o.output, "Mean curve CSV (default: stdout)");
    sub.add_option("--params", o.params, "Estimated parameters JSON");
    sub.add_option("--trace", o.trace, "Optimizer / round trace JSON");
    sub.add_option("--result", o.result, "Complete result JSON");
    if (with_method)
        sub.add_option("--method", o.method, "euclidean, frechet or procrustes")
            ->check(CLI::IsMember({"euclidean", "frechet", "procrustes"}));
    sub.add_option("--family", o.family, "translation or diffeo")->check(CLI::IsMember({"translation", "diffeo"}));
    sub.add_option("--smoother", o.smoother, "none, fourier-gcv, fourier-fixed:<cutoff>, wavelet:<haar|db4>:<m0>");
    sub.add_option("--basis-size", o.basis_size, "Velocity basis size p");
    sub.add_option("--degree", o.degree, "Velocity B-spline degree");
    sub.add_option("--ode-steps", o.ode_steps, "RK4 steps of the flow");
    sub.add_option("--rho", o.rho, "Relative-progress stopping parameter");
    sub.add_option("--kappa", o.kappa, "Step shrink factor");
    sub.add_option("--max-iter", o.max_iter, "Maximum accepted iterations");
    sub.add_option("--max-backtracks", o.max_backtracks, "Maximum step reductions per iteration");
    sub.add_flag("--no-regrow", o.no_regrow, "Never enlarge the step after an accepted iteration");
    sub.add_option("--rounds", o.rounds, "Procrustes rounds");
    sub.add_option("--search-radius", o.search_radius, "Procrustes translation search radius");
    sub.add_option("--threads", o.threads, "Worker threads");
}

void add_simulation_options(CLI::App& sub, SimulationOptions& o) {
    sub.add_option("--n", o.n, "Samples per signal");
    sub.add_option("--J", o.J, "Signals per dataset");
    sub.add_option("--shift-variance", o.shift_variance, "Variance of the random shifts");
    sub.add_option("--sigma", o.sigma, "Noise level");
    sub.add_option("--gp-truncation", o.gp_truncation, "Series truncation of the amplitude process");
    sub.add_option("--seed", o.seed, "Random seed")->required();
    sub.add_option("--shape", o.shape, "Mean shape as a one-row CSV on the grid (default: two-bump shape)");
    sub.add_option("--threads", o.threads, "Worker threads");
}

SimulationConfig simulation_from(const SimulationOptions& o) {
    SimulationConfig cfg;
    cfg.n = o.n;
    cfg.J = o.J;
    cfg.shift_variance = o.shift_variance;
    cfg.sigma = o.sigma;
    cfg.gp_truncation = o.gp_truncation;
    cfg.replications = o.replications;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.validate();
    return cfg;
}

SmoothedCurve shape_from(const SimulationOptions& o) {
    if (o.shape.empty()) return default_mean_shape();
    const auto rows = load_signals(o.shape, DataFormat::csv);
    if (rows.size() != 1) throw ParseError("shape file must hold exactly one row");
    return SmoothedCurve::grid({rows[0].values().begin(), rows[0].values().end()});
}

int run_mean(const AlignOptions& o, std::ostream& out, std::ostream& err) {
    const auto signals = load_signals(o.input);
    err << "loaded " << signals.size() << " signals of length " << signals.front().size() << "\n";
    AlignmentResult result;
    if (o.method == "euclidean") {
        result.mean_curve = euclidean_mean(signals);
        result.converged = true;
    } else if (o.method == "frechet") {
        result = frechet_mean(signals, SmootherSpec::parse(o.smoother), family_from(o), optimizer_from(o), o.threads);
        err << "frechet mean: " << result.iterations << " iterations, M = " << result.trace.back().criterion
            << (result.converged ? "" : " (iteration cap reached)") << "\n";
    } else {
        ProcrustesConfig cfg;
        cfg.max_rounds = o.rounds;
        cfg.search_radius = o.search_radius;
        cfg.registration = optimizer_from(o);
        cfg.threads = o.threads;
        result = procrustes_mean(signals, family_from(o), cfg);
        err << "procrustes mean: " << result.iterations << " rounds\n";
    }
    emit(o.output, format_signals_csv({result.mean_curve}), out);
    if (!o.params.empty()) emit(o.params, params_json(result, o), out);
    if (!o.trace.empty()) emit(o.trace, trace_json(result), out);
    if (!o.result.empty()) store_result(result, o.result);
    return 0;
}

int run_align(const AlignOptions& o, std::ostream& out, std::ostream& err) {
    const auto signals = load_signals(o.input);
    auto result = frechet_mean(signals, SmootherSpec::parse(o.smoother), family_from(o), optimizer_from(o), o.threads);
    err << "aligned " << signals.size() << " signals in " << result.iterations << " iterations\n";
    emit(o.params, params_json(result, o), out);
    if (!o.output.empty()) emit(o.output, format_signals_csv({result.mean_curve}), out);
    if (!o.trace.empty()) emit(o.trace, trace_json(result), out);
    if (!o.result.empty()) store_result(result, o.result);
    return 0;
}

int run_smooth(const SmoothOptions& o, std::ostream& out, std::ostream& err) {
    SmootherSpec spec;
    if (o.method == "fourier" || o.method == "fourier-gcv") {
        if (o.cutoff) {
            spec.method = SmootherSpec::Method::fourier_fixed;
            spec.cutoff = *o.cutoff;
        } else {
            spec.method = SmootherSpec::Method::fourier_gcv;
        }
    } else if (o.method == "fourier-fixed") {
        if (!o.cutoff) throw DomainError("--method fourier-fixed needs --cutoff");
        spec.method = SmootherSpec::Method::fourier_fixed;
        spec.cutoff = *o.cutoff;
    } else if (o.method == "wavelet") {
        spec.method = SmootherSpec::Method::wavelet;
        spec.filter = parse_wavelet_filter(o.wavelet);
        spec.coarse_level = o.m0;
    } else {
        spec.method = SmootherSpec::Method::none;
    }
    const auto signals = load_signals(o.input);
    std::vector<SampledSignal> smoothed;
    smoothed.reserve(signals.size());
    for (const auto& s : signals) {
        const auto curve = smooth(s, spec);
        if (curve.is_fourier()) err << "cutoff " << curve.cutoff() << "\n";
        smoothed.push_back(curve.sample(s.size()));
    }
    emit(o.output, format_signals_csv(smoothed), out);
    return 0;
}

int run_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err) {
    const auto record = load_record(o.input, o.sample_rate);
    SegmentationConfig cfg;
    cfg.window = o.window ? o.window : default_window(o.sample_rate, o.power_of_two);
    cfg.min_peak_distance = o.min_distance ? *o.min_distance
                                           : std::max<std::size_t>(1, static_cast<std::size_t>(0.3 * o.sample_rate));
    cfg.min_prominence = o.min_prominence;
    cfg.validate();
    const auto peaks = detect_peaks(record, cfg);
    const auto seg = segment(record, peaks, cfg.window);
    err << "detected " << peaks.size() << " peaks, emitted " << seg.signals.size() << " segments of "
        << cfg.window << " samples";
    if (!seg.skipped_peaks.empty()) err << ", skipped " << seg.skipped_peaks.size() << " near the record ends";
    err << "\n";
    if (seg.signals.empty()) throw DomainError("no complete segment could be extracted");
    emit(o.output, format_signals_csv(seg.signals), out);
    if (!o.peaks.empty())
        emit(o.peaks,
             json{{"window", cfg.window}, {"used", seg.used_peaks}, {"skipped", seg.skipped_peaks}}.dump(1) + "\n",
             out);
    return 0;
}

int run_simulate(const SimulationOptions& o, std::ostream& out, std::ostream& err) {
    const auto cfg = simulation_from(o);
    const auto shape = shape_from(o);
    Rng rng(cfg.seed);
    const auto data = simulate_dataset(shape, cfg, rng);
    err << "simulated " << data.signals.size() << " signals of length " << cfg.n << "\n";
    emit(o.output, format_signals_csv(data.signals), out);
    if (!o.shifts.empty()) emit(o.shifts, json{{"true_shifts", data.true_shifts}}.dump(1) + "\n", out);
    if (!o.truth.empty()) emit(o.truth, format_signals_csv({shape.sample(cfg.n)}), out);
    return 0;
}

json summary_json(const FiveNumberSummary& s) {
    return {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}, {"mean", s.mean}};
}

int run_benchmark_cmd(const SimulationOptions& o, std::ostream& out, std::ostream& err) {
    const auto cfg = simulation_from(o);
    const auto shape = shape_from(o);
    const auto bench = run_benchmark(shape, cfg);
    std::string csv = "replication,frechet_mse,procrustes_mse\n";
    for (std::size_t m = 0; m < bench.frechet_mses.size(); ++m)
        csv += std::to_string(m) + "," + format_double(bench.frechet_mses[m]) + "," +
               format_double(bench.procrustes_mses[m]) + "\n";
    emit(o.output, csv, out);
    const json summary{{"replications", cfg.replications},
                       {"n", cfg.n},
                       {"J", cfg.J},
                       {"shift_variance", cfg.shift_variance},
                       {"sigma", cfg.sigma},
                       {"seed", cfg.seed},
                       {"frechet", summary_json(bench.frechet)},
                       {"procrustes", summary_json(bench.procrustes)},
                       {"frechet_wins", bench.frechet_wins}};
    if (!o.summary.empty()) emit(o.summary, summary.dump(1) + "\n", out);
    err << "median MSE: frechet " << bench.frechet.median << ", procrustes " << bench.procrustes.median
        << "; frechet lower in " << bench.frechet_wins << "/" << cfg.replications << "\n";
    return 0;
}

// JSON config values become "--key value" tokens placed right after the
// subcommand name; flags given on the command line come later and win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (!path || args.empty()) return args;
    json doc;
    try {
        doc = json::parse(read_text_file(*path));
    } catch (const json::exception& e) {
        throw ParseError("malformed config file '" + *path + "': " + e.what());
    }
    if (!doc.is_object()) throw ParseError("config file must hold a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config") continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back(flag);
        } else if (value.is_string()) {
            tokens.push_back(flag);
            tokens.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            tokens.push_back(flag);
            tokens.push_back(value.dump());
        } else {
            throw ParseError("config key '" + key + "' must be a string, number or boolean");
        }
    }
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
    return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frechet means of time-deformed curves"};
    app.name("curvemean");
    app.set_version_flag("--version", CURVEMEAN_VERSION);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;

    AlignOptions mean_opts, align_opts, procrustes_opts;
    procrustes_opts.method = "procrustes";
    SmoothOptions smooth_opts;
    SegmentOptions segment_opts;
    SimulationOptions simulate_opts, bench_opts;

    auto* mean = app.add_subcommand("mean", "Mean curve of a dataset (euclidean, frechet or procrustes)");
    add_align_options(*mean, mean_opts, true);
    auto* align = app.add_subcommand("align", "Estimate the alignment parameters of a dataset");
    add_align_options(*align, align_opts, false);
    auto* procrustes = app.add_subcommand("procrustes", "Procrustes mean of the raw data");
    add_align_options(*procrustes, procrustes_opts, false);

    auto* smooth_cmd = app.add_subcommand("smooth", "Denoise every signal and write it on its grid");
    smooth_cmd->add_option("-i,--input", smooth_opts.input, "Dataset")->required();
    smooth_cmd->add_option("-o,--output", smooth_opts.output, "Smoothed dataset CSV (default: stdout)");
    smooth_cmd->add_option("--method", smooth_opts.method, "fourier, fourier-gcv, fourier-fixed, wavelet or none")
        ->check(CLI::IsMember({"fourier", "fourier-gcv", "fourier-fixed", "wavelet", "none"}));
    smooth_cmd->add_option("--cutoff", smooth_opts.cutoff, "Fixed Fourier cutoff (default: GCV)");
    smooth_cmd->add_option("--wavelet", smooth_opts.wavelet, "haar or db4")->check(CLI::IsMember({"haar", "db4"}));
    smooth_cmd->add_option("--m0", smooth_opts.m0, "Coarsest wavelet level");

    auto* segment_cmd = app.add_subcommand("segment", "Cut a record into peak-centred beats");
    segment_cmd->add_option("-i,--input", segment_opts.input, "Single-column record CSV")->required();
    segment_cmd->add_option("--sample-rate", segment_opts.sample_rate, "Samples per second")->required();
    segment_cmd->add_option("-o,--output", segment_opts.output, "Dataset CSV (default: stdout)");
    segment_cmd->add_option("--peaks", segment_opts.peaks, "Used and skipped peak indices JSON");
    segment_cmd->add_option("--window", segment_opts.window, "Segment length (default: 0.7 s of samples)");
    segment_cmd->add_flag("--power-of-two", segment_opts.power_of_two,
                          "Round the default window to a power of two (wavelet smoothing)");
    segment_cmd->add_option("--min-distance", segment_opts.min_distance, "Minimum peak spacing in samples");
    segment_cmd->add_option("--min-prominence", segment_opts.min_prominence, "Minimum peak prominence");

    auto* simulate = app.add_subcommand("simulate", "Draw a dataset from the random-shift model");
    add_simulation_options(*simulate, simulate_opts);
    simulate->add_option("-o,--output", simulate_opts.output, "Dataset CSV (default: stdout)");
    simulate->add_option("--shifts", simulate_opts.shifts, "True shifts JSON");
    simulate->add_option("--truth", simulate_opts.truth, "Mean shape on the grid CSV");

    auto* bench = app.add_subcommand("benchmark", "Replicated Frechet vs Procrustes MSE comparison");
    add_simulation_options(*bench, bench_opts);
    bench->add_option("--replications", bench_opts.replications, "Number of replications M");
    bench->add_option("-o,--output", bench_opts.output, "Per-replication MSE CSV (default: stdout)");
    bench->add_option("--summary", bench_opts.summary, "Summary JSON");

    for (auto* sub : app.get_subcommands({})) sub->add_option("--config", config_path, "JSON file of flag values");

    try {
        auto args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*mean) return run_mean(mean_opts, out, err);
        if (*align) return run_align(align_opts, out, err);
        if (*procrustes) return run_mean(procrustes_opts, out, err);
        if (*smooth_cmd) return run_smooth(smooth_opts, out, err);
        if (*segment_cmd) return run_segment(segment_opts, out, err);
        if (*simulate) return run_simulate(simulate_opts, out, err);
        if (*bench) return run_benchmark_cmd(bench_opts, out, err);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace curvemean::cli
