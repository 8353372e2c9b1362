#pragma once

// Builds the four Gaussian learning experiments, runs solvers and
// heuristics over a list of sample sizes, and writes figure-ready CSV files
// plus a gnuplot script.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cor/decision.hpp"
#include "cor/gaussian.hpp"
#include "cor/io.hpp"
#include "cor/learning.hpp"
#include "cor/solver.hpp"

namespace cor {

enum class Procedure { closest_to_optimal, minimax, ml, robbins, consistent };

inline std::string to_string(Procedure p) {
    switch (p) {
        case Procedure::closest_to_optimal: return "closest-to-optimal";
        case Procedure::minimax: return "minimax";
        case Procedure::ml: return "ml";
        case Procedure::robbins: return "robbins";
        case Procedure::consistent: return "consistent";
    }
    return "unknown";
}

inline Procedure parse_procedure(const std::string& name) {
    for (auto p : {Procedure::closest_to_optimal, Procedure::minimax, Procedure::ml, Procedure::robbins,
                   Procedure::consistent})
        if (to_string(p) == name) return p;
    throw ConfigurationError("unknown procedure '" + name +
                             "' (expected closest-to-optimal, minimax, ml, robbins or consistent)");
}

inline bool needs_sample(Procedure p) { return p != Procedure::closest_to_optimal && p != Procedure::minimax; }

struct ExperimentConfig {
    int example = 1;
    std::vector<std::size_t> sample_sizes{0, 1, 2, 4};
    std::vector<Procedure> procedures;  ///< empty: the example's default set
    double epsilon = 0.01;
    std::optional<double> grid_step;
    std::optional<double> theta_step;
    std::size_t quantizer_cells = 16;
    StepSchedule schedule{};
    std::size_t max_iterations = 20000;
    std::string out = "out";
    std::uint64_t seed = 0;  ///< reserved; every pipeline is deterministic
};

inline std::vector<Procedure> default_procedures(int example) {
    switch (example) {
        case 1: return {Procedure::closest_to_optimal, Procedure::ml};
        case 2: return {Procedure::closest_to_optimal, Procedure::ml, Procedure::robbins};
        default: return {Procedure::closest_to_optimal, Procedure::ml, Procedure::consistent};
    }
}

inline void validate(const ExperimentConfig& config) {
    if (config.example < 1 || config.example > 4)
        throw ConfigurationError("unknown example " + std::to_string(config.example) + " (expected 1, 2, 3 or 4)");
    detail::require(config.epsilon > 0.0, "epsilon must be positive");
    detail::require(!config.sample_sizes.empty(), "no sample sizes given");
    detail::require(config.quantizer_cells > 0, "quantizer needs at least one cell");
    detail::require(config.max_iterations > 0, "max_iterations must be positive");
    for (auto p : config.procedures)
        if (p == Procedure::robbins && config.example != 2)
            throw ConfigurationError("the robbins procedure needs signal samples of the Robbins model (example 2)");
}

/// Canonical JSON of the settings that determine the outputs (the output directory is excluded).
inline nlohmann::json canonical_json(const ExperimentConfig& config) {
    nlohmann::json procs = nlohmann::json::array();
    for (auto p : config.procedures.empty() ? default_procedures(config.example) : config.procedures)
        procs.push_back(to_string(p));
    nlohmann::json j{{"example", config.example},
                     {"n", config.sample_sizes},
                     {"procedures", procs},
                     {"epsilon", config.epsilon},
                     {"cells", config.quantizer_cells},
                     {"schedule", config.schedule.kind == StepSchedule::Kind::inverse_sqrt ? "inv-sqrt" : "harmonic"},
                     {"max_iter", config.max_iterations},
                     {"seed", config.seed}};
    j["grid_step"] = config.grid_step ? nlohmann::json(*config.grid_step) : nlohmann::json(nullptr);
    j["theta_step"] = config.theta_step ? nlohmann::json(*config.theta_step) : nlohmann::json(nullptr);
    j["initial_step"] =
        config.schedule.initial_step ? nlohmann::json(*config.schedule.initial_step) : nlohmann::json(nullptr);
    return j;
}

/// FNV-1a of the canonical config JSON, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_json(config).dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

inline StepSchedule::Kind parse_schedule(const std::string& name) {
    if (name == "inv-sqrt") return StepSchedule::Kind::inverse_sqrt;
    if (name == "harmonic") return StepSchedule::Kind::harmonic;
    throw ConfigurationError("unknown step schedule '" + name + "' (expected inv-sqrt or harmonic)");
}

/// Reads the JSON config file format; keys mirror the CLI flags.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig config = {}) {
    try {
        if (j.contains("example")) config.example = j.at("example").get<int>();
        if (j.contains("n")) config.sample_sizes = j.at("n").get<std::vector<std::size_t>>();
        if (j.contains("procedures")) {
            config.procedures.clear();
            for (const auto& p : j.at("procedures")) config.procedures.push_back(parse_procedure(p.get<std::string>()));
        }
        if (j.contains("epsilon")) config.epsilon = j.at("epsilon").get<double>();
        if (j.contains("grid_step")) config.grid_step = j.at("grid_step").get<double>();
        if (j.contains("theta_step")) config.theta_step = j.at("theta_step").get<double>();
        if (j.contains("cells")) config.quantizer_cells = j.at("cells").get<std::size_t>();
        if (j.contains("schedule")) config.schedule.kind = parse_schedule(j.at("schedule").get<std::string>());
        if (j.contains("initial_step")) config.schedule.initial_step = j.at("initial_step").get<double>();
        if (j.contains("max_iter")) config.max_iterations = j.at("max_iter").get<std::size_t>();
        if (j.contains("out")) config.out = j.at("out").get<std::string>();
        if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("bad experiment config: ") + e.what());
    }
    return config;
}

/**
 * One of the four learning experiments: the discretized object, its loss,
 * and the learning source family indexed by sample size.
 *   1: Robbins object, state samples (compressed to counts)
 *   2: Robbins object, quantized signal samples
 *   3: two-mean object, quantized signals drawn from state 2
 *   4: two-mean object, quantized unlabeled signals
 */
class ExampleSetup {
public:
    ExampleSetup(int example, std::optional<double> grid_step, std::optional<double> theta_step,
                 std::size_t quantizer_cells)
        : id_(example), example_(build(example, grid_step, theta_step)), loss_(LossMatrix::zero_one(2)) {
        if (example != 1) {
            const double range = example == 2 ? 4.0 : 8.0;
            quantizer_ = make_quantizer(example_, -range, range, quantizer_cells);
        }
    }

    int id() const { return id_; }
    const DiscretizedExample& example() const { return example_; }
    const LossMatrix& loss() const { return loss_; }
    const SignalQuantizer& quantizer() const { return quantizer_; }

    LearningSource source(std::size_t n) const {
        switch (id_) {
            case 1: return supervised_source(example_.object, n, Observation::states_only);
            case 3: return quantized_signal_source(example_.object, n, quantizer_.map, std::size_t{1});
            default: return quantized_signal_source(example_.object, n, quantizer_.map);
        }
    }

    HeuristicSetup heuristic(Procedure p) const {
        HeuristicSetup setup;
        setup.cell_centers = quantizer_.centers;
        switch (p) {
            case Procedure::ml:
                setup.kind = id_ == 1 ? HeuristicKind::ml_supervised : HeuristicKind::ml_unsupervised;
                break;
            case Procedure::robbins: setup.kind = HeuristicKind::robbins; break;
            case Procedure::consistent:
                setup.kind = HeuristicKind::consistent;
                if (id_ == 2) setup.estimator = Estimator::robbins_mixture;
                if (id_ == 3) setup.estimator = Estimator::state_mean;
                if (id_ == 4) setup.estimator = Estimator::two_mean_mixture;
                break;
            default: throw ConfigurationError(to_string(p) + " is not a heuristic procedure");
        }
        return setup;
    }

private:
    static DiscretizedExample build(int example, std::optional<double> grid_step, std::optional<double> theta_step) {
        if (example == 1 || example == 2)
            return discretize(GaussianExampleSpec::robbins(theta_step.value_or(0.05)),
                              Grid1D(-6.0, 6.0, grid_step.value_or(0.01)));
        if (example == 3 || example == 4)
            return discretize(GaussianExampleSpec::two_mean(theta_step.value_or(0.2)),
                              Grid1D(-10.0, 10.0, grid_step.value_or(0.02)));
        throw ConfigurationError("unknown example " + std::to_string(example));
    }

    int id_;
    DiscretizedExample example_;
    LossMatrix loss_;
    SignalQuantizer quantizer_;
};

struct RunSummary {
    Procedure procedure;
    std::size_t n = 0;
    std::string status;  ///< converged | unconverged | exact
    double max_regret = 0.0;
    double max_risk = 0.0;
    std::optional<double> upper;
    std::optional<double> lower;
    std::size_t iterations = 0;
    std::vector<io::CurvePoint> curve;
    std::optional<SolverTrace> trace;
};

struct ExperimentReport {
    std::string config_hash;
    std::vector<RunSummary> runs;
    std::vector<std::string> skipped;  ///< (procedure, n) cells excluded because n = 0
    std::vector<std::filesystem::path> files;

    bool all_converged() const {
        return std::none_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.status == "unconverged"; });
    }

    const RunSummary* find(Procedure p, std::size_t n) const {
        for (const auto& r : runs)
            if (r.procedure == p && r.n == n) return &r;
        return nullptr;
    }
};

inline RunSummary run_cell(const ExampleSetup& setup, const ExperimentConfig& config, Procedure procedure,
                           std::size_t n) {
    const auto& example = setup.example();
    LearningProblem problem(example.object, setup.loss(), setup.source(n));
    RunSummary run{procedure, n};
    std::vector<double> risks;
    if (procedure == Procedure::closest_to_optimal || procedure == Procedure::minimax) {
        SolverConfig solver;
        solver.epsilon = config.epsilon;
        solver.schedule = config.schedule;
        solver.max_iterations = config.max_iterations;
        auto result = procedure == Procedure::minimax ? solve_minimax(problem, solver)
                                                      : solve_closest_to_optimal(problem, solver);
        risks = problem.expected_risks(result.procedure);
        run.status = result.converged ? "converged" : "unconverged";
        run.upper = result.upper;
        run.lower = result.lower;
        run.iterations = result.trace.records.size();
        run.trace = std::move(result.trace);
    } else {
        risks = heuristic_procedure_risks(example, setup.loss(), problem.source(), setup.heuristic(procedure));
        run.status = "exact";
    }
    run.max_regret = -std::numeric_limits<double>::infinity();
    run.max_risk = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < risks.size(); ++t) {
        run.curve.push_back({example.spec.thetas[t], risks[t], problem.optimal()[t]});
        run.max_regret = std::max(run.max_regret, risks[t] - problem.optimal()[t]);
        run.max_risk = std::max(run.max_risk, risks[t]);
    }
    return run;
}

namespace detail {

inline std::string cell_name(Procedure p, std::size_t n) { return to_string(p) + "_n" + std::to_string(n); }

inline void write_plot_script(std::ostream& out, const ExperimentConfig& config, const std::vector<Procedure>& procs,
                              const std::string& comment) {
    out << "# " << comment << "\n"
        << "# Render with: gnuplot plot.gp\n"
        << "set datafile separator ','\n"
        << "set terminal pngcairo size 800,600\n"
        << "set xlabel 'theta'\n"
        << "set ylabel 'risk'\n"
        << "set key top right\n";
    for (std::size_t n : config.sample_sizes) {
        std::vector<std::string> series;
        std::string optimal_source;
        for (auto p : procs) {
            if (n == 0 && needs_sample(p)) continue;
            std::string file = "curve_" + cell_name(p, n) + ".csv";
            series.push_back("'" + file + "' skip 2 using 1:2 with linespoints title '" + to_string(p) + "'");
            if (optimal_source.empty()) optimal_source = file;
        }
        if (series.empty()) continue;
        out << "\nset output 'figure_example" << config.example << "_n" << n << ".png'\n"
            << "set title 'Example " << config.example << ", n = " << n << "'\n"
            << "plot ";
        for (const auto& s : series) out << s << ", \\\n     ";
        out << "'" << optimal_source << "' skip 2 using 1:3 with lines lw 2 lc rgb 'black' title 'optimal risk'\n";
    }
}

}  // namespace detail

/**
 * Runs every (procedure, n) cell and, when `write_files` is set, writes
 * curve_<procedure>_n<n>.csv, trace_<procedure>_n<n>.csv for solver runs,
 * summary.csv and plot.gp into config.out.
 */
inline ExperimentReport run_experiment(const ExperimentConfig& config, bool write_files = true) {
    validate(config);
    const auto procedures = config.procedures.empty() ? default_procedures(config.example) : config.procedures;
    ExampleSetup setup(config.example, config.grid_step, config.theta_step, config.quantizer_cells);

    ExperimentReport report;
    report.config_hash = config_hash(config);
    for (std::size_t n : config.sample_sizes)
        for (auto p : procedures) {
            if (n == 0 && needs_sample(p)) {
                report.skipped.push_back(detail::cell_name(p, n));
                continue;
            }
            report.runs.push_back(run_cell(setup, config, p, n));
        }
    if (!write_files) return report;

    namespace fs = std::filesystem;
    const fs::path dir(config.out);
    fs::create_directories(dir);
    const std::string comment = std::string("cor ") + io::kLibraryVersion + " config_hash=" + report.config_hash +
                                " example=" + std::to_string(config.example);
    auto open = [&](const std::string& name) {
        report.files.push_back(dir / name);
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        return out;
    };
    for (const auto& run : report.runs) {
        const auto name = detail::cell_name(run.procedure, run.n);
        auto curve = open("curve_" + name + ".csv");
        io::write_curve_csv(curve, run.curve, run.status, comment + " procedure=" + to_string(run.procedure) +
                                                            " n=" + std::to_string(run.n));
        if (run.trace) {
            auto trace = open("trace_" + name + ".csv");
            io::write_trace_csv(trace, *run.trace, true, comment + " procedure=" + to_string(run.procedure) +
                                                             " n=" + std::to_string(run.n));
        }
    }
    auto summary = open("summary.csv");
    summary << "# " << comment << "\nprocedure,n,status,max_regret,max_risk,S,s,iterations\n";
    for (const auto& run : report.runs)
        summary << to_string(run.procedure) << ',' << run.n << ',' << run.status << ','
                << io::format_number(run.max_regret) << ',' << io::format_number(run.max_risk) << ','
                << (run.upper ? io::format_number(*run.upper) : "") << ','
                << (run.lower ? io::format_number(*run.lower) : "") << ',' << run.iterations << '\n';
    auto plot = open("plot.gp");
    detail::write_plot_script(plot, config, procedures, comment);
    return report;
}

}  // namespace cor
