// cor: runs the Gaussian learning experiments and the verification suites.
//
//   cor --example 4 --n 1,2,4 --procedures closest-to-optimal,ml,consistent --out out/ex4
//   cor --config configs/example1.json --epsilon 0.005
//   cor --verify all

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cor/experiment.hpp"
#include "cor/verify.hpp"

namespace {

constexpr int kUsageError = 2;

int run_verify(const std::string& suite) {
    bool ok = true;
    for (const auto& report : cor::verify::run_suite(suite)) {
        cor::verify::print(std::cout, report);
        ok = ok && report.passed();
    }
    return ok ? 0 : 1;
}

int run(const cor::ExperimentConfig& config) {
    const auto report = cor::run_experiment(config);
    for (const auto& cell : report.skipped)
        std::cerr << "skipped " << cell << ": estimate-based procedures need a sample (n >= 1)\n";
    std::cout << "procedure            n  status       max_regret   S            s\n";
    for (const auto& r : report.runs) {
        std::string line = cor::to_string(r.procedure);
        line.resize(20, ' ');
        std::cout << line << ' ' << r.n << "  " << r.status << std::string(12 - r.status.size(), ' ') << ' '
                  << cor::io::format_number(r.max_regret) << "  "
                  << (r.upper ? cor::io::format_number(*r.upper) : "-") << "  "
                  << (r.lower ? cor::io::format_number(*r.lower) : "-") << '\n';
    }
    std::cout << "wrote " << report.files.size() << " files to " << config.out << " (config_hash "
              << report.config_hash << ")\n";
    if (!report.all_converged()) {
        std::cerr << "error: at least one solver run did not reach the requested accuracy; see the status column\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closest-to-optimal learning experiments on discretized Gaussian models"};
    app.set_version_flag("--version", std::string(cor::io::kLibraryVersion));

    std::string config_file;
    int example = 0;
    std::vector<std::size_t> sizes;
    std::vector<std::string> procedures;
    double epsilon = 0.0;
    double grid_step = 0.0;
    double theta_step = 0.0;
    std::size_t cells = 0;
    std::string out;
    std::string schedule;
    double initial_step = 0.0;
    std::size_t max_iter = 0;
    std::string suite;

    app.add_option("--config", config_file, "JSON experiment config; flags override its values")
        ->check(CLI::ExistingFile);
    auto* example_opt = app.add_option("--example", example, "experiment id 1-4");
    auto* n_opt = app.add_option("--n", sizes, "sample sizes, comma separated (default 0,1,2,4)")->delimiter(',');
    auto* proc_opt = app.add_option("--procedures", procedures,
                                    "closest-to-optimal, minimax, ml, robbins, consistent (comma separated)")
                         ->delimiter(',');
    auto* eps_opt = app.add_option("--epsilon", epsilon, "required accuracy S - s (default 0.01)");
    auto* grid_opt = app.add_option("--grid-step", grid_step, "signal grid step");
    auto* theta_opt = app.add_option("--theta-step", theta_step, "model grid step");
    auto* cells_opt = app.add_option("--cells", cells, "quantizer cells for signal samples (default 16)");
    auto* out_opt = app.add_option("--out", out, "output directory (default out)");
    auto* schedule_opt = app.add_option("--schedule", schedule, "step schedule: inv-sqrt or harmonic");
    auto* step_opt = app.add_option("--initial-step", initial_step, "initial step size override");
    auto* iter_opt = app.add_option("--max-iter", max_iter, "solver iteration cap (default 20000)");
    auto* verify_opt =
        app.add_option("--verify", suite, "run a verification suite: projection, concavity, optimality, "
                                          "compression or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*verify_opt) return run_verify(suite);

        cor::ExperimentConfig config;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw cor::ConfigurationError("cannot parse " + config_file + ": " + e.what());
            }
            config = cor::config_from_json(j);
        } else if (!*example_opt) {
            std::cerr << "error: give --example, --config or --verify\n" << app.help();
            return kUsageError;
        }
        if (*example_opt) config.example = example;
        if (*n_opt) config.sample_sizes = sizes;
        if (*proc_opt) {
            config.procedures.clear();
            for (const auto& p : procedures) config.procedures.push_back(cor::parse_procedure(p));
        }
        if (*eps_opt) config.epsilon = epsilon;
        if (*grid_opt) config.grid_step = grid_step;
        if (*theta_opt) config.theta_step = theta_step;
        if (*cells_opt) config.quantizer_cells = cells;
        if (*out_opt) config.out = out;
        if (*schedule_opt) config.schedule.kind = cor::parse_schedule(schedule);
        if (*step_opt) config.schedule.initial_step = initial_step;
        if (*iter_opt) config.max_iterations = max_iter;
        return run(config);
    } catch (const cor::ConfigurationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
