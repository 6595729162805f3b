// tisplan: benchmark driver for the SST planner and its exploration strategies.

#include "tis/bench.hpp"
#include "tis/env.hpp"
#include "tis/planner.hpp"
#include "tis/reach.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace tis;

namespace {

struct BudgetArgs {
    double seconds = 20.0;
    std::size_t iterations = 0;

    Budget budget() const {
        return iterations > 0 ? Budget::iters(iterations) : Budget::wall(seconds);
    }
};

void add_budget(CLI::App* cmd, BudgetArgs& b) {
    cmd->add_option("--budget", b.seconds, "Wall-clock budget per trial, seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--iterations", b.iterations,
                    "Iteration budget per trial; overrides --budget and makes runs reproducible");
}

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names) {
    std::vector<Strategy> out;
    for (const auto& item : names) {
        std::stringstream ss(item);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) out.push_back(parse_strategy(name));
        }
    }
    return out;
}

std::vector<int> parse_ints(const std::string& list) {
    std::vector<int> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("not an integer: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

ProblemConfig load_problem(const std::string& name, bool no_obstacles) {
    ProblemConfig cfg = resolve_problem(name);
    if (no_obstacles) {
        cfg.environment = cfg.environment.without_obstacles();
    }
    return cfg;
}

template <typename Emit>
void write_csv(const std::string& path, Emit&& emit) {
    std::ostringstream os;
    emit(os);
    if (path.empty() || path == "-") {
        std::cout << os.str();
    } else {
        write_file(path, os.str());
    }
}

void print_summary(const std::vector<TrialRecord>& records) {
    std::map<Strategy, std::vector<double>> finals;
    std::map<Strategy, std::size_t> failures;
    for (const auto& r : records) {
        if (!r.error.empty() || r.events.empty()) {
            ++failures[r.strategy];
            continue;
        }
        finals[r.strategy].push_back(r.events.back().best_cost);
    }
    for (const auto& [s, costs] : finals) {
        std::vector<double> solved;
        for (double c : costs) {
            if (std::isfinite(c)) solved.push_back(c);
        }
        const Summary sum = summarize(solved);
        std::cerr << to_string(s) << ": solved " << solved.size() << "/"
                  << costs.size() + failures[s] << ", median final cost " << sum.median << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-informed exploration for SST: trials, libraries and aggregation"};
    app.require_subcommand(1);

    // run
    std::string problem = "toy2d";
    std::vector<std::string> strategy_names{"uniform,ip,tie"};
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    std::string out;
    bool no_obstacles = false;
    BudgetArgs budget;
    auto* run = app.add_subcommand("run", "Seeded trials per strategy; CSV of event logs");
    run->add_option("--problem", problem, "Builtin name or JSON config path");
    run->add_option("--strategy", strategy_names, "uniform | ip | tie (comma list or repeated)");
    run->add_option("--trials", trials, "Trials per strategy")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed; trial i uses seed + i");
    run->add_option("--out", out, "Output CSV (default stdout)");
    run->add_flag("--no-obstacles", no_obstacles, "Drop the obstacle set");
    add_budget(run, budget);

    // library
    double horizon = 0.0;
    double step = 0.0;
    auto* lib = app.add_subcommand("library", "Build and store a reachability library");
    lib->add_option("--problem", problem, "Builtin name or JSON config path");
    lib->add_option("--horizon", horizon, "Horizon, seconds")->required();
    lib->add_option("--step", step, "Grid pitch, seconds (default from the config)");
    lib->add_option("--out", out, "Output file")->required();

    // fallback-study
    std::string ns_list = "1,10,50";
    auto* fb = app.add_subcommand("fallback-study", "TIE fallback ratio for several n_s values");
    fb->add_option("--problem", problem, "Builtin name or JSON config path");
    fb->add_option("--ns", ns_list, "Comma separated attempt counts");
    fb->add_option("--trials", trials, "Trials per value")->check(CLI::PositiveNumber);
    fb->add_option("--seed", seed, "Base seed");
    fb->add_option("--out", out, "Output CSV (default stdout)");
    fb->add_flag("--no-obstacles", no_obstacles, "Drop the obstacle set");
    add_budget(fb, budget);

    // aggregate
    double bin = 1.0;
    std::vector<std::string> inputs;
    std::string plot;
    std::string axis_name = "seconds";
    auto* agg = app.add_subcommand("aggregate", "Convergence table from run CSVs");
    agg->add_option("--bin", bin, "Bin width (seconds or iterations)")->check(CLI::PositiveNumber);
    agg->add_option("--in", inputs, "Run CSV files")->required();
    agg->add_option("--out", out, "Table CSV (default stdout)");
    agg->add_option("--plot", plot, "Also write plot data to this path");
    agg->add_option("--axis", axis_name, "seconds | iterations")
        ->check(CLI::IsMember({"seconds", "iterations"}));

    // config
    auto* cfg_cmd = app.add_subcommand("config", "Print a problem configuration as JSON");
    cfg_cmd->add_option("--problem", problem, "Builtin name or JSON config path");
    cfg_cmd->add_option("--out", out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) {
            const ProblemConfig cfg = load_problem(problem, no_obstacles);
            const auto strategies = parse_strategies(strategy_names);
            const BatchResult batch = run_trials(cfg, strategies, trials, budget.budget(), seed);
            write_csv(out, [&](std::ostream& os) { emit_csv(batch.records, os); });
            if (batch.library_build_ms > 0.0) {
                std::cerr << "library built in " << batch.library_build_ms << " ms\n";
            }
            print_summary(batch.records);
        } else if (lib->parsed()) {
            const ProblemConfig cfg = load_problem(problem, false);
            const double pitch = step > 0.0 ? step : cfg.library.step;
            const ReachLibrary library =
                build_library(cfg.system, cfg.environment.start(), cfg.environment.goal(), horizon,
                              pitch, cfg.library.start_radius, cfg.name);
            save_library(library, out);
            std::cerr << "wrote " << library.size() << " forward/backward pairs to " << out
                      << "\n";
        } else if (fb->parsed()) {
            const ProblemConfig cfg = load_problem(problem, no_obstacles);
            const auto rows =
                fallback_study(cfg, parse_ints(ns_list), trials, budget.budget(), seed);
            write_csv(out, [&](std::ostream& os) { emit_csv(rows, os); });
        } else if (agg->parsed()) {
            std::vector<TrialRecord> records;
            for (const auto& path : inputs) {
                std::istringstream is(read_file(path));
                auto part = read_records_csv(is);
                records.insert(records.end(), part.begin(), part.end());
            }
            const Axis axis = axis_name == "iterations" ? Axis::iterations : Axis::seconds;
            const ConvergenceTable table = aggregate(records, bin, axis);
            write_csv(out, [&](std::ostream& os) { emit_csv(table, os); });
            if (!plot.empty()) {
                std::ostringstream os;
                emit_plot_data(table, os);
                write_file(plot, os.str());
            }
        } else if (cfg_cmd->parsed()) {
            const std::string text = config_to_json(resolve_problem(problem));
            write_csv(out, [&](std::ostream& os) { os << text << "\n"; });
        }
    } catch (const std::exception& e) {
        std::cerr << "tisplan: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
