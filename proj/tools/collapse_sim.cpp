// Copyright 2026 The collapse-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// collapse-sim: ensemble runs, spectra, conformance checks and the exact
// walk oracle from the command line.
//
// Exit codes: 0 success / all checks pass, 1 a check failed, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collapse/conformance.hpp"
#include "collapse/ensemble.hpp"
#include "collapse/io.hpp"
#include "collapse/numeric.hpp"
#include "collapse/spectral.hpp"
#include "collapse/walk.hpp"

namespace {

using namespace collapse;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct RunArgs {
    std::vector<double> weights;
    std::vector<double> phases;
    double epsilon = 0.0;
    double tau = 1.0;
    std::uint64_t trajectories = 1000;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
    std::uint64_t record_every = 0;
    std::string out;
    std::string format;
    std::string phase_dist = "three-point";
    unsigned workers = 0;
};

struct SpectrumArgs {
    double epsilon = 0.0;
    double tau = 1.0;
    std::string out;
};

struct ConformanceArgs {
    std::string check;
    std::vector<double> weights;
    double epsilon = 0.1;
    double tau = 1.0;
    std::uint64_t samples = 100'000;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
    double start = 0.3;
    std::string phase_dist = "three-point";
    std::string out;
    unsigned workers = 0;
};

struct OracleArgs {
    double epsilon = 0.0;
    double start = 0.0;
};

/// Config files hold plain key=value lines; unqualified keys belong to the
/// subcommand on the command line.
class SubcommandConfig : public CLI::ConfigTOML {
  public:
    explicit SubcommandConfig(const CLI::App &app) : app_(app) {}

    std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
        auto items = CLI::ConfigTOML::from_config(input);
        const auto subs = app_.get_subcommands();
        if (!subs.empty()) {
            for (auto &item : items) {
                if (item.parents.empty()) {
                    item.parents = {subs.front()->get_name()};
                }
            }
        }
        return items;
    }

  private:
    const CLI::App &app_;
};

/// COLLAPSE_SIM_WORKERS wins over --workers.
unsigned workers_from_env(unsigned flag_value) {
    const char *env = std::getenv("COLLAPSE_SIM_WORKERS");
    if (env == nullptr || *env == '\0') {
        return flag_value;
    }
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(env, &used);
        if (used != std::char_traits<char>::length(env)) {
            throw InvalidArgument("");
        }
        return static_cast<unsigned>(v);
    } catch (const std::exception &) {
        throw InvalidArgument("COLLAPSE_SIM_WORKERS must be a non-negative integer");
    }
}

void emit(const std::string &out_path, const std::string &content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        io::write_text_file(out_path, content);
    }
}

int cmd_run(const RunArgs &a) {
    RunConfig config;
    config.weights = a.weights;
    config.phases = a.phases;
    config.params.epsilon = a.epsilon;
    config.params.tau = a.tau;
    config.params.seed = a.seed;
    config.params.phase_dist = parse_phase_distribution(a.phase_dist);
    config.n_trajectories = a.trajectories;
    config.max_steps =
        a.max_steps > 0 ? a.max_steps : default_max_steps(a.epsilon);
    config.record_every = a.record_every;
    config.worker_count = workers_from_env(a.workers);
    for (const auto &w : config.validate()) {
        std::cerr << "warning: " << w << '\n';
    }

    std::string format = a.format;
    if (format.empty()) {
        format = std::filesystem::path(a.out).extension() == ".json" ? "json"
                                                                      : "csv";
    }

    const WaveState initial = config.initial_state();
    const EnsembleStats stats = run_ensemble(config);

    if (format == "json") {
        emit(a.out, io::ensemble_to_json(stats, config));
    } else {
        std::ostringstream series;
        io::write_series_csv(series, stats);
        std::ostringstream survival;
        io::write_survival_csv(survival, stats, initial);
        if (a.out.empty()) {
            std::cout << survival.str();
            if (config.record_every > 0) {
                std::cout << series.str();
            }
        } else {
            io::write_text_file(a.out, series.str());
            io::write_text_file(io::survival_path(a.out), survival.str());
        }
    }

    if (!a.out.empty()) {
        std::cout << "trajectories=" << stats.total_trajectories
                  << " resolved=" << stats.resolved()
                  << " unresolved=" << stats.unresolved
                  << " mean_collapse_steps="
                  << format_double(stats.mean_collapse_steps()) << '\n';
        for (std::size_t i = 0; i < stats.packet_count(); ++i) {
            std::cout << "packet " << i
                      << ": initial_weight=" << format_double(initial.weight(i))
                      << " survival_frequency="
                      << format_double(stats.survival_frequency(i)) << '\n';
        }
    }
    return kExitPass;
}

int cmd_spectrum(const SpectrumArgs &a) {
    FluctuationParams params;
    params.epsilon = a.epsilon;
    params.tau = a.tau;
    (void)params.validate();
    const StatMatrix S = build_stat_matrix(a.epsilon);
    SpectralOptions options;
    options.eigenvectors = false;
    options.tau = a.tau;
    const SpectralResult spec = eigen_spectrum(S, options);
    std::ostringstream csv;
    io::write_spectrum_csv(csv, spec, a.epsilon, a.tau);
    emit(a.out, csv.str());
    return kExitPass;
}

int cmd_conformance(const ConformanceArgs &a) {
    ConformanceConfig config;
    config.epsilon = a.epsilon;
    config.tau = a.tau;
    config.weights = a.weights;
    config.samples = a.samples;
    config.seed = a.seed;
    config.max_steps = a.max_steps;
    config.workers = workers_from_env(a.workers);
    config.start = a.start;
    config.phase_dist = parse_phase_distribution(a.phase_dist);
    if (config.phase_dist == PhaseDistribution::Custom) {
        throw InvalidArgument("phase distribution 'custom' is library-only");
    }
    const auto reports = run_checks(a.check, config);
    std::cout << io::reports_to_text(reports);
    if (!a.out.empty()) {
        io::write_text_file(a.out, io::reports_to_json(reports, config));
    }
    bool pass = true;
    for (const auto &r : reports) {
        pass = pass && r.pass;
    }
    std::cout << (pass ? "conformance: PASS" : "conformance: FAIL") << '\n';
    return pass ? kExitPass : kExitCheckFailed;
}

int cmd_walk_oracle(const OracleArgs &a) {
    const WalkGrid grid = WalkGrid::from_epsilon(a.epsilon);
    if (!grid.contains(a.start)) {
        throw InvalidArgument("start " + format_double(a.start) +
                              " is not a grid point m*eps");
    }
    const double x0 = grid.point(grid.index_of(a.start));
    const auto scheme = TransitionScheme::combined(a.epsilon);
    const double w = absorption_oracle(scheme, x0);
    std::cout << "start=" << format_double(x0) << '\n'
              << "absorption_probability=" << format_double(w) << '\n'
              << "deviation=" << format_double(std::abs(w - x0)) << '\n'
              << "expected_steps="
              << format_double(expected_absorption_steps(scheme, x0)) << '\n';
    return kExitPass;
}

template <class F>
int guarded(F &&body) {
    try {
        return body();
    } catch (const InvalidArgument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const io::FormatError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Stochastic collapse model simulator"};
    app.require_subcommand(1);
    auto formatter = std::make_shared<SubcommandConfig>(app);
    app.config_formatter(formatter);
    app.set_config("--config", "", "key=value file; command-line flags override it");

    const auto phase_names =
        CLI::IsMember({"three-point", "deterministic-real", "deterministic"});

    RunArgs run;
    auto *run_cmd = app.add_subcommand("run", "Run a trajectory ensemble");
    run_cmd->add_option("--weights", run.weights, "Initial packet weights")
        ->delimiter(',')
        ->required();
    run_cmd->add_option("--phases", run.phases, "Initial phases (default 0)")
        ->delimiter(',');
    run_cmd->add_option("--epsilon", run.epsilon, "Fluctuation size")->required();
    run_cmd->add_option("--tau", run.tau, "Time between fluctuations");
    run_cmd->add_option("--trajectories", run.trajectories, "Ensemble size");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--max-steps", run.max_steps,
                        "Per-trajectory step cap (0: automatic)");
    run_cmd->add_option("--record-every", run.record_every,
                        "Time-series stride (0: none)");
    run_cmd->add_option("--out", run.out, "Output path (stdout if omitted)");
    run_cmd->add_option("--format", run.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--phase-dist", run.phase_dist, "Phase distribution")
        ->check(phase_names);
    run_cmd->add_option("--workers", run.workers, "Worker threads (0: auto)");

    SpectrumArgs spectrum;
    auto *spec_cmd =
        app.add_subcommand("spectrum", "Eigenvalues and relaxation times");
    spec_cmd->add_option("--epsilon", spectrum.epsilon, "Step size, 1/eps integer")
        ->required();
    spec_cmd->add_option("--tau", spectrum.tau, "Time between fluctuations");
    spec_cmd->add_option("--out", spectrum.out, "CSV path (stdout if omitted)");

    ConformanceArgs conf;
    auto *conf_cmd =
        app.add_subcommand("conformance", "Statistical conformance checks");
    std::vector<std::string> checks = check_names();
    checks.emplace_back("all");
    conf_cmd->add_option("--check", conf.check, "Check name or all")
        ->required()
        ->check(CLI::IsMember(checks));
    conf_cmd->add_option("--weights", conf.weights, "Override the default state")
        ->delimiter(',');
    conf_cmd->add_option("--epsilon", conf.epsilon, "Fluctuation size");
    conf_cmd->add_option("--tau", conf.tau, "Time between fluctuations");
    conf_cmd->add_option("--trajectories,--samples", conf.samples,
                         "Samples per experiment");
    conf_cmd->add_option("--seed", conf.seed, "Master seed");
    conf_cmd->add_option("--max-steps", conf.max_steps,
                         "Per-trajectory step cap (0: automatic)");
    conf_cmd->add_option("--start", conf.start, "Start weight for evolution");
    conf_cmd->add_option("--phase-dist", conf.phase_dist, "Phase distribution")
        ->check(phase_names);
    conf_cmd->add_option("--out", conf.out, "JSON report path");
    conf_cmd->add_option("--workers", conf.workers, "Worker threads (0: auto)");

    OracleArgs oracle;
    auto *oracle_cmd = app.add_subcommand(
        "walk-oracle", "Exact absorption probability of the weight walk");
    oracle_cmd->add_option("--epsilon", oracle.epsilon, "Step size")->required();
    oracle_cmd->add_option("--start", oracle.start, "Grid start weight")
        ->required();

    for (auto *sub : {run_cmd, spec_cmd, conf_cmd, oracle_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        (void)app.exit(e);
        return kExitUsage;
    }

    if (*run_cmd) {
        return guarded([&] { return cmd_run(run); });
    }
    if (*spec_cmd) {
        return guarded([&] { return cmd_spectrum(spectrum); });
    }
    if (*conf_cmd) {
        return guarded([&] { return cmd_conformance(conf); });
    }
    return guarded([&] { return cmd_walk_oracle(oracle); });
}
