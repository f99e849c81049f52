/*
   Copyright 2026 the lqtraj authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lqtraj/experiments.hpp"
#include "lqtraj/validation.hpp"

namespace {

// exit codes: 0 success, 2 configuration error, 3 validation failure,
// 4 numerical error
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

std::vector<double> parse_grid(const std::string& spec) {
    double a = 0.0, b = 0.0;
    int n = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1 || b <= a)
        throw lqtraj::ArgumentError("grid must be a:b:n with b > a and n >= 1");
    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = a;
        return grid;
    }
    for (int i = 0; i < n; ++i)
        grid[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    return grid;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lqtraj::ArgumentError("cannot open output file: " + path);
    out << text;
}

struct CommonOptions {
    lqtraj::ExperimentConfig config;
    std::string grid_spec;
    std::string format = "csv";
    std::string oracle = "off";
    bool grid_given = false;
    bool dim_given = false;
    bool dt_given = false;
    bool traj_given = false;
};

void attach_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->set_config("--config", "", "flat key=value config file");
    cmd->add_option("--seed", opts.config.seed, "base RNG seed");
    cmd->add_option("--trajectories", opts.config.trajectories,
                    "Monte Carlo trajectories per point")
        ->trigger_on_parse()
        ->each([&](const std::string&) { opts.traj_given = true; });
    cmd->add_option("--dim", opts.config.dim, "Fock-space truncation dimension")
        ->trigger_on_parse()
        ->each([&](const std::string&) { opts.dim_given = true; });
    cmd->add_option("--dt", opts.config.dt, "SDE time step")
        ->trigger_on_parse()
        ->each([&](const std::string&) { opts.dt_given = true; });
    cmd->add_option("--grid", opts.grid_spec, "abscissa grid a:b:n")
        ->trigger_on_parse()
        ->each([&](const std::string&) { opts.grid_given = true; });
    cmd->add_option("--out", opts.config.output_path,
                    "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--oracle", opts.oracle, "enable oracle cross-check columns")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--workers", opts.config.workers, "worker thread count");
}

void finalize(CommonOptions& opts, const std::string& default_grid,
              int default_dim, double default_dt, std::size_t default_traj) {
    if (!opts.grid_given) opts.grid_spec = default_grid;
    if (!opts.dim_given) opts.config.dim = default_dim;
    if (!opts.dt_given) opts.config.dt = default_dt;
    if (!opts.traj_given) opts.config.trajectories = default_traj;
    opts.config.grid = parse_grid(opts.grid_spec);
    opts.config.format =
        opts.format == "json" ? lqtraj::OutputFormat::Json : lqtraj::OutputFormat::Csv;
    opts.config.oracle = opts.oracle == "on";
    if (opts.config.workers < 1) opts.config.workers = 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lqtraj: linear quantum trajectory simulator.\n"
        "Closed-form evolution operators for three continuous-measurement\n"
        "models, validated against direct SDE and master-equation oracles."};
    app.require_subcommand(1);

    CommonOptions fig1_opts, mom_opts, ho_opts;
    std::string validate_format = "text";
    std::string validate_out;
    unsigned validate_workers = lqtraj::default_workers();
    std::uint64_t validate_seed = 20260810;

    CLI::App* fig1 = app.add_subcommand(
        "fig1-qnd",
        "average conditional photon-number uncertainty against tau = kt for a "
        "thermal (nbar) and a coherent (alpha) initial state; per abscissa the "
        "thermal row precedes the coherent one");
    attach_common(fig1, fig1_opts);
    fig1->add_option("--nbar", fig1_opts.config.nbar, "thermal mean photon number");
    fig1->add_option("--alpha", fig1_opts.config.alpha, "coherent amplitude");
    fig1->add_option("--omega", fig1_opts.config.omega, "mode frequency");

    CLI::App* mom = app.add_subcommand(
        "momentum-linear",
        "conditional momentum variance against t for the momentum measurement "
        "in a linear potential");
    attach_common(mom, mom_opts);
    mom->add_option("--k", mom_opts.config.k, "measurement constant");
    mom->add_option("--force", mom_opts.config.force, "linear-potential force");
    mom->add_option("--mass", mom_opts.config.mass, "particle mass");

    CLI::App* ho = app.add_subcommand(
        "ho-position",
        "conditional position variance against omega t for the position-"
        "monitored oscillator; the final closed-form row is the steady state");
    attach_common(ho, ho_opts);
    ho->add_option("--r", ho_opts.config.r,
                   "frequency-to-measurement-rate ratio m w^2 / 2 hbar k");

    CLI::App* validate = app.add_subcommand(
        "validate", "run the full acceptance-criteria suite");
    validate->add_option("--format", validate_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    validate->add_option("--out", validate_out, "report file (default: stdout)");
    validate->add_option("--workers", validate_workers, "worker thread count");
    validate->add_option("--seed", validate_seed, "base RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (fig1->parsed()) {
            finalize(fig1_opts, "0:2:21", 128, 1e-3, 2000);
            emit(serialize(lqtraj::run_fig1(fig1_opts.config),
                           fig1_opts.config.format),
                 fig1_opts.config.output_path);
        } else if (mom->parsed()) {
            finalize(mom_opts, "0:1:11", 80, 1e-4, 50);
            emit(serialize(lqtraj::run_momentum_linear(mom_opts.config),
                           mom_opts.config.format),
                 mom_opts.config.output_path);
        } else if (ho->parsed()) {
            finalize(ho_opts, "0:5:21", 80, 2e-4, 4);
            emit(serialize(lqtraj::run_ho_position(ho_opts.config),
                           ho_opts.config.format),
                 ho_opts.config.output_path);
        } else if (validate->parsed()) {
            lqtraj::ValidationOptions opt;
            opt.workers = validate_workers < 1 ? 1 : validate_workers;
            opt.seed = validate_seed;
            const auto checks = lqtraj::run_validation(opt);
            bool all_pass = true;
            std::string text;
            for (const auto& c : checks) {
                all_pass = all_pass && c.pass;
                char line[192];
                std::snprintf(line, sizeof line,
                              "%-4s %-60s measured=%-12.4g tol=%-10.4g %s\n",
                              c.id.c_str(), c.name.c_str(), c.measured,
                              c.tolerance, c.pass ? "PASS" : "FAIL");
                text += line;
            }
            emit(validate_format == "json"
                     ? lqtraj::validation_report_json(checks)
                     : text,
                 validate_out);
            if (!all_pass) return kExitValidation;
        }
    } catch (const lqtraj::ArgumentError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lqtraj::TruncationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lqtraj::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
