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

#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqtraj/momentum.hpp"
#include "lqtraj/qnd.hpp"
#include "lqtraj/quadratic.hpp"

namespace lqtraj {

enum class Method { ClosedForm, Quadrature, MonteCarlo, MasterEq };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::ClosedForm: return "closed-form";
        case Method::Quadrature: return "quadrature";
        case Method::MonteCarlo: return "monte-carlo";
        case Method::MasterEq: return "master-eq";
    }
    return "?";
}

/// One output point. stderr is present iff the method is monte-carlo.
struct CurveRecord {
    double abscissa = 0.0;
    double value = 0.0;
    std::optional<double> std_error;
    Method method = Method::ClosedForm;
};

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t trajectories = 1000;
    int dim = 128;
    double dt = 1e-3;
    std::vector<double> grid;
    std::string output_path; // empty: stdout
    OutputFormat format = OutputFormat::Csv;
    bool oracle = false;
    unsigned workers = 1;
    // model parameters
    double k = 1.0;
    double r = 1.0;
    double omega = 0.0; // QND mode frequency
    double mass = 1.0;
    double force = 0.5;
    double nbar = 4.0;
    double alpha = 4.47213595499957939; // sqrt(20)

    void validate() const {
        if (grid.empty()) throw ArgumentError("config: empty grid");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (grid[i] <= grid[i - 1])
                throw ArgumentError("config: grid must be strictly increasing");
        if (trajectories < 1) throw ArgumentError("config: trajectories must be >= 1");
        if (dim < 2) throw ArgumentError("config: dim must be >= 2");
        if (dt <= 0) throw ArgumentError("config: dt must be positive");
    }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string write_csv(const std::vector<CurveRecord>& records) {
    std::string out = "abscissa,value,stderr,method\n";
    for (const auto& rec : records) {
        out += detail::format_double(rec.abscissa);
        out += ',';
        out += detail::format_double(rec.value);
        out += ',';
        if (rec.std_error) out += detail::format_double(*rec.std_error);
        out += ',';
        out += method_name(rec.method);
        out += '\n';
    }
    return out;
}

inline std::string write_json(const std::vector<CurveRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records) {
        nlohmann::json obj;
        obj["abscissa"] = rec.abscissa;
        obj["value"] = rec.value;
        if (rec.std_error) obj["stderr"] = *rec.std_error;
        obj["method"] = method_name(rec.method);
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

inline std::string serialize(const std::vector<CurveRecord>& records,
                             OutputFormat format) {
    return format == OutputFormat::Csv ? write_csv(records) : write_json(records);
}

/// Fig.-1 reproduction: <sigma_n(tau)> for the thermal (nbar) and coherent
/// (alpha) initial states. Per abscissa the thermal record comes first,
/// then the coherent one; with the oracle enabled their Monte Carlo
/// cross-checks follow in the same order.
inline std::vector<CurveRecord> run_fig1(const ExperimentConfig& config) {
    config.validate();
    if (config.grid.front() < 0.0)
        throw ArgumentError("run_fig1: tau must be >= 0");
    const FockSpace space(config.dim);
    const DensityMatrix thermal = thermal_state(config.nbar, space);
    const StateVector coherent = coherent_state(config.alpha, space);
    std::vector<double> rho_thermal(config.dim), rho_coherent(config.dim);
    for (int n = 0; n < config.dim; ++n) {
        rho_thermal[n] = thermal.matrix(n, n).real();
        rho_coherent[n] = std::norm(coherent.amplitudes(n));
    }
    const std::vector<std::vector<double>*> states{&rho_thermal, &rho_coherent};

    std::vector<CurveRecord> records;
    for (std::size_t ig = 0; ig < config.grid.size(); ++ig) {
        const double tau = config.grid[ig];
        for (const auto* rho : states)
            records.push_back({tau, average_conditional_uncertainty_tau(*rho, tau),
                               std::nullopt, Method::Quadrature});
        if (!config.oracle) continue;
        for (std::size_t is = 0; is < states.size(); ++is) {
            const auto* rho = states[is];
            if (tau == 0.0) {
                records.push_back({tau, average_conditional_uncertainty_tau(*rho, 0.0),
                                   0.0, Method::MonteCarlo});
                continue;
            }
            const std::size_t steps =
                std::max<std::size_t>(10, static_cast<std::size_t>(
                                              std::llround(tau / config.dt)));
            const QndModel qnd{1.0, config.omega, tau};
            const WeightedMcResult mc = qnd_mc_uncertainty(
                *rho, qnd, space, tau, config.trajectories, steps,
                derive_seed(config.seed, 1000 * ig + is), config.workers);
            records.push_back({tau, mc.value, mc.std_error, Method::MonteCarlo});
        }
    }
    return records;
}

/// Conditional position variance of the monitored oscillator against
/// omega t, the closed form plus (oracle) SDE points with error bars and
/// one trailing closed-form record for the steady state, placed past the
/// end of the grid.
inline std::vector<CurveRecord> run_ho_position(const ExperimentConfig& config) {
    config.validate();
    if (config.r <= 0) throw ArgumentError("run_ho_position: r must be positive");
    const HOPositionModel hom(config.mass, 1.0, 1.0 / (2.0 * config.r));
    const FockSpace space(config.dim);
    std::vector<CurveRecord> records;
    for (std::size_t ig = 0; ig < config.grid.size(); ++ig) {
        const double wt = config.grid[ig];
        if (wt < 0.0) throw ArgumentError("run_ho_position: omega t must be >= 0");
        records.push_back({wt,
                           ho_conditional_x_variance(ho_position_s2(hom, wt)),
                           std::nullopt, Method::ClosedForm});
        if (!config.oracle || wt == 0.0) continue;
        const std::size_t steps = std::max<std::size_t>(
            10, static_cast<std::size_t>(std::llround(wt / config.dt)));
        const LseModel lse = hom.lse_model(space);
        const StateVector psi0 = coherent_state(0.0, space);
        const Matrix q = space.position();
        std::vector<double> vars(config.trajectories);
        parallel_for_indexed(config.trajectories, config.workers, [&](std::size_t i) {
            const WienerPath path = sample_path(
                wt, steps, derive_seed(config.seed, 4000 * ig + i));
            vars[i] = variance(integrate_lse(lse, psi0, path).state, q);
        });
        const MeanStderr ms = mean_stderr(vars);
        records.push_back({wt, ms.mean, ms.stderr_of_mean, Method::MonteCarlo});
    }
    const double asymptote_at = std::max(20.0, 4.0 * config.grid.back());
    records.push_back({asymptote_at, ho_steady_state_variance(hom), std::nullopt,
                       Method::ClosedForm});
    return records;
}

/// Conditional momentum variance of the measured free/forced particle
/// against t: closed form, (oracle) SDE points, and master-equation
/// sigma_p^2 (which stays at the initial value).
inline std::vector<CurveRecord> run_momentum_linear(const ExperimentConfig& config) {
    config.validate();
    const LinearPotentialModel model(config.mass, config.force, config.k);
    const GaussianMomentumState s0 = gaussian_ground_state(config.mass, 1.0);
    const FockSpace space(config.dim);
    std::vector<CurveRecord> records;
    for (std::size_t ig = 0; ig < config.grid.size(); ++ig) {
        const double t = config.grid[ig];
        if (t < 0.0) throw ArgumentError("run_momentum_linear: t must be >= 0");
        records.push_back({t,
                           conditional_momentum_variance(s0.var_p(), config.k, t),
                           std::nullopt, Method::ClosedForm});
        if (!config.oracle || t == 0.0) continue;
        const std::size_t steps = std::max<std::size_t>(
            10, static_cast<std::size_t>(std::llround(t / config.dt)));
        const LseModel lse = momentum_lse_model(model, space);
        const StateVector psi0 = coherent_state(0.0, space);
        const Matrix p = space.momentum();
        std::vector<double> vars(config.trajectories);
        parallel_for_indexed(config.trajectories, config.workers, [&](std::size_t i) {
            const WienerPath path =
                sample_path(t, steps, derive_seed(config.seed, 4000 * ig + i));
            vars[i] = variance(integrate_lse(lse, psi0, path).state, p);
        });
        const MeanStderr ms = mean_stderr(vars);
        records.push_back({t, ms.mean, ms.stderr_of_mean, Method::MonteCarlo});

        const MasterModel master = momentum_master_model(model, space);
        const StateVector vac = coherent_state(0.0, space);
        const DensityMatrix rho0(space,
                                 Matrix(vac.amplitudes * vac.amplitudes.adjoint()));
        const DensityMatrix rho = integrate_master(master, rho0, t, steps);
        records.push_back({t, variance(rho, p), std::nullopt, Method::MasterEq});
    }
    return records;
}

} // namespace lqtraj
