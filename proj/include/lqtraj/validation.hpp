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
#include <string>
#include <vector>

#include "lqtraj/coherent.hpp"
#include "lqtraj/experiments.hpp"
#include "lqtraj/momentum.hpp"
#include "lqtraj/qnd.hpp"
#include "lqtraj/quadratic.hpp"

namespace lqtraj {

/// One validated quantity: pass iff measured <= tolerance.
struct CriterionCheck {
    std::string id;
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ValidationOptions {
    unsigned workers = 1;
    std::uint64_t seed = 20260810;
};

namespace validation_detail {

inline void add(std::vector<CriterionCheck>& out, std::string id, std::string name,
                double measured, double tolerance) {
    out.push_back({std::move(id), std::move(name), measured, tolerance,
                   measured <= tolerance});
}

inline double state_fidelity(const StateVector& a, const StateVector& b) {
    const Vector na = a.amplitudes / a.amplitudes.norm();
    const Vector nb = b.amplitudes / b.amplitudes.norm();
    return std::abs((na.adjoint() * nb)(0));
}

// --- criterion 1: Ito covariances and the joint density ------------------

inline void criterion_01(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    const std::size_t n_paths = 100000;
    const std::size_t steps = 2000;
    std::vector<double> w2(n_paths), y2(n_paths), wy(n_paths);
    parallel_for_indexed(n_paths, opt.workers, [&](std::size_t i) {
        const WienerPath p = sample_path(1.0, steps, derive_seed(opt.seed, i));
        const double w = p.total();
        const double y = ito_integral(p, [](double s) { return s; }).real();
        w2[i] = w * w;
        y2[i] = y * y;
        wy[i] = w * y;
    });
    const MeanStderr mw = mean_stderr(w2);
    const MeanStderr my = mean_stderr(y2);
    const MeanStderr mc = mean_stderr(wy);
    add(out, "01a", "sample <W^2> = 1 within 3 s.e.", std::abs(mw.mean - 1.0),
        3.0 * mw.stderr_of_mean);
    add(out, "01b", "sample <Y^2> = 1/3 within 3 s.e.",
        std::abs(my.mean - 1.0 / 3.0), 3.0 * my.stderr_of_mean);
    add(out, "01c", "sample <WY> = 1/2 within 3 s.e.", std::abs(mc.mean - 0.5),
        3.0 * mc.stderr_of_mean);

    const int n = 400;
    const double w_max = 8.0, y_max = 8.0 / std::sqrt(3.0);
    const double dw = 2.0 * w_max / n, dy = 2.0 * y_max / n;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = -w_max + (i + 0.5) * dw;
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            row += joint_density_WY(w, -y_max + (j + 0.5) * dy, 1.0);
        integral += row * dy * dw;
    }
    add(out, "01d", "joint density integrates to 1", std::abs(integral - 1.0), 1e-6);
}

// --- criterion 2: momentum law --------------------------------------------

inline void criterion_02(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    add(out, "02a", "conditional variance closed form at k=1/4, t=1",
        std::abs(conditional_momentum_variance(0.5, 0.25, 1.0) - 0.25), 1e-15);

    const FockSpace space(80);
    const LinearPotentialModel model(1.0, 0.0, 0.25);
    const LseModel lse = momentum_lse_model(model, space);
    const StateVector psi0 = coherent_state(0.0, space);
    const Matrix p = space.momentum();
    const std::size_t n_traj = 50;
    std::vector<double> vars(n_traj);
    parallel_for_indexed(n_traj, opt.workers, [&](std::size_t i) {
        const WienerPath path =
            sample_path(1.0, 10000, derive_seed(opt.seed + 2, i));
        vars[i] = variance(integrate_lse(lse, psi0, path).state, p);
    });
    double vmin = vars[0], vmax = vars[0], vsum = 0.0;
    for (double v : vars) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        vsum += v;
    }
    add(out, "02b", "SDE conditional variance matches 0.25 (1e-3 relative)",
        std::abs(vsum / n_traj - 0.25) / 0.25, 1e-3);
    add(out, "02c", "SDE conditional variance spread over 50 trajectories",
        vmax - vmin, 1e-3);

    const FockSpace mspace(48);
    const LinearPotentialModel fmodel(1.0, 0.5, 0.25);
    const MasterModel master = momentum_master_model(fmodel, mspace);
    const StateVector vac = coherent_state(0.0, mspace);
    const DensityMatrix rho0(mspace,
                             Matrix(vac.amplitudes * vac.amplitudes.adjoint()));
    const DensityMatrix rho = integrate_master(master, rho0, 1.0, 2500);
    const Matrix pm = mspace.momentum();
    add(out, "02d", "master equation <P>(t) = <P>(0) + F t",
        std::abs(expectation(rho, pm).real() - 0.5), 1e-6);
    add(out, "02e", "master equation sigma_p^2 stays at its initial value",
        std::abs(variance(rho, pm) - 0.5), 1e-6);
}

// --- criterion 3: QND Fig. 1 ----------------------------------------------

inline void criterion_03(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    const FockSpace space(128);
    const DensityMatrix thermal = thermal_state(4.0, space);
    const StateVector coherent = coherent_state(std::sqrt(20.0), space);
    std::vector<double> rho_th(128), rho_co(128);
    for (int n = 0; n < 128; ++n) {
        rho_th[n] = thermal.matrix(n, n).real();
        rho_co[n] = std::norm(coherent.amplitudes(n));
    }
    const double sqrt20 = std::sqrt(20.0);
    add(out, "03a", "thermal curve starts at sqrt(20)",
        std::abs(average_conditional_uncertainty_tau(rho_th, 0.0) - sqrt20), 1e-9);
    add(out, "03b", "coherent curve starts at sqrt(20)",
        std::abs(average_conditional_uncertainty_tau(rho_co, 0.0) - sqrt20), 1e-9);

    const std::vector<double> grid{0.0, 0.01, 0.02, 0.05, 0.1, 0.2,
                                   0.3, 0.5,  0.7,  1.0,  1.5, 2.0};
    double worst_monotone = 0.0;
    double worst_split = 0.0;
    double worst_order = 0.0;
    double prev_th = 1e300, prev_co = 1e300;
    for (double tau : grid) {
        const double th = average_conditional_uncertainty_tau(rho_th, tau, 64);
        const double co = average_conditional_uncertainty_tau(rho_co, tau, 64);
        worst_monotone = std::max({worst_monotone, th - prev_th, co - prev_co});
        prev_th = th;
        prev_co = co;
        if (tau >= 0.01 && tau <= 1.0)
            worst_split =
                std::max(worst_split, std::abs(th - co) / std::max(th, co));
        const double th128 = average_conditional_uncertainty_tau(rho_th, tau, 128);
        const double co128 = average_conditional_uncertainty_tau(rho_co, tau, 128);
        worst_order =
            std::max({worst_order, std::abs(th - th128), std::abs(co - co128)});
    }
    add(out, "03c", "curves are monotone non-increasing on [0, 2]",
        worst_monotone, 1e-9);
    add(out, "03d", "curves differ by < 20% on tau in [0.01, 1]", worst_split, 0.2);
    add(out, "03e", "quadrature orders 64 vs 128 agree", worst_order, 1e-8);

    const double tau_mc = 0.1;
    const QndModel qnd{1.0, 0.0, tau_mc};
    int idx = 0;
    for (const auto* rho : {&rho_th, &rho_co}) {
        const double quad = average_conditional_uncertainty_tau(*rho, tau_mc);
        const WeightedMcResult mc =
            qnd_mc_uncertainty(*rho, qnd, space, tau_mc, 10000, 50,
                               derive_seed(opt.seed + 3, idx), opt.workers);
        add(out, idx == 0 ? "03f" : "03g",
            std::string("weighted MC matches quadrature (") +
                (idx == 0 ? "thermal" : "coherent") + ")",
            std::abs(mc.value - quad), 3.0 * mc.std_error);
        ++idx;
    }
}

// --- criterion 4: measure normalization -----------------------------------

inline void criterion_04(std::vector<CriterionCheck>& out,
                         const ValidationOptions&) {
    const FockSpace space(128);
    const DensityMatrix thermal = thermal_state(4.0, space);
    const StateVector coherent = coherent_state(std::sqrt(20.0), space);
    std::vector<double> rho_th(128), rho_co(128);
    for (int n = 0; n < 128; ++n) {
        rho_th[n] = thermal.matrix(n, n).real();
        rho_co[n] = std::norm(coherent.amplitudes(n));
    }
    add(out, "04a", "total trajectory probability (thermal)",
        std::abs(qnd_total_probability(rho_th, 1.0, 0.5) - 1.0), 1e-8);
    add(out, "04b", "total trajectory probability (coherent)",
        std::abs(qnd_total_probability(rho_co, 1.0, 0.5) - 1.0), 1e-8);
}

// --- criterion 5: swap relation -------------------------------------------

inline void criterion_05(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    const HOPositionModel hom(1.0, 1.0, 0.5);
    add(out, "05a", "swap relation residual, oscillator model",
        swap_relation_check(hom.quadratic(), 0.2, 60), 1e-7);

    NormalSampler g(opt.seed + 5);
    const auto bounded = [&]() {
        return 0.5 * g.uniform01() *
               std::exp(Complex(0.0, 2.0 * M_PI * g.uniform01()));
    };
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const QuadraticModel model(bounded(), bounded(), bounded(), bounded(),
                                   bounded(), bounded(), bounded());
        const double eps = 0.05 + 0.15 * g.uniform01();
        worst = std::max(worst, swap_relation_check(model, eps, 60));
    }
    add(out, "05b", "swap relation residual, 20 seeded coefficient sets", worst,
        1e-7);
}

// --- criterion 6: evolution-operator equivalence ---------------------------

inline void criterion_06(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    const FockSpace space(80);
    const HOPositionModel hom(1.0, 1.0, 0.5); // r = 1
    const QuadraticModel model = hom.quadratic();
    const LseModel lse = hom.lse_model(space);
    const StateVector psi0 = coherent_state(1.0, space);
    const double t = 1.0;
    const std::size_t steps = 10000;
    const std::size_t n_paths = 20;
    const CoefficientTable table(model, t, steps);
    const Matrix eat = matrix_exponential(Matrix(t * model.a_matrix(space)));
    std::vector<double> infidelity(n_paths);
    parallel_for_indexed(n_paths, opt.workers, [&](std::size_t i) {
        const WienerPath path = sample_path(t, steps, derive_seed(opt.seed + 6, i));
        const TrajectoryFunctionals fn = trajectory_functionals(table, path);
        const Matrix lin =
            fn.X1 * space.position() + fn.X2 * space.momentum();
        const Vector closed = eat * (matrix_exponential(lin) * psi0.amplitudes);
        const LseResult sde = integrate_lse(lse, psi0, path);
        infidelity[i] =
            1.0 - state_fidelity(StateVector(space, closed), sde.state);
    });
    double worst = 0.0;
    for (double v : infidelity) worst = std::max(worst, v);
    add(out, "06a", "evolve_state vs integrate_lse fidelity, 20 seeded paths",
        worst, 1e-6);
}

// --- criterion 7: Belavkin-Staszewski variance -----------------------------

inline void criterion_07(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    struct Combo {
        double r, wt;
    };
    std::vector<Combo> combos;
    for (double r : {0.1, 1.0, 10.0})
        for (double wt : {0.5, 1.0, 2.0}) combos.push_back({r, wt});
    std::vector<double> rel_err(combos.size());
    parallel_for_indexed(combos.size(), opt.workers, [&](std::size_t i) {
        const HOPositionModel hom(1.0, 1.0, 1.0 / (2.0 * combos[i].r));
        const FockSpace space(80);
        const LseModel lse = hom.lse_model(space);
        const StateVector psi0 = coherent_state(0.0, space);
        const double t = combos[i].wt;
        const std::size_t steps =
            static_cast<std::size_t>(std::llround(t / 1e-4));
        const WienerPath path =
            sample_path(t, steps, derive_seed(opt.seed + 7, i));
        const double var_sde =
            variance(integrate_lse(lse, psi0, path).state, space.position());
        const double var_closed =
            ho_conditional_x_variance(ho_position_s2(hom, t));
        rel_err[i] = std::abs(var_sde - var_closed) / var_closed;
    });
    double worst = 0.0;
    for (double v : rel_err) worst = std::max(worst, v);
    add(out, "07a", "SDE vs closed-form x-variance over r x wt grid", worst, 1e-3);

    double worst_form = 0.0;
    for (double r : {0.1, 1.0, 10.0}) {
        const HOPositionModel hom(1.0, 1.0, 1.0 / (2.0 * r));
        for (double wt = 0.25; wt <= 5.0; wt += 0.25)
            worst_form = std::max(worst_form,
                                  std::abs(ho_position_s2(hom, wt) -
                                           ho_position_s2_lform(hom, wt)));
    }
    add(out, "07b", "l-based form equals the deltax form", worst_form, 1e-10);

    {
        const HOPositionModel hom(1.0, 1.0, 0.5);
        const FockSpace space(80);
        const LseModel lse = hom.lse_model(space);
        const StateVector psi0 = coherent_state(0.0, space);
        const double t = 20.0;
        const WienerPath path =
            sample_path(t, 100000, derive_seed(opt.seed + 7, 100));
        const double var_sde =
            variance(integrate_lse(lse, psi0, path).state, space.position());
        const double steady = ho_steady_state_variance(hom);
        add(out, "07c", "steady state 1/(4 s^2 Im z) matches the oracle at wt=20",
            std::abs(var_sde - steady) / steady, 1e-2);
        const Complex limit = -Complex(0.0, 1.0) * hom.s2() * hom.z();
        add(out, "07d", "deltax form reaches -i s^2 z at wt=20",
            std::abs(ho_position_s2(hom, t) - limit), 1e-6);
    }
}

// --- criterion 8: Appendix B identities ------------------------------------

inline void criterion_08(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    const FockSpace space(50);
    NormalSampler g(opt.seed + 8);
    const auto bounded = [&](double scale) {
        return scale * g.uniform01() *
               std::exp(Complex(0.0, 2.0 * M_PI * g.uniform01()));
    };
    double worst_linear = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Complex nu = bounded(0.3), mu = bounded(0.3), alpha = bounded(0.8);
        const LinearExponential le(nu, mu, space);
        const LinearShiftResult r = apply_linear_exponential(le, alpha);
        const Matrix op = nu * space.momentum() + mu * space.position();
        const Vector direct =
            matrix_exponential(op) * coherent_state(alpha, space).amplitudes;
        const Vector closed = std::exp(r.log_norm) *
                              coherent_state(r.alpha_out, space).amplitudes;
        worst_linear = std::max(worst_linear, (direct - closed).norm());
    }
    add(out, "08a", "linear-shift closed form vs dim-50 matrix oracle",
        worst_linear, 1e-8);

    const Matrix a = space.annihilation();
    const Matrix adag = space.creation();
    double worst_quad = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Complex u = bounded(0.3), v = bounded(0.3), w = bounded(0.3);
        const DisentangledQuadratic dq = disentangle_quadratic(u, v, w);
        const Matrix lhs = matrix_exponential(
            Matrix(u * a * a + v * adag * adag + w * adag * a));
        const Matrix rhs = std::exp(dq.prefactor_log()) *
                           matrix_exponential(Matrix(dq.l * adag * adag)) *
                           matrix_exponential(Matrix(dq.chi * space.number())) *
                           matrix_exponential(Matrix(dq.m_coef * a * a));
        const double dn =
            (lhs - rhs).block(0, 0, 12, 12).jacobiSvd().singularValues()(0);
        const double rn = rhs.block(0, 0, 12, 12).jacobiSvd().singularValues()(0);
        worst_quad = std::max(worst_quad, dn / rn);
    }
    add(out, "08b", "disentangling theorem vs dim-50 matrix oracle", worst_quad,
        1e-8);

    const Complex alpha(0.8, 0.3);
    const GaussianWavefunction wf =
        apply_quadratic_exponential(0.0, 0.0, 0.0, alpha, space);
    const double id_err = std::max(
        {std::abs(wf.s2prime - 0.5),
         std::abs(wf.lin - 2.0 * std::sqrt(0.5) * alpha),
         std::abs(wf.log_norm + 0.5 * (std::norm(alpha) + alpha * alpha))});
    add(out, "08c", "eta = zeta = xi = 0 reduces to <x|alpha>", id_err, 1e-14);
}

// --- criterion 9: Z affects only the normalization -------------------------

inline void criterion_09(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    const FockSpace space(60);
    const HOPositionModel hom(1.0, 1.0, 0.5);
    const QuadraticModel model = hom.quadratic();
    const StateVector psi0 = coherent_state(0.8, space);
    const double t = 0.7;
    const CoefficientTable table(model, t, 500);
    double worst = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        const WienerPath path = sample_path(t, 500, derive_seed(opt.seed + 9, i));
        TrajectoryFunctionals fn = trajectory_functionals(table, path);
        const StateVector with_z = evolve_state(model, psi0, t, fn);
        fn.Z = Complex(0.0, 0.0);
        const StateVector without_z = evolve_state(model, psi0, t, fn);
        worst = std::max(worst, 1.0 - state_fidelity(with_z, without_z));
    }
    add(out, "09a", "normalized state is invariant under Z -> 0", worst, 1e-12);
}

// --- criterion 10: Gaussian closure and trajectory independence ------------

inline void criterion_10(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    const FockSpace space(80);
    const HOPositionModel hom(1.0, 1.0, 0.5);
    const QuadraticModel model = hom.quadratic();
    const StateVector psi0 = coherent_state(0.7, space);
    const double t = 1.0;
    const Matrix q = space.position();

    {
        const WienerPath path = sample_path(t, 800, derive_seed(opt.seed + 10, 0));
        const TrajectoryFunctionals fn = trajectory_functionals(model, path);
        const StateVector out_state = evolve_state(model, psi0, t, fn);
        const double mu = expectation(out_state, q).real();
        const Matrix qc = q - mu * space.identity();
        const Matrix qc2 = qc * qc;
        const double m2 = expectation(out_state, qc2).real();
        const double m4 = expectation(out_state, Matrix(qc2 * qc2)).real();
        add(out, "10a", "fourth position cumulant of the evolved state",
            std::abs(m4 - 3.0 * m2 * m2), 1e-6);
    }

    const std::size_t n_paths = 100;
    const std::size_t steps = 400;
    const CoefficientTable table(model, t, steps);
    const Matrix eat = matrix_exponential(Matrix(t * model.a_matrix(space)));
    std::vector<double> closed_vars(n_paths);
    parallel_for_indexed(n_paths, opt.workers, [&](std::size_t i) {
        const WienerPath path =
            sample_path(t, steps, derive_seed(opt.seed + 11, i));
        const TrajectoryFunctionals fn = trajectory_functionals(table, path);
        const Matrix lin = fn.X1 * space.position() + fn.X2 * space.momentum();
        const Vector amp = eat * (matrix_exponential(lin) * psi0.amplitudes);
        closed_vars[i] = variance(StateVector(space, amp), q);
    });
    double cmin = closed_vars[0], cmax = closed_vars[0];
    for (double v : closed_vars) {
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
    }
    add(out, "10b", "closed-form x-variance spread over 100 paths", cmax - cmin,
        1e-10);

    const LseModel lse = hom.lse_model(space);
    std::vector<double> sde_vars(n_paths);
    parallel_for_indexed(n_paths, opt.workers, [&](std::size_t i) {
        const WienerPath path =
            sample_path(t, 5000, derive_seed(opt.seed + 11, i));
        sde_vars[i] = variance(integrate_lse(lse, psi0, path).state, q);
    });
    double smin = sde_vars[0], smax = sde_vars[0];
    for (double v : sde_vars) {
        smin = std::min(smin, v);
        smax = std::max(smax, v);
    }
    add(out, "10c", "SDE x-variance spread over 100 paths", smax - smin, 1e-3);
}

// --- criterion 11: reproducibility across worker counts --------------------

inline void criterion_11(std::vector<CriterionCheck>& out,
                         const ValidationOptions& opt) {
    ExperimentConfig fig1;
    fig1.seed = opt.seed + 12;
    fig1.trajectories = 200;
    fig1.dim = 128;
    fig1.dt = 2e-3;
    fig1.grid = {0.0, 0.05, 0.1};
    fig1.oracle = true;
    ExperimentConfig ho;
    ho.seed = opt.seed + 13;
    ho.trajectories = 4;
    ho.dim = 64;
    ho.dt = 2e-3;
    ho.grid = {0.5, 1.0};
    ho.r = 1.0;
    ho.oracle = true;

    fig1.workers = 1;
    const std::string fig1_one = write_csv(run_fig1(fig1));
    fig1.workers = 8;
    const std::string fig1_eight = write_csv(run_fig1(fig1));
    add(out, "11a", "run_fig1 output is byte-identical for 1 and 8 workers",
        fig1_one == fig1_eight ? 0.0 : 1.0, 0.0);

    ho.workers = 1;
    const std::string ho_one = write_csv(run_ho_position(ho));
    ho.workers = 8;
    const std::string ho_eight = write_csv(run_ho_position(ho));
    add(out, "11b", "run_ho_position output is byte-identical for 1 and 8 workers",
        ho_one == ho_eight ? 0.0 : 1.0, 0.0);
}

} // namespace validation_detail

/// Runs every acceptance criterion at its stated tolerance. Stable-ordered
/// by criterion id.
inline std::vector<CriterionCheck> run_validation(const ValidationOptions& opt) {
    std::vector<CriterionCheck> out;
    validation_detail::criterion_01(out, opt);
    validation_detail::criterion_02(out, opt);
    validation_detail::criterion_03(out, opt);
    validation_detail::criterion_04(out, opt);
    validation_detail::criterion_05(out, opt);
    validation_detail::criterion_06(out, opt);
    validation_detail::criterion_07(out, opt);
    validation_detail::criterion_08(out, opt);
    validation_detail::criterion_09(out, opt);
    validation_detail::criterion_10(out, opt);
    validation_detail::criterion_11(out, opt);
    return out;
}

inline std::string validation_report_json(const std::vector<CriterionCheck>& checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json obj;
        obj["id"] = c.id;
        obj["name"] = c.name;
        obj["measured"] = c.measured;
        obj["tolerance"] = c.tolerance;
        obj["pass"] = c.pass;
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

} // namespace lqtraj
