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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lqtraj/fock.hpp"
#include "lqtraj/util.hpp"
#include "lqtraj/wiener.hpp"

namespace lqtraj {

/// d|psi> = (A~ dt + B dW)|psi>, stepped as the split product
/// e^{A dt} e^{B dW} with A = A~ - B^2/2. The splitting mirrors the
/// product construction whose closed forms this library implements.
struct LseModel {
    OperatorMatrix a_tilde;
    OperatorMatrix b;
    Matrix a; // A = A~ - B^2/2, cached

    LseModel(OperatorMatrix a_tilde_, OperatorMatrix b_)
        : a_tilde(std::move(a_tilde_)), b(std::move(b_)),
          a(a_tilde.matrix - 0.5 * b.matrix * b.matrix) {
        if (!(a_tilde.space == b.space))
            throw ArgumentError("LseModel: operator spaces differ");
    }
};

/// rho' = -(i/hbar)[H, rho] + sum_n (2 O_n rho O_n+ - O_n+ O_n rho - rho O_n+ O_n)
struct MasterModel {
    OperatorMatrix hamiltonian;
    std::vector<OperatorMatrix> lindblads;

    MasterModel(OperatorMatrix h, std::vector<OperatorMatrix> ops)
        : hamiltonian(std::move(h)), lindblads(std::move(ops)) {
        if ((hamiltonian.matrix - hamiltonian.matrix.adjoint()).norm() > 1e-12)
            throw ArgumentError("MasterModel: H is not Hermitian");
        for (const auto& op : lindblads)
            if (!(op.space == hamiltonian.space))
                throw ArgumentError("MasterModel: operator spaces differ");
    }
};

/// Unnormalized trajectory endpoint as a (unit state, log-norm) pair.
/// Keeping the log separate prevents under/overflow on long runs.
struct LseResult {
    StateVector state; // unit norm
    double log_norm = 0.0;
    bool dt_guideline_exceeded = false; // ||A|| dt > 0.1 warning flag

    double weight() const { return std::exp(2.0 * log_norm); } // <psi|psi>

    StateVector unnormalized() const {
        return StateVector(state.space, std::exp(log_norm) * state.amplitudes);
    }
};

namespace detail {

/// Per-(model, dt) precomputation: e^{A dt} and the eigensystem of B.
/// All paper models have Hermitian B, which keeps e^{B dW} a two-rotation
/// diagonal scaling. Diagonal models reduce each step to an elementwise
/// multiply.
struct LseStepper {
    bool diagonal = false;
    Vector ead_diag;        // diagonal fast path
    Vector b_diag;
    Matrix ead;             // dense path
    Matrix u;               // B = u diag(beig) u^-1
    Matrix u_inv;
    Vector beig;
    bool dt_flag = false;

    LseStepper(const LseModel& model, double dt) {
        const Matrix& a = model.a;
        const Matrix& b = model.b.matrix;
        dt_flag = a.norm() * dt > 0.1;
        const bool a_diag = (a - Matrix(a.diagonal().asDiagonal())).norm() == 0.0;
        const bool b_is_diag = (b - Matrix(b.diagonal().asDiagonal())).norm() == 0.0;
        if (a_diag && b_is_diag) {
            diagonal = true;
            ead_diag = (a.diagonal() * dt).array().exp();
            b_diag = b.diagonal();
            return;
        }
        ead = (a * dt).exp();
        if ((b - b.adjoint()).norm() < 1e-12 * std::max(1.0, b.norm())) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(b);
            u = es.eigenvectors();
            u_inv = u.adjoint();
            beig = es.eigenvalues().cast<Complex>();
        } else {
            Eigen::ComplexEigenSolver<Matrix> es(b);
            u = es.eigenvectors();
            u_inv = u.inverse();
            beig = es.eigenvalues();
        }
    }

    void step(Vector& psi, double dw) const {
        if (diagonal) {
            psi.array() *= ead_diag.array() * (b_diag * dw).array().exp();
            return;
        }
        psi = ead * psi;
        Vector w = u_inv * psi;
        w.array() *= (beig * dw).array().exp();
        psi = u * w;
    }
};

} // namespace detail

/// Integrates the LSE along one sampled path. The state is renormalized
/// every step with the log-norm accumulated separately.
inline LseResult integrate_lse(const LseModel& model, const StateVector& psi0,
                               const WienerPath& path) {
    if (!(psi0.space == model.a_tilde.space))
        throw ArgumentError("integrate_lse: state space != model space");
    const detail::LseStepper stepper(model, path.dt);
    Vector psi = psi0.amplitudes;
    double log_norm = 0.0;
    {
        const double n0 = psi.norm();
        if (n0 == 0.0) throw DegenerateStateError("integrate_lse: zero-norm input");
        psi /= n0;
        log_norm = std::log(n0);
    }
    for (double dw : path.increments) {
        stepper.step(psi, dw);
        const double n = psi.norm();
        if (n == 0.0 || !std::isfinite(n))
            throw NumericalError("integrate_lse: state norm degenerated");
        psi /= n;
        log_norm += std::log(n);
    }
    LseResult result{StateVector(psi0.space, std::move(psi)), log_norm,
                     stepper.dt_flag};
    return result;
}

/// Classical fourth-order Runge-Kutta for the master equation, Hermiticity
/// enforced by symmetrization each step.
inline DensityMatrix integrate_master(const MasterModel& model,
                                      const DensityMatrix& rho0, double t,
                                      std::size_t steps) {
    if (t <= 0.0) throw ArgumentError("integrate_master: t must be positive");
    if (steps < 1) throw ArgumentError("integrate_master: steps must be >= 1");
    if (!(rho0.space == model.hamiltonian.space))
        throw ArgumentError("integrate_master: state space != model space");
    const double hbar = rho0.space.hbar();
    const Matrix& h = model.hamiltonian.matrix;
    std::vector<Matrix> ops, opdag, opdagop;
    for (const auto& op : model.lindblads) {
        ops.push_back(op.matrix);
        opdag.push_back(op.matrix.adjoint());
        opdagop.push_back(opdag.back() * op.matrix);
    }
    const Complex mi_over_hbar(0.0, -1.0 / hbar);
    const auto rhs = [&](const Matrix& rho) {
        Matrix d = mi_over_hbar * (h * rho - rho * h);
        for (std::size_t n = 0; n < ops.size(); ++n) {
            d += 2.0 * (ops[n] * rho * opdag[n]);
            d -= opdagop[n] * rho + rho * opdagop[n];
        }
        return d;
    };
    Matrix rho = rho0.matrix;
    const double initial_trace = rho.trace().real();
    const double dt = t / static_cast<double>(steps);
    for (std::size_t n = 0; n < steps; ++n) {
        const Matrix k1 = rhs(rho);
        const Matrix k2 = rhs(rho + 0.5 * dt * k1);
        const Matrix k3 = rhs(rho + 0.5 * dt * k2);
        const Matrix k4 = rhs(rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint().eval());
    }
    const double drift = std::abs(rho.trace().real() - initial_trace);
    if (drift > 1e-9 * std::max(1.0, std::abs(initial_trace)))
        throw NumericalError("integrate_master: trace drift " +
                             std::to_string(drift) + "; use a smaller step");
    return DensityMatrix(rho0.space, std::move(rho));
}

/// Monte Carlo estimate of Eq.-(5)-style averages: mean over trajectories
/// of the unnormalized <psi|O|psi>. Pairwise-summed, so the result is
/// independent of worker scheduling.
inline Complex ensemble_average(const Matrix& op,
                                std::span<const StateVector> states) {
    if (states.empty()) throw ArgumentError("ensemble_average: empty ensemble");
    std::vector<Complex> vals(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        vals[i] = (states[i].amplitudes.adjoint() * (op * states[i].amplitudes))(0);
    return pairwise_sum<Complex>(vals) / static_cast<double>(states.size());
}

inline Complex ensemble_average(const Matrix& op,
                                std::span<const LseResult> trajectories) {
    if (trajectories.empty()) throw ArgumentError("ensemble_average: empty ensemble");
    std::vector<Complex> vals(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& tr = trajectories[i];
        vals[i] = tr.weight() *
                  (tr.state.amplitudes.adjoint() * (op * tr.state.amplitudes))(0);
    }
    return pairwise_sum<Complex>(vals) / static_cast<double>(trajectories.size());
}

/// Norm-weighted average of the conditional (normalized) expectations:
/// sum w_i <O>_i / sum w_i with w_i = <psi_i|psi_i>.
inline Complex weighted_conditional_average(const Matrix& op,
                                            std::span<const LseResult> trajectories) {
    if (trajectories.empty())
        throw ArgumentError("weighted_conditional_average: empty ensemble");
    std::vector<Complex> num(trajectories.size());
    std::vector<double> den(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& tr = trajectories[i];
        den[i] = tr.weight();
        num[i] = den[i] * (tr.state.amplitudes.adjoint() *
                           (op * tr.state.amplitudes))(0);
    }
    return pairwise_sum<Complex>(num) / pairwise_sum<double>(den);
}

/// Runs `n_traj` independent trajectories (seeds derived per index) and
/// reduces each endpoint through `extract`. Deterministic for a fixed
/// base seed regardless of the worker count.
template <typename Extract>
auto run_lse_ensemble(const LseModel& model, const StateVector& psi0, double t,
                      std::size_t steps, std::size_t n_traj,
                      std::uint64_t base_seed, unsigned workers,
                      Extract&& extract)
    -> std::vector<decltype(extract(std::declval<const LseResult&>()))> {
    using R = decltype(extract(std::declval<const LseResult&>()));
    std::vector<R> out(n_traj);
    parallel_for_indexed(n_traj, workers, [&](std::size_t i) {
        const WienerPath path = sample_path(t, steps, derive_seed(base_seed, i));
        out[i] = extract(integrate_lse(model, psi0, path));
    });
    return out;
}

} // namespace lqtraj
