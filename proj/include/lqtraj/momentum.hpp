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

#include <cmath>
#include <complex>

#include "lqtraj/fock.hpp"
#include "lqtraj/lse.hpp"
#include "lqtraj/rng.hpp"

namespace lqtraj {

/// Continuous momentum measurement of a particle in a linear potential:
///   H = P^2/2m - F Q,
///   A = (-i/2 hbar m - 2k) P^2 + (iF/hbar) Q,  B = sqrt(2k) P.
/// [A, B] is a scalar, so the trajectory enters only through W and
/// Y = int t' dW.
struct LinearPotentialModel {
    double mass = 1.0;
    double force = 0.0;
    double k = 1.0; // measurement constant
    double hbar = 1.0;

    LinearPotentialModel(double mass_, double force_, double k_, double hbar_ = 1.0)
        : mass(mass_), force(force_), k(k_), hbar(hbar_) {
        if (mass <= 0 || k <= 0 || hbar <= 0)
            throw ArgumentError("LinearPotentialModel: mass, k, hbar must be positive");
    }

    /// eta = i/(2 hbar m) + 2k; the propagator factor is exp(eta (-P^2 t - ...)).
    Complex eta() const { return Complex(2.0 * k, 1.0 / (2.0 * hbar * mass)); }
};

/// Momentum-representation Gaussian, psi(p) = exp(c2 p^2 + c1 p + c0).
/// quad_coeff = c2, lin_coeff = c1, log_norm = c0.
struct GaussianMomentumState {
    Complex quad_coeff{-0.5, 0.0};
    Complex lin_coeff{0.0, 0.0};
    Complex log_norm{0.0, 0.0};
    double hbar = 1.0;

    double var_p() const {
        const double re = quad_coeff.real();
        if (re >= 0.0)
            throw NumericalError("GaussianMomentumState: non-normalizable (Re c2 >= 0)");
        return -1.0 / (4.0 * re);
    }

    double mean_p() const {
        return -lin_coeff.real() / (2.0 * quad_coeff.real());
    }

    /// <Q> of the same wavefunction (Q = i hbar d/dp in this representation).
    double mean_q() const {
        return -hbar * (2.0 * quad_coeff.imag() * mean_p() + lin_coeff.imag());
    }

    /// norm^2 = int |psi|^2 dp, for trajectory weights.
    double log_weight() const {
        const double a = -2.0 * quad_coeff.real();
        const double b = 2.0 * lin_coeff.real();
        return 2.0 * log_norm.real() + 0.5 * std::log(M_PI / a) + b * b / (4.0 * a);
    }
};

/// Ground state of a harmonic oscillator of frequency omega:
/// var_p = m hbar w / 2.
inline GaussianMomentumState gaussian_ground_state(double mass, double omega,
                                                   double hbar = 1.0) {
    GaussianMomentumState s;
    s.hbar = hbar;
    s.quad_coeff = Complex(-1.0 / (2.0 * mass * hbar * omega), 0.0);
    s.lin_coeff = Complex(0.0, 0.0);
    s.log_norm = Complex(-0.25 * std::log(M_PI * mass * hbar * omega), 0.0);
    return s;
}

/// Applies the disentangled propagator
///   exp(iFQt/hbar) exp(eta(-P^2 t - P F t^2 - F^2 t^3/3)) exp(sqrt(2k)(P W + F Y))
/// to a momentum-space Gaussian. The two right factors are multiplicative
/// in p; the left factor translates p -> p - F t and is applied last.
inline GaussianMomentumState propagate_gaussian(const LinearPotentialModel& model,
                                                const GaussianMomentumState& state0,
                                                double t, double w, double y) {
    if (state0.quad_coeff.real() >= 0.0)
        throw ArgumentError("propagate_gaussian: input is not a normalizable Gaussian");
    if (t < 0.0) throw ArgumentError("propagate_gaussian: t must be >= 0");
    const Complex eta = model.eta();
    const double f = model.force;
    const double sq2k = std::sqrt(2.0 * model.k);
    Complex c2 = state0.quad_coeff - eta * t;
    Complex c1 = state0.lin_coeff - eta * f * t * t + sq2k * w;
    Complex c0 = state0.log_norm - eta * f * f * t * t * t / 3.0 + sq2k * f * y;
    // p -> p - F t
    const double shift = f * t;
    c0 += c2 * shift * shift - c1 * shift;
    c1 -= 2.0 * c2 * shift;
    GaussianMomentumState out;
    out.hbar = state0.hbar;
    out.quad_coeff = c2;
    out.lin_coeff = c1;
    out.log_norm = c0;
    return out;
}

/// <sigma_p^2(t)_w> = sigma_p^2(0) / (1 + 8 k sigma_p^2(0) t),
/// independent of W and Y.
inline double conditional_momentum_variance(double var_p0, double k, double t) {
    if (var_p0 <= 0) throw ArgumentError("conditional_momentum_variance: var_p0 > 0 required");
    if (k <= 0) throw ArgumentError("conditional_momentum_variance: k > 0 required");
    if (t < 0) throw ArgumentError("conditional_momentum_variance: t >= 0 required");
    return var_p0 / (1.0 + 8.0 * k * var_p0 * t);
}

/// Trajectory-averaged moments: <p(t)^n> = <(p(0) + F t)^n>, n in 1..4,
/// Gaussian closure supplying the initial moments.
inline double averaged_momentum_moment(const GaussianMomentumState& state0,
                                       double force, double t, int n) {
    const double m = state0.mean_p() + force * t;
    const double v = state0.var_p();
    switch (n) {
        case 1: return m;
        case 2: return m * m + v;
        case 3: return m * m * m + 3.0 * m * v;
        case 4: return m * m * m * m + 6.0 * m * m * v + 3.0 * v * v;
        default:
            throw ArgumentError("averaged_momentum_moment: n must be in 1..4");
    }
}

inline LseModel momentum_lse_model(const LinearPotentialModel& model,
                                   const FockSpace& space) {
    const Matrix p = space.momentum();
    const Matrix q = space.position();
    const Matrix h = p * p / (2.0 * model.mass) - model.force * q;
    const Matrix a_tilde =
        Complex(0.0, -1.0 / space.hbar()) * h - model.k * p * p;
    const Matrix b = std::sqrt(2.0 * model.k) * p;
    return LseModel(OperatorMatrix(space, a_tilde), OperatorMatrix(space, b));
}

inline MasterModel momentum_master_model(const LinearPotentialModel& model,
                                         const FockSpace& space) {
    const Matrix p = space.momentum();
    const Matrix q = space.position();
    const Matrix h = p * p / (2.0 * model.mass) - model.force * q;
    std::vector<OperatorMatrix> ops;
    ops.emplace_back(space, Matrix(std::sqrt(model.k) * p));
    return MasterModel(OperatorMatrix(space, h), std::move(ops));
}

/// Draws (W(t), Y(t)) from their exact joint Gaussian law via the
/// Cholesky factor of covariance_WY(t).
inline std::pair<double, double> sample_wy(double t, NormalSampler& normal) {
    const double g1 = normal();
    const double g2 = normal();
    const double w = std::sqrt(t) * g1;
    const double t32 = std::pow(t, 1.5);
    const double y = 0.5 * t32 * g1 + t32 / std::sqrt(12.0) * g2;
    return {w, y};
}

} // namespace lqtraj
