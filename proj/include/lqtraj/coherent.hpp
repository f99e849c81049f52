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

namespace lqtraj {

/// e^{nu P + mu Q} rewritten as e^{theta a + phi a+}:
///   theta = mu sqrt(hbar/2mw) - i nu sqrt(m hbar w/2),
///   phi   = mu sqrt(hbar/2mw) + i nu sqrt(m hbar w/2),
/// so phi = conj(theta) for real nu, mu.
struct LinearExponential {
    Complex nu{0.0, 0.0};
    Complex mu{0.0, 0.0};
    Complex theta{0.0, 0.0};
    Complex phi{0.0, 0.0};

    LinearExponential(Complex nu_, Complex mu_, const FockSpace& space)
        : nu(nu_), mu(mu_) {
        const double cq = std::sqrt(space.hbar() / (2.0 * space.mass() * space.omega()));
        const double cp = std::sqrt(space.mass() * space.hbar() * space.omega() / 2.0);
        theta = mu * cq - Complex(0.0, 1.0) * nu * cp;
        phi = mu * cq + Complex(0.0, 1.0) * nu * cp;
    }

    /// Directly from (theta, phi); for abstract checks.
    static LinearExponential from_theta_phi(Complex theta, Complex phi) {
        LinearExponential le;
        le.theta = theta;
        le.phi = phi;
        return le;
    }

private:
    LinearExponential() = default;
};

/// e^{theta a + phi a+}|alpha> = |alpha + phi> e^{log_norm}:
/// the state stays coherent, shifted in phase space by phi.
struct LinearShiftResult {
    Complex alpha_out;
    Complex log_norm;
};

inline LinearShiftResult apply_linear_exponential(const LinearExponential& le,
                                                  Complex alpha) {
    const Complex phi = le.phi;
    const Complex theta = le.theta;
    const Complex log_norm = 0.5 * std::norm(phi) +
                             (alpha * std::conj(phi)).real() + theta * alpha +
                             theta * phi / 2.0;
    return {alpha + phi, log_norm};
}

/// e^{u a^2 + v a+^2 + w a+a} = e^{(chi - w)/2} e^{l a+^2} e^{chi a+a} e^{m a^2}
/// with f = sqrt(w^2 - 4uv). The prefactor sign follows the theorem
/// statement; the alternative e^{(w+chi)/2} printed at its first use fails
/// the matrix oracle (and already the pure-a+a axis, where chi = w).
struct DisentangledQuadratic {
    Complex u{0.0, 0.0}, v{0.0, 0.0}, w{0.0, 0.0};
    Complex l{0.0, 0.0}, chi{0.0, 0.0}, m_coef{0.0, 0.0}, f{0.0, 0.0};

    /// (chi - w)/2
    Complex prefactor_log() const { return (chi - w) / 2.0; }
};

inline DisentangledQuadratic disentangle_quadratic(Complex u, Complex v, Complex w) {
    DisentangledQuadratic out;
    out.u = u;
    out.v = v;
    out.w = w;
    const Complex f = std::sqrt(w * w - 4.0 * u * v);
    out.f = f;
    // f coth f and chi are even in f; series below 1e-4 keeps the
    // removable f = 0 point smooth.
    Complex f_coth_f, denom_chi;
    if (std::abs(f) < 1e-4) {
        const Complex f2 = f * f;
        f_coth_f = 1.0 + f2 / 3.0 - f2 * f2 / 45.0;
        // cosh f - w sinh(f)/f
        denom_chi = (1.0 + f2 / 2.0 + f2 * f2 / 24.0) -
                    w * (1.0 + f2 / 6.0 + f2 * f2 / 120.0);
    } else {
        f_coth_f = f * std::cosh(f) / std::sinh(f);
        denom_chi = std::cosh(f) - w * std::sinh(f) / f;
    }
    const Complex pole = f_coth_f - w;
    if (std::abs(pole) < 1e-12)
        throw NumericalError("disentangle_quadratic: f coth(f) - w vanishes");
    out.l = v / pole;
    out.m_coef = u / pole;
    out.chi = -std::log(denom_chi);
    return out;
}

/// Position wavefunction of the quadratic-form family:
/// psi(x) = (2 s^2/pi)^{1/4} exp(-s2prime x^2 + lin x + log_norm),
/// with s^2 = m w / 2 hbar of the defining space.
struct GaussianWavefunction {
    Complex s2prime{0.0, 0.0};
    Complex lin{0.0, 0.0};
    Complex log_norm{0.0, 0.0};
    double s2_ref = 0.5;

    Complex eval(double x) const {
        return std::pow(2.0 * s2_ref / M_PI, 0.25) *
               std::exp(-s2prime * x * x + lin * x + log_norm);
    }

    /// Variance of |psi|^2; requires Re(s2prime) > 0.
    double x_variance() const {
        const double re = s2prime.real();
        if (re <= 0.0)
            throw NumericalError("GaussianWavefunction: non-normalizable");
        return 1.0 / (4.0 * re);
    }
};

/// <x| e^{eta P^2 + zeta Q^2 + xi QP} |alpha>.
///
/// The operator is rewritten over (a, a+) with
///   u = zeta hbar/2mw - eta m hbar w/2 - i xi hbar/2,
///   v = zeta hbar/2mw - eta m hbar w/2 + i xi hbar/2,
///   w = zeta hbar/mw + eta m hbar w,
/// plus the scalar w/2 + i xi hbar/2, then disentangled and folded through
/// the coherent completeness integral. The x^2 and x coefficients match
/// the bracketed forms of the source expressions; the alpha^2 prefactor
/// comes out as -alpha'^2/(2(1+2l)), the unique value consistent with the
/// l = chi = m = 0 reduction to <x|alpha> and with the matrix oracle.
inline GaussianWavefunction apply_quadratic_exponential(Complex eta, Complex zeta,
                                                        Complex xi, Complex alpha,
                                                        const FockSpace& space) {
    const double hbar = space.hbar();
    const double mw = space.mass() * space.omega();
    const double s2 = mw / (2.0 * hbar);
    const Complex i(0.0, 1.0);
    const Complex quad_part = zeta * hbar / (2.0 * mw) - eta * mw * hbar / 2.0;
    const Complex u = quad_part - i * xi * hbar / 2.0;
    const Complex v = quad_part + i * xi * hbar / 2.0;
    const Complex w = zeta * hbar / mw + eta * mw * hbar;
    const Complex scalar = w / 2.0 + i * xi * hbar / 2.0;

    const DisentangledQuadratic dq = disentangle_quadratic(u, v, w);
    const Complex l = dq.l;
    const Complex one_p_2l = 1.0 + 2.0 * l;
    const Complex three_m_2l = 3.0 - 2.0 * l;
    if (std::abs(one_p_2l) < 1e-12 || std::abs(three_m_2l) < 1e-12)
        throw NumericalError("apply_quadratic_exponential: pole in (1+2l)/(3-2l)");
    const Complex bracket = 1.0 + 2.0 * (1.0 - 2.0 * l) / one_p_2l;

    const Complex alpha_prime = alpha * std::exp(dq.chi);
    GaussianWavefunction out;
    out.s2_ref = s2;
    out.s2prime = s2 * ((1.0 - 2.0 * l) / three_m_2l) * bracket;
    out.lin = 2.0 * std::sqrt(s2) * alpha_prime * bracket / three_m_2l;
    out.log_norm = scalar + dq.prefactor_log() + dq.m_coef * alpha * alpha -
                   0.5 * std::norm(alpha) -
                   alpha_prime * alpha_prime / (2.0 * one_p_2l) -
                   0.5 * std::log(one_p_2l);
    return out;
}

/// A factorization V = O(X) f(Z) with the scalar part isolated.
struct ScalarFactorization {
    StateVector operator_part;
    Complex scalar_log{0.0, 0.0};

    StateVector full() const {
        return StateVector(operator_part.space,
                           std::exp(scalar_log) * operator_part.amplitudes);
    }
};

/// The normalized state depends only on the operator part; scalar factors
/// cancel. Returns normalize(O|psi>), which equals normalize(O f |psi>)
/// up to the global phase of f.
inline StateVector strip_normalization(const ScalarFactorization& fact) {
    return fact.operator_part.normalized();
}

} // namespace lqtraj
