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
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "lqtraj/errors.hpp"
#include "lqtraj/rng.hpp"
#include "lqtraj/util.hpp"

namespace lqtraj {

/// One discretized Wiener path: i.i.d. normal(0, dt) increments,
/// reconstructible bit-exactly from (seed, dt, len).
struct WienerPath {
    double dt = 0.0;
    std::vector<double> increments;
    std::uint64_t seed = 0;

    double t_final() const { return dt * static_cast<double>(increments.size()); }
    std::size_t steps() const { return increments.size(); }

    /// W(t_final) = sum of increments.
    double total() const {
        double w = 0.0;
        for (double dw : increments) w += dw;
        return w;
    }
};

/// Ito convention throughout: coefficient functions are evaluated at the
/// left endpoint of each step.
inline WienerPath sample_path(double t, std::size_t steps, std::uint64_t seed) {
    if (t <= 0.0) throw ArgumentError("sample_path: t must be positive");
    if (steps < 1) throw ArgumentError("sample_path: steps must be >= 1");
    WienerPath path;
    path.dt = t / static_cast<double>(steps);
    path.seed = seed;
    path.increments.resize(steps);
    NormalSampler normal(seed);
    const double sdt = std::sqrt(path.dt);
    for (std::size_t n = 0; n < steps; ++n) path.increments[n] = sdt * normal();
    return path;
}

/// Sums adjacent increments: the same Brownian motion on a grid twice as
/// coarse. Used by the refinement-consistency and convergence-order tests.
inline WienerPath coarsen(const WienerPath& fine) {
    if (fine.steps() % 2 != 0)
        throw ArgumentError("coarsen: step count must be even");
    WienerPath coarse;
    coarse.dt = 2.0 * fine.dt;
    coarse.seed = fine.seed;
    coarse.increments.resize(fine.steps() / 2);
    for (std::size_t n = 0; n < coarse.increments.size(); ++n)
        coarse.increments[n] = fine.increments[2 * n] + fine.increments[2 * n + 1];
    return coarse;
}

/// Left-endpoint (Ito) sum of f over the first `upto` increments.
template <typename F>
Complex ito_integral(const WienerPath& path, F&& f, std::size_t upto) {
    Complex acc(0.0, 0.0);
    const std::size_t n_end = std::min(upto, path.steps());
    for (std::size_t n = 0; n < n_end; ++n)
        acc += Complex(f(static_cast<double>(n) * path.dt)) * path.increments[n];
    return acc;
}

template <typename F>
Complex ito_integral(const WienerPath& path, F&& f) {
    return ito_integral(path, std::forward<F>(f), path.steps());
}

/// Z = int f1 X2 dW - int f2 X1 dW with X_i(t') = int_0^t' f_i dW, all
/// left-endpoint. The running partial sums feed the outer sum before the
/// current increment is added.
template <typename F1, typename F2>
Complex double_ito_Z(const WienerPath& path, F1&& f1, F2&& f2,
                     std::size_t upto) {
    Complex x1(0.0, 0.0), x2(0.0, 0.0), z(0.0, 0.0);
    const std::size_t n_end = std::min(upto, path.steps());
    for (std::size_t n = 0; n < n_end; ++n) {
        const double t_left = static_cast<double>(n) * path.dt;
        const Complex f1v(f1(t_left));
        const Complex f2v(f2(t_left));
        const double dw = path.increments[n];
        z += (f1v * x2 - f2v * x1) * dw;
        x1 += f1v * dw;
        x2 += f2v * dw;
    }
    return z;
}

template <typename F1, typename F2>
Complex double_ito_Z(const WienerPath& path, F1&& f1, F2&& f2) {
    return double_ito_Z(path, std::forward<F1>(f1), std::forward<F2>(f2),
                        path.steps());
}

/// The scalar stochastic variables that parameterize the closed-form
/// evolution operators.
struct TrajectoryFunctionals {
    double W = 0.0;
    double Y = 0.0;
    Complex X1{0.0, 0.0};
    Complex X2{0.0, 0.0};
    Complex X3{0.0, 0.0};
    Complex Z{0.0, 0.0};
};

/// Covariance of (W(t), Y(t)) with Y = int t' dW: [[t, t^2/2], [t^2/2, t^3/3]].
inline Eigen::Matrix2d covariance_WY(double t) {
    if (t <= 0.0) throw ArgumentError("covariance_WY: t must be positive");
    Eigen::Matrix2d c;
    c << t, t * t / 2.0, t * t / 2.0, t * t * t / 3.0;
    return c;
}

/// Joint density (sqrt(12)/(2 pi t^2)) exp[-2W^2/t - 6Y^2/t^3 + 6WY/t^2].
inline double joint_density_WY(double w, double y, double t) {
    if (t <= 0.0) throw ArgumentError("joint_density_WY: t must be positive");
    const double pref = std::sqrt(12.0) / (2.0 * M_PI * t * t);
    return pref * std::exp(-2.0 * w * w / t - 6.0 * y * y / (t * t * t) +
                           6.0 * w * y / (t * t));
}

/// <X_i(t) X_j(tau)> = int_0^min(t,tau) f_i f_j dt', adaptive Gauss-Kronrod
/// with relative tolerance 1e-10.
template <typename Fi, typename Fj>
Complex xi_covariance(Fi&& fi, Fj&& fj, double t, double tau) {
    const double upper = std::min(t, tau);
    if (upper <= 0.0) throw ArgumentError("xi_covariance: time must be positive");
    using boost::math::quadrature::gauss_kronrod;
    const auto integrate_part = [&](bool imag_part) {
        auto f = [&](double s) {
            const Complex v = Complex(fi(s)) * Complex(fj(s));
            return imag_part ? v.imag() : v.real();
        };
        double err = 0.0;
        const double val =
            gauss_kronrod<double, 31>::integrate(f, 0.0, upper, 12, 1e-12, &err);
        const double scale = std::max(std::abs(val), 1e-30);
        if (err / scale > 1e-10 && err > 1e-14)
            throw NumericalError("xi_covariance: quadrature did not reach 1e-10 "
                                 "relative (estimated error " + std::to_string(err) + ")");
        return val;
    };
    return Complex(integrate_part(false), integrate_part(true));
}

template <typename Fi, typename Fj>
Complex xi_covariance(Fi&& fi, Fj&& fj, double t) {
    return xi_covariance(std::forward<Fi>(fi), std::forward<Fj>(fj), t, t);
}

} // namespace lqtraj
