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
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

#include "lqtraj/errors.hpp"
#include "lqtraj/util.hpp"

namespace lqtraj {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Truncated Fock space. Values are immutable after construction and the
/// operator builders return fresh matrices, so spaces can be shared
/// read-only across parallel workers.
///
/// Conventions: Q = sqrt(hbar/2 m w)(a + a+), P = i sqrt(m hbar w / 2)(a+ - a).
/// Truncation breaks [a, a+] = 1 only on the last level.
class FockSpace {
public:
    FockSpace(int dim, double hbar = 1.0, double mass = 1.0, double omega = 1.0)
        : dim_(dim), hbar_(hbar), mass_(mass), omega_(omega) {
        if (dim < 2) throw ArgumentError("FockSpace: dim must be >= 2");
        if (hbar <= 0 || mass <= 0 || omega <= 0)
            throw ArgumentError("FockSpace: hbar, mass, omega must be positive");
    }

    int dim() const { return dim_; }
    double hbar() const { return hbar_; }
    double mass() const { return mass_; }
    double omega() const { return omega_; }

    Matrix annihilation() const {
        Matrix a = Matrix::Zero(dim_, dim_);
        for (int n = 1; n < dim_; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
        return a;
    }

    Matrix creation() const { return annihilation().adjoint(); }

    /// n-hat = a+ a, exactly diag(0 .. dim-1) on the truncated space.
    Matrix number() const {
        Matrix n = Matrix::Zero(dim_, dim_);
        for (int k = 0; k < dim_; ++k) n(k, k) = static_cast<double>(k);
        return n;
    }

    Matrix position() const {
        const double c = std::sqrt(hbar_ / (2.0 * mass_ * omega_));
        const Matrix a = annihilation();
        return c * (a + a.adjoint());
    }

    Matrix momentum() const {
        const Complex ic(0.0, std::sqrt(mass_ * hbar_ * omega_ / 2.0));
        const Matrix a = annihilation();
        return ic * (a.adjoint() - a);
    }

    Matrix identity() const { return Matrix::Identity(dim_, dim_); }

    bool operator==(const FockSpace& other) const {
        return dim_ == other.dim_ && hbar_ == other.hbar_ &&
               mass_ == other.mass_ && omega_ == other.omega_;
    }

private:
    int dim_;
    double hbar_, mass_, omega_;
};

inline FockSpace make_fock_space(int dim, double hbar = 1.0, double mass = 1.0,
                                 double omega = 1.0) {
    return FockSpace(dim, hbar, mass, omega);
}

/// A (generally unnormalized) pure state on a truncated Fock space.
struct StateVector {
    FockSpace space;
    Vector amplitudes;

    StateVector(const FockSpace& s, Vector amp) : space(s), amplitudes(std::move(amp)) {
        if (amplitudes.size() != space.dim())
            throw ArgumentError("StateVector: amplitude length != space dim");
    }

    double norm() const { return amplitudes.norm(); }

    StateVector normalized() const {
        const double n = norm();
        if (n == 0.0) throw DegenerateStateError("StateVector: zero norm");
        return StateVector(space, amplitudes / n);
    }
};

struct DensityMatrix {
    FockSpace space;
    Matrix matrix;

    DensityMatrix(const FockSpace& s, Matrix m) : space(s), matrix(std::move(m)) {
        if (matrix.rows() != space.dim() || matrix.cols() != space.dim())
            throw ArgumentError("DensityMatrix: shape mismatch");
    }

    double trace() const { return matrix.trace().real(); }

    DensityMatrix normalized() const {
        const double tr = trace();
        if (tr <= 0.0) throw DegenerateStateError("DensityMatrix: nonpositive trace");
        return DensityMatrix(space, matrix / tr);
    }
};

/// Concrete operator on a given space (holds drift/noise/Hamiltonian matrices).
struct OperatorMatrix {
    FockSpace space;
    Matrix matrix;

    OperatorMatrix(const FockSpace& s, Matrix m) : space(s), matrix(std::move(m)) {
        if (matrix.rows() != space.dim() || matrix.cols() != space.dim())
            throw ArgumentError("OperatorMatrix: shape mismatch");
    }
};

/// Coherent state |alpha>, amplitudes c_n = e^{-|a|^2/2} a^n / sqrt(n!).
/// The tail-safety precondition keeps truncation error below test
/// tolerances; silent truncation is the dominant failure mode here.
inline StateVector coherent_state(Complex alpha, const FockSpace& space) {
    const double a2 = std::norm(alpha);
    const double aa = std::abs(alpha);
    if (a2 + 6.0 * aa > static_cast<double>(space.dim()))
        throw TruncationError("coherent_state: |alpha|^2 + 6|alpha| exceeds dim");
    Vector amp(space.dim());
    // log-space recurrence avoids factorial overflow at large n
    Complex log_cn = -0.5 * a2;
    amp(0) = std::exp(log_cn);
    for (int n = 1; n < space.dim(); ++n) {
        if (alpha == Complex(0.0, 0.0)) {
            amp(n) = 0.0;
            continue;
        }
        log_cn += std::log(alpha) - 0.5 * std::log(static_cast<double>(n));
        amp(n) = std::exp(log_cn);
    }
    return StateVector(space, std::move(amp));
}

/// Thermal state, diagonal rho_n proportional to (nbar/(1+nbar))^n.
inline DensityMatrix thermal_state(double nbar, const FockSpace& space) {
    if (nbar < 0) throw ArgumentError("thermal_state: nbar must be >= 0");
    Matrix rho = Matrix::Zero(space.dim(), space.dim());
    if (nbar == 0.0) {
        rho(0, 0) = 1.0;
        return DensityMatrix(space, std::move(rho));
    }
    const double q = nbar / (1.0 + nbar);
    // tail mass of the normalized geometric distribution is q^dim
    if (std::pow(q, space.dim()) > 1e-12)
        throw TruncationError("thermal_state: geometric tail above 1e-12 at dim");
    double w = 1.0 - q;
    double sum = 0.0;
    for (int n = 0; n < space.dim(); ++n) {
        rho(n, n) = w;
        sum += w;
        w *= q;
    }
    rho /= sum;
    return DensityMatrix(space, std::move(rho));
}

/// Scaling-and-squaring matrix exponential (Eigen's Pade implementation).
inline Matrix matrix_exponential(const Matrix& m) { return m.exp(); }

inline OperatorMatrix matrix_exponential(const OperatorMatrix& m) {
    return OperatorMatrix(m.space, m.matrix.exp());
}

/// <psi|O|psi> on the internally normalized state.
inline Complex expectation(const StateVector& state, const Matrix& op) {
    const double n2 = state.amplitudes.squaredNorm();
    if (n2 == 0.0) throw DegenerateStateError("expectation: zero-norm state");
    return (state.amplitudes.adjoint() * (op * state.amplitudes))(0) / n2;
}

inline Complex expectation(const DensityMatrix& rho, const Matrix& op) {
    const double tr = rho.trace();
    if (tr == 0.0) throw DegenerateStateError("expectation: zero-trace density matrix");
    return (rho.matrix * op).trace() / tr;
}

inline double variance(const StateVector& state, const Matrix& op) {
    const Complex m1 = expectation(state, op);
    const Complex m2 = expectation(state, Matrix(op * op));
    return (m2 - m1 * m1).real();
}

inline double variance(const DensityMatrix& rho, const Matrix& op) {
    const Complex m1 = expectation(rho, op);
    const Complex m2 = expectation(rho, Matrix(op * op));
    return (m2 - m1 * m1).real();
}

} // namespace lqtraj
