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

#include <catch2/catch_amalgamated.hpp>

#include "lqtraj/quadratic.hpp"
#include "lqtraj/util.hpp"

#include "test_helpers.hpp"

using namespace lqtraj;
using lqtraj::testing::fidelity;
using lqtraj::testing::fock_to_position;
using lqtraj::testing::position_grid;
using Catch::Approx;

namespace {

HOPositionModel ho_r(double r) {
    // hbar = m = w = 1: k = 1/(2r)
    return HOPositionModel(1.0, 1.0, 1.0 / (2.0 * r));
}

} // namespace

TEST_CASE("coefficient functions at eps = 0 reduce to (k, kappa, 0)",
          "[quadratic]") {
    const QuadraticModel model(Complex(0.1, -0.2), Complex(-0.05, 0.3),
                               Complex(0.2, 0.1), Complex(0.0, 0.15),
                               Complex(-0.1, 0.0), Complex(0.7, 0.1),
                               Complex(-0.2, 0.4));
    const CoefficientTriple f = coefficient_functions(model);
    REQUIRE(std::abs(f.f1(0.0) - model.kq) < 1e-14);
    REQUIRE(std::abs(f.f2(0.0) - model.kp) < 1e-14);
    REQUIRE(std::abs(f.f3(0.0)) < 1e-14);
}

TEST_CASE("A = 0 keeps the coefficient functions constant", "[quadratic]") {
    const QuadraticModel model(0.0, 0.0, 0.0, 0.0, 0.0, Complex(0.4, 0.1),
                               Complex(-0.3, 0.2));
    const CoefficientTriple f = coefficient_functions(model);
    for (double eps : {0.3, 1.0, 2.5}) {
        REQUIRE(std::abs(f.f1(eps) - model.kq) < 1e-13);
        REQUIRE(std::abs(f.f2(eps) - model.kp) < 1e-13);
        REQUIRE(std::abs(f.f3(eps)) < 1e-13);
    }
}

TEST_CASE("coefficient functions are continuous across the lambda -> 0 "
          "switchover", "[quadratic]") {
    // xi^2 = 4 alpha gamma makes lambda exactly zero
    const QuadraticModel degenerate(Complex(0.1, 0.0), Complex(0.1, 0.0),
                                    Complex(0.2, 0.0), Complex(0.05, 0.02),
                                    Complex(-0.1, 0.1), Complex(0.5, 0.0),
                                    Complex(0.2, 0.1));
    REQUIRE(std::abs(degenerate.lambda) < 1e-14);
    const QuadraticModel nearby(Complex(0.1, 0.0), Complex(0.1, 1e-10),
                                Complex(0.2, 0.0), Complex(0.05, 0.02),
                                Complex(-0.1, 0.1), Complex(0.5, 0.0),
                                Complex(0.2, 0.1));
    const CoefficientTriple fd = coefficient_functions(degenerate);
    const CoefficientTriple fn = coefficient_functions(nearby);
    for (double eps : {0.1, 0.5, 1.0}) {
        REQUIRE(std::abs(fd.f1(eps) - fn.f1(eps)) < 1e-7);
        REQUIRE(std::abs(fd.f2(eps) - fn.f2(eps)) < 1e-7);
        REQUIRE(std::abs(fd.f3(eps) - fn.f3(eps)) < 1e-7);
    }
}

TEST_CASE("oscillator coefficient functions match the matrix conjugation",
          "[quadratic]") {
    // e^{-eps A} B e^{eps A} projected on (Q, P, 1) through the lowest
    // matrix elements, which truncation cannot corrupt
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const FockSpace space(60);
    const double eps = 0.5;
    const Matrix a = model.a_matrix(space);
    const Matrix b = model.b_matrix(space);
    const Matrix m = matrix_exponential(Matrix(-eps * a)) * b *
                     matrix_exponential(Matrix(eps * a));
    const double cq = std::sqrt(0.5);
    const double cp = std::sqrt(0.5);
    const Complex f1_mat = (m(0, 1) + m(1, 0)) / (2.0 * cq);
    const Complex f2_mat = (m(1, 0) - m(0, 1)) / (Complex(0.0, 2.0) * cp);
    const Complex f3_mat = m(0, 0);
    const CoefficientTriple f = coefficient_functions(model);
    REQUIRE(std::abs(f.f1(eps) - f1_mat) < 1e-8);
    REQUIRE(std::abs(f.f2(eps) - f2_mat) < 1e-8);
    REQUIRE(std::abs(f.f3(eps) - f3_mat) < 1e-8);
}

TEST_CASE("swap relation at eps = 0 is exact", "[quadratic]") {
    const HOPositionModel hom = ho_r(1.0);
    REQUIRE(swap_relation_check(hom.quadratic(), 0.0, 40) < 1e-13);
}

TEST_CASE("swap relation holds for the oscillator model", "[quadratic]") {
    const HOPositionModel hom = ho_r(1.0);
    REQUIRE(swap_relation_check(hom.quadratic(), 0.2, 60) < 1e-8);
}

TEST_CASE("swap relation holds for seeded random coefficient sets",
          "[quadratic][slow]") {
    NormalSampler g(60601);
    const auto bounded = [&]() {
        return 0.5 * g.uniform01() *
               std::exp(Complex(0.0, 2.0 * M_PI * g.uniform01()));
    };
    for (int trial = 0; trial < 20; ++trial) {
        const QuadraticModel model(bounded(), bounded(), bounded(), bounded(),
                                   bounded(), bounded(), bounded());
        const double eps = 0.05 + 0.15 * g.uniform01();
        REQUIRE(swap_relation_check(model, eps, 60) < 1e-7);
    }
}

TEST_CASE("tampered f3 breaks the swap relation (mutation check)",
          "[quadratic]") {
    const QuadraticModel model(Complex(0.2, -0.1), Complex(-0.15, 0.1),
                               Complex(0.1, 0.05), Complex(0.3, 0.1),
                               Complex(-0.2, 0.25), Complex(0.4, 0.0),
                               Complex(0.1, -0.3));
    REQUIRE(swap_relation_check(model, 0.15, 60) < 1e-7);
    CoefficientTriple tampered = coefficient_functions(model);
    const auto good_f3 = tampered.f3;
    tampered.f3 = [good_f3](double eps) { return -good_f3(eps); };
    REQUIRE(swap_relation_check(model, 0.15, 60, 20, &tampered) > 1e-4);
}

TEST_CASE("trajectory functionals: trivial paths", "[quadratic]") {
    const HOPositionModel hom = ho_r(1.0);

    SECTION("zero increments give zero functionals") {
        WienerPath path;
        path.dt = 0.01;
        path.increments.assign(100, 0.0);
        const TrajectoryFunctionals fn = trajectory_functionals(hom.quadratic(), path);
        REQUIRE(fn.W == 0.0);
        REQUIRE(fn.Y == 0.0);
        REQUIRE(std::abs(fn.X1) == 0.0);
        REQUIRE(std::abs(fn.X2) == 0.0);
        REQUIRE(std::abs(fn.X3) == 0.0);
        REQUIRE(std::abs(fn.Z) == 0.0);
    }

    SECTION("constant proportional coefficients give Z = 0") {
        const QuadraticModel flat(0.0, 0.0, 0.0, 0.0, 0.0, Complex(0.4, 0.1),
                                  Complex(0.2, 0.05));
        const WienerPath path = sample_path(1.0, 300, 12);
        const TrajectoryFunctionals fn = trajectory_functionals(flat, path);
        REQUIRE(std::abs(fn.Z) < 1e-14);
    }
}

TEST_CASE("sampled X1 second moment matches the quadrature covariance",
          "[quadratic][slow]") {
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const double t = 1.0;
    const std::size_t n_paths = 100000;
    const std::size_t steps = 256;
    const CoefficientTable table(model, t, steps);
    std::vector<double> x1sq_re(n_paths), x1sq_im(n_paths);
    parallel_for_indexed(n_paths, default_workers(), [&](std::size_t i) {
        const WienerPath path = sample_path(t, steps, derive_seed(246810, i));
        const TrajectoryFunctionals fn = trajectory_functionals(table, path);
        const Complex sq = fn.X1 * fn.X1;
        x1sq_re[i] = sq.real();
        x1sq_im[i] = sq.imag();
    });
    const CoefficientTriple f = coefficient_functions(model);
    const Complex expected = xi_covariance(f.f1, f.f1, t);
    const MeanStderr re = mean_stderr(x1sq_re);
    const MeanStderr im = mean_stderr(x1sq_im);
    REQUIRE(std::abs(re.mean - expected.real()) < 3.0 * re.stderr_of_mean);
    REQUIRE(std::abs(im.mean - expected.imag()) < 3.0 * im.stderr_of_mean);
}

TEST_CASE("two-time correlation of X1 matches the truncated integral",
          "[quadratic][slow]") {
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const double t = 1.0, tau = 0.6;
    const std::size_t n_paths = 100000;
    const std::size_t steps = 2000; // left-endpoint bias well below MC noise
    const CoefficientTriple f = coefficient_functions(model);
    std::vector<double> prod_re(n_paths), prod_im(n_paths);
    parallel_for_indexed(n_paths, default_workers(), [&](std::size_t i) {
        const WienerPath path = sample_path(t, steps, derive_seed(369121, i));
        const std::size_t cut = 1200; // tau = 0.6 of t = 1.0
        const Complex x1_t = ito_integral(path, f.f1);
        const Complex x1_tau = ito_integral(path, f.f1, cut);
        const Complex prod = x1_t * x1_tau;
        prod_re[i] = prod.real();
        prod_im[i] = prod.imag();
    });
    const Complex expected = xi_covariance(f.f1, f.f1, t, tau);
    const MeanStderr re = mean_stderr(prod_re);
    const MeanStderr im = mean_stderr(prod_im);
    REQUIRE(std::abs(re.mean - expected.real()) < 3.0 * re.stderr_of_mean);
    REQUIRE(std::abs(im.mean - expected.imag()) < 3.0 * im.stderr_of_mean);
}

TEST_CASE("Z is not Gaussian: excess kurtosis witness", "[quadratic][slow]") {
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const double t = 1.0;
    const std::size_t n_paths = 1000000;
    const std::size_t steps = 256;
    const CoefficientTable table(model, t, steps);
    std::vector<double> z_re(n_paths);
    parallel_for_indexed(n_paths, default_workers(), [&](std::size_t i) {
        const WienerPath path = sample_path(t, steps, derive_seed(555888, i));
        z_re[i] = trajectory_functionals(table, path).Z.real();
    });
    const double mean = pairwise_sum<double>(z_re) / n_paths;
    double m2 = 0.0, m4 = 0.0;
    for (double z : z_re) {
        const double d = z - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n_paths;
    m4 /= n_paths;
    const double excess_kurtosis = m4 / (m2 * m2) - 3.0;
    const double se = std::sqrt(24.0 / static_cast<double>(n_paths));
    REQUIRE(std::abs(excess_kurtosis) > 5.0 * se);
}

TEST_CASE("evolve_state trivial cases", "[quadratic]") {
    const FockSpace space(40);
    const HOPositionModel hom = ho_r(1.0);
    const StateVector psi0 = coherent_state(Complex(0.6, -0.4), space);

    SECTION("t = 0 with zero functionals returns psi0") {
        const TrajectoryFunctionals zero;
        const StateVector out = evolve_state(hom.quadratic(), psi0, 0.0, zero);
        REQUIRE((out.amplitudes - psi0.amplitudes).norm() < 1e-12);
    }

    SECTION("Hermitian generator with no measurement preserves the norm") {
        // A = -i(P^2/2 + Q^2/2), kq = kp = 0
        const QuadraticModel unitary(Complex(0.0, -0.5), Complex(0.0, -0.5),
                                     0.0, 0.0, 0.0, 0.0, 0.0);
        const TrajectoryFunctionals zero;
        const StateVector out = evolve_state(unitary, psi0, 1.0, zero);
        REQUIRE(std::abs(out.amplitudes.norm() - psi0.amplitudes.norm()) < 1e-10);
    }
}

TEST_CASE("evolve_state equals the SDE endpoint, including the scalar",
          "[quadratic][slow]") {
    const FockSpace space(80);
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const LseModel lse = hom.lse_model(space);
    const StateVector psi0 = coherent_state(1.0, space);
    const double t = 1.0;
    for (std::uint64_t seed : {401, 402}) {
        const WienerPath path = sample_path(t, 10000, seed);
        const TrajectoryFunctionals fn = trajectory_functionals(model, path);
        const EvolvedState closed = evolve_state_parts(model, psi0, t, fn);
        const LseResult sde = integrate_lse(lse, psi0, path);
        REQUIRE(1.0 - fidelity(closed.operator_part, sde.state) < 1e-6);

        // the scalar factor: e^{X3 + i hbar Z / 2}. With e^{i hbar Z}
        // instead, the log-norm mismatch grows by |Im Z| / 2.
        const StateVector full = closed.full();
        const double log_norm_closed = std::log(full.amplitudes.norm());
        const double mismatch_half = std::abs(log_norm_closed - sde.log_norm);
        REQUIRE(mismatch_half < 5e-3);
        const double mismatch_full =
            std::abs(log_norm_closed - 0.5 * space.hbar() * fn.Z.imag() -
                     sde.log_norm);
        if (std::abs(fn.Z.imag()) > 0.1)
            REQUIRE(mismatch_full > 10.0 * mismatch_half);
    }
}

TEST_CASE("normalized evolve_state output is invariant under Z -> 0",
          "[quadratic]") {
    const FockSpace space(60);
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const StateVector psi0 = coherent_state(0.8, space);
    const WienerPath path = sample_path(0.7, 500, 99);
    TrajectoryFunctionals fn = trajectory_functionals(model, path);
    const StateVector with_z = evolve_state(model, psi0, 0.7, fn).normalized();
    TrajectoryFunctionals no_z = fn;
    no_z.Z = Complex(0.0, 0.0);
    const StateVector without_z = evolve_state(model, psi0, 0.7, no_z).normalized();
    REQUIRE(1.0 - fidelity(with_z, without_z) < 1e-12);
}

TEST_CASE("Gaussian closure: vanishing fourth position cumulant", "[quadratic]") {
    const FockSpace space(80);
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const StateVector psi0 = coherent_state(0.5, space);
    const WienerPath path = sample_path(1.0, 800, 31415);
    const TrajectoryFunctionals fn = trajectory_functionals(model, path);
    const StateVector out = evolve_state(model, psi0, 1.0, fn);
    const Matrix q = space.position();
    const double mu = expectation(out, q).real();
    const Matrix qc = q - mu * space.identity();
    const Matrix qc2 = qc * qc;
    const double m2 = expectation(out, qc2).real();
    const double m4 = expectation(out, Matrix(qc2 * qc2)).real();
    REQUIRE(std::abs(m4 - 3.0 * m2 * m2) < 1e-6);
}

TEST_CASE("conditional x-variance is trajectory independent and equals the "
          "closed form", "[quadratic][slow]") {
    const FockSpace space(80);
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const StateVector psi0 = coherent_state(0.7, space);
    const double t = 1.0;
    const Matrix q = space.position();
    const double expected = ho_conditional_x_variance(ho_position_s2(hom, t));
    double vmin = 1e300, vmax = -1e300;
    const CoefficientTable table(model, t, 400);
    for (int i = 0; i < 10; ++i) {
        const WienerPath path = sample_path(t, 400, derive_seed(112233, i));
        const TrajectoryFunctionals fn = trajectory_functionals(table, path);
        const StateVector out = evolve_state(model, psi0, t, fn);
        const double v = variance(out, q);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    REQUIRE(vmax - vmin < 1e-10);
    REQUIRE(vmax == Approx(expected).margin(1e-8));
}

TEST_CASE("closed-form coherent route matches the dense route pointwise",
          "[quadratic]") {
    const FockSpace space(80);
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const Complex alpha(0.9, 0.2);
    const double t = 0.7;
    const WienerPath path = sample_path(t, 600, 2468);
    const TrajectoryFunctionals fn = trajectory_functionals(model, path);
    const GaussianWavefunction wf =
        evolve_coherent_wavefunction(model, alpha, t, fn, space);
    const StateVector dense =
        evolve_state(model, coherent_state(alpha, space), t, fn);
    const auto xs = position_grid(space, 0.0, 6.0, 256);
    const auto synth = fock_to_position(dense, xs);
    double max_err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        max_err = std::max(max_err, std::abs(synth[i] - wf.eval(xs[i])));
    REQUIRE(max_err < 1e-7);
}

TEST_CASE("linear terms in A are rejected by the coherent route", "[quadratic]") {
    const FockSpace space(40);
    const QuadraticModel with_linear(Complex(0.0, -0.5), Complex(0.0, -0.5), 0.0,
                                     Complex(0.1, 0.0), 0.0, Complex(0.3, 0.0),
                                     0.0);
    const TrajectoryFunctionals zero;
    REQUIRE_THROWS_AS(
        evolve_coherent_wavefunction(with_linear, 0.5, 1.0, zero, space),
        ArgumentError);
}

TEST_CASE("HO position variance closed forms", "[quadratic]") {
    SECTION("t = 0 gives s^2 and the coherent variance") {
        const HOPositionModel hom = ho_r(1.0);
        REQUIRE(ho_position_s2(hom, 0.0) == Complex(0.5, 0.0));
        REQUIRE(ho_conditional_x_variance(ho_position_s2(hom, 0.0)) ==
                Approx(0.5)); // hbar/(2 m w)
    }

    SECTION("l-based form equals the deltax form to 1e-10") {
        for (double r : {0.1, 1.0, 10.0}) {
            const HOPositionModel hom = ho_r(r);
            for (double wt = 0.25; wt <= 5.0; wt += 0.25) {
                const Complex a = ho_position_s2(hom, wt);
                const Complex b = ho_position_s2_lform(hom, wt);
                REQUIRE(std::abs(a - b) < 1e-10);
            }
        }
    }

    SECTION("t -> infinity limit is -i s^2 z") {
        const HOPositionModel hom = ho_r(1.0);
        const Complex limit = -Complex(0.0, 1.0) * hom.s2() * hom.z();
        REQUIRE(std::abs(ho_position_s2(hom, 20.0) - limit) < 1e-6);
    }

    SECTION("steady state at r = 1 against the frozen value") {
        const HOPositionModel hom = ho_r(1.0);
        const double im_z = std::sqrt((std::sqrt(5.0) + 1.0) / 2.0);
        REQUIRE(hom.z().imag() == Approx(im_z).epsilon(1e-12));
        REQUIRE(ho_steady_state_variance(hom) ==
                Approx(1.0 / (2.0 * im_z)).epsilon(1e-12));
    }

    SECTION("r -> infinity keeps the unmonitored variance") {
        const HOPositionModel hom = ho_r(1e8);
        REQUIRE(ho_steady_state_variance(hom) == Approx(0.5).margin(1e-6));
    }

    SECTION("strong measurement tracks the position") {
        const HOPositionModel hom = ho_r(0.01);
        REQUIRE(ho_steady_state_variance(hom) < 0.1 * 0.5);
    }

    SECTION("invalid arguments") {
        const HOPositionModel hom = ho_r(1.0);
        REQUIRE_THROWS_AS(ho_position_s2(hom, -1.0), ArgumentError);
        REQUIRE_THROWS_AS(ho_conditional_x_variance(Complex(-0.1, 0.4)),
                          NumericalError);
    }
}

TEST_CASE("s2prime from the coherent route equals ho_position_s2",
          "[quadratic]") {
    const FockSpace space(60);
    const HOPositionModel hom = ho_r(1.0);
    const QuadraticModel model = hom.quadratic();
    const GaussianWavefunction wf = apply_quadratic_exponential(
        model.alpha * 1.0, model.gamma * 1.0, 0.0, 0.4, space);
    REQUIRE(std::abs(wf.s2prime - ho_position_s2(hom, 1.0)) < 1e-10);
}

TEST_CASE("oscillator ensemble matches the master equation",
          "[quadratic][slow]") {
    const FockSpace space(24);
    const HOPositionModel hom = ho_r(1.0);
    const LseModel lse = hom.lse_model(space);
    const MasterModel master = hom.master_model(space);
    const StateVector psi0 = coherent_state(0.8, space);
    const double t = 0.2;
    const std::size_t n_traj = 20000;
    const Matrix q = space.position();
    const Matrix q2 = q * q;
    std::vector<double> qw(n_traj), q2w(n_traj);
    parallel_for_indexed(n_traj, default_workers(), [&](std::size_t i) {
        const WienerPath path = sample_path(t, 200, derive_seed(888111, i));
        const LseResult res = integrate_lse(lse, psi0, path);
        const double w = res.weight();
        qw[i] = w * expectation(res.state, q).real();
        q2w[i] = w * expectation(res.state, q2).real();
    });
    const DensityMatrix rho0(space,
                             Matrix(psi0.amplitudes * psi0.amplitudes.adjoint()));
    const DensityMatrix rho = integrate_master(master, rho0, t, 600);
    const MeanStderr m1 = mean_stderr(qw);
    const MeanStderr m2 = mean_stderr(q2w);
    REQUIRE(std::abs(m1.mean - expectation(rho, q).real()) <
            3.0 * m1.stderr_of_mean);
    REQUIRE(std::abs(m2.mean - expectation(rho, q2).real()) <
            3.0 * m2.stderr_of_mean);
}

TEST_CASE("SDE oracle confirms the position variance law", "[quadratic][slow]") {
    const FockSpace space(80);
    const HOPositionModel hom = ho_r(1.0);
    const LseModel lse = hom.lse_model(space);
    const StateVector psi0 = coherent_state(0.5, space);
    const double t = 1.0;
    const WienerPath path = sample_path(t, 5000, 777777);
    const LseResult res = integrate_lse(lse, psi0, path);
    const double var_sde = variance(res.state, space.position());
    const double var_closed = ho_conditional_x_variance(ho_position_s2(hom, t));
    REQUIRE(std::abs(var_sde - var_closed) / var_closed < 2e-3);
}
