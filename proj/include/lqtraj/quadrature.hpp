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
#include <vector>

#include "lqtraj/errors.hpp"

namespace lqtraj {

/// Gauss-Hermite rule for int e^{-x^2} g(x) dx = sum w_i g(x_i).
/// Nodes/weights from the Golub-Welsch eigenproblem of the Jacobi matrix.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights; // normalized: sum = 1 (weights / sqrt(pi))

    explicit GaussHermite(int order) {
        if (order < 1) throw ArgumentError("GaussHermite: order must be >= 1");
        Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
        for (int j = 1; j < order; ++j) {
            const double b = std::sqrt(static_cast<double>(j) / 2.0);
            jacobi(j, j - 1) = b;
            jacobi(j - 1, j) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
        nodes.resize(order);
        weights.resize(order);
        for (int i = 0; i < order; ++i) {
            nodes[i] = es.eigenvalues()(i);
            const double v0 = es.eigenvectors()(0, i);
            weights[i] = v0 * v0; // already normalized to sum 1
        }
    }

    /// E[g(X)] for X ~ normal(mean, variance).
    template <typename G>
    double expect_normal(double mean, double var, G&& g) const {
        const double scale = std::sqrt(2.0 * var);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * g(mean + scale * nodes[i]);
        return acc;
    }
};

/// Gauss-Legendre rule on [-1, 1], Golub-Welsch construction.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights; // sum = 2

    explicit GaussLegendre(int order) {
        if (order < 1) throw ArgumentError("GaussLegendre: order must be >= 1");
        Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
        for (int j = 1; j < order; ++j) {
            const double b = j / std::sqrt(4.0 * j * j - 1.0);
            jacobi(j, j - 1) = b;
            jacobi(j - 1, j) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
        nodes.resize(order);
        weights.resize(order);
        for (int i = 0; i < order; ++i) {
            nodes[i] = es.eigenvalues()(i);
            const double v0 = es.eigenvectors()(0, i);
            weights[i] = 2.0 * v0 * v0;
        }
    }

    /// int_a^b g, panels of width at most `panel_width`.
    template <typename G>
    double integrate_composite(double a, double b, double panel_width,
                               G&& g) const {
        const int n_panels =
            std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
        const double h = (b - a) / n_panels;
        double acc = 0.0;
        for (int p = 0; p < n_panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            double panel = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                panel += weights[i] * g(mid + 0.5 * h * nodes[i]);
            acc += 0.5 * h * panel;
        }
        return acc;
    }
};

} // namespace lqtraj
