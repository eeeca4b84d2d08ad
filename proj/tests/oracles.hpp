// SPDX-License-Identifier: Apache-2.0
//
// iabsim - integrated access and backhaul simulator for cell-free massive MIMO
// Copyright (C) 2026 The iabsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Independent reference computations shared by the unit and acceptance tests.

#ifndef IAB_TEST_ORACLES_HPP
#define IAB_TEST_ORACLES_HPP

#include "iab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace oracle
{
    using iab::ComplexMatrix;
    using iab::cx;

    // Max-min SINR of two nodes by exhaustive search. Receive filters of the virtual uplink,
    // f_k ~ (I + sum_j q_j b_j^H b_j)^{-1} b_k^H, are swept over the dual power split
    // (sum_j q_j sigma_j^2 = P); downlink powers are swept over the power split.
    inline double two_node_grid_rate(const ComplexMatrix &b, const arma::vec &noise, double power, int n = 200)
    {
        double best = 0.0;
        const arma::uword dim = b.n_cols;
        for (int i = 1; i < n; ++i)
        {
            const double th = double(i) / n;
            const double q1 = th * power / noise(0), q2 = (1.0 - th) * power / noise(1);
            ComplexMatrix r = arma::eye<ComplexMatrix>(dim, dim) + q1 * b.row(0).t() * b.row(0) +
                              q2 * b.row(1).t() * b.row(1);
            ComplexMatrix f = arma::solve(r, ComplexMatrix(b.t()));
            for (arma::uword k = 0; k < 2; ++k)
                f.col(k) /= arma::norm(f.col(k));
            const ComplexMatrix g = b * f;
            for (int j = 1; j < n; ++j)
            {
                const double p1 = double(j) / n * power, p2 = power - p1;
                const double s1 = p1 * std::norm(g(0, 0)) / (p2 * std::norm(g(0, 1)) + noise(0));
                const double s2 = p2 * std::norm(g(1, 1)) / (p1 * std::norm(g(1, 0)) + noise(1));
                best = std::max(best, std::min(s1, s2));
            }
        }
        return std::log2(1.0 + best);
    }

    // Largest value of min(eta c_a, (1 - eta) c_b) on an n-point grid of (0, 1], and its argument.
    inline std::pair<double, double> eta_grid_peak(double c_a, double c_b, int n = 10000)
    {
        double best = -1.0, arg = 0.0;
        for (int i = 1; i <= n; ++i)
        {
            const double eta = double(i) / n;
            const double v = std::min(eta * c_a, (1.0 - eta) * c_b);
            if (v > best)
            {
                best = v;
                arg = eta;
            }
        }
        return {arg, best};
    }
}

#endif
