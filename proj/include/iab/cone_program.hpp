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

#ifndef IAB_CONE_PROGRAM_HPP
#define IAB_CONE_PROGRAM_HPP

#include <armadillo>
#include <functional>
#include <string>
#include <vector>

namespace iab::backhaul
{
    // One second-order cone block. The slack s = h - G * x[support] must satisfy
    // s(0) >= ||s(1:end)||. A block of dimension 1 is a nonnegativity constraint.
    struct SocBlock
    {
        std::vector<arma::uword> support; // variable indices touched by this block
        arma::mat g;                      // dim x support.size()
        arma::vec h;                      // dim
    };

    //   minimize    c' x
    //   subject to  A x = b,  h_k - G_k x in SOC_k  for every block k
    struct ConeProgram
    {
        arma::uword n_vars = 0;
        arma::vec c;
        std::vector<SocBlock> cones;
        arma::mat a; // p x n_vars, may be empty
        arma::vec b;
    };

    struct IpmOptions
    {
        int max_iterations = 500;
        double feasibility_tol = 1e-8;
        double abs_gap_tol = 1e-8;
        double rel_gap_tol = 1e-8;
        double step_fraction = 0.99;
    };

    // Snapshot handed to the monitor at the top of every iteration.
    struct IpmProgress
    {
        int iteration;
        const arma::vec &x;
        const arma::vec &z;
        double primal_objective;
        double dual_objective;
        double gap;
        double primal_residual; // ||G x + s - h|| (and ||A x - b||) over max(1, ||h||)
        double dual_residual;   // ||c + G' z + A' y|| over max(1, ||c||, ||G' z||)
    };

    enum class IpmStatus
    {
        optimal,
        near_optimal,    // stopped early by a numerical problem, best iterate meets reduced tolerances
        stopped,         // the monitor asked to stop
        iteration_limit,
        numerical_error
    };

    struct IpmResult
    {
        IpmStatus status = IpmStatus::numerical_error;
        arma::vec x, s, z, y;
        int iterations = 0;
        double primal_objective = 0.0;
        double dual_objective = 0.0;
        double gap = 0.0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        std::string message;
    };

    // Returns true to stop the solve early.
    using IpmMonitor = std::function<bool(const IpmProgress &)>;

    // Primal-dual path-following method with Nesterov-Todd scaling and Mehrotra correction.
    // x0 must be strictly feasible for the cone constraints and satisfy A x0 = b; the dual
    // side starts at the cone identity and is driven to feasibility along the path.
    // Throws std::invalid_argument when x0 is not interior or dimensions disagree.
    IpmResult solve_cone_program(const ConeProgram &program, const arma::vec &x0,
                                 const IpmOptions &options = {}, const IpmMonitor &monitor = {});

    // Cone helpers, exposed for testing.
    namespace soc
    {
        // s(0) - ||s(1:)||, positive in the interior.
        double margin(const arma::vec &u);

        // Largest alpha with u + alpha d in the cone (infinity when unbounded). u must be interior.
        double max_step(const arma::vec &u, const arma::vec &d);

        // Nesterov-Todd scaling of an interior pair: W = beta (2 v v' - J), with W z = W^{-1} s.
        struct Scaling
        {
            double beta;
            arma::vec v;

            arma::vec apply(const arma::vec &x) const;         // W x
            arma::vec apply_inverse(const arma::vec &x) const; // W^{-1} x
        };
        Scaling nt_scaling(const arma::vec &s, const arma::vec &z);

        arma::vec jordan_product(const arma::vec &u, const arma::vec &v);
        // Solves lambda o u = w for u.
        arma::vec jordan_divide(const arma::vec &lambda, const arma::vec &w);
    }
}

#endif
