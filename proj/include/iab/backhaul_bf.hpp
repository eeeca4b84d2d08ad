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

#ifndef IAB_BACKHAUL_BF_HPP
#define IAB_BACKHAUL_BF_HPP

#include "iab/numerics.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iab::backhaul
{
    // CPU analog precoder, one steering column a_C(aod_m)^H per AP. Entries have modulus 1/sqrt(N_C).
    // Throws ConfigError when there are more APs than CPU antennas (one RF chain per AP).
    ComplexMatrix build_cpu_analog(std::span<const double> angles_of_departure, std::size_t n_cpu_antennas,
                                   double spacing_ratio = 0.5);

    // AP receive combiners w_m = a_A(aoa_m). Entries have modulus 1/sqrt(N_A).
    std::vector<ComplexRow> build_ap_combiners(std::span<const double> angles_of_arrival,
                                               std::size_t n_ap_antennas, double spacing_ratio = 0.5);

    // M x M matrix whose row m is b_m = w_m H_m F_RF.
    ComplexMatrix effective_rows(std::span<const ComplexMatrix> channels, const ComplexMatrix &f_rf,
                                 std::span<const ComplexRow> combiners);

    struct BackhaulProblem
    {
        ComplexMatrix rows;   // M x M, row m = b_m
        arma::vec noise_vars; // ||w_m||^2 sigma_m^2, W
        double power_budget;  // P_B, W

        std::size_t size() const { return rows.n_rows; }
        void validate() const;
    };

    // Per-node SINR of a digital precoder F (column m serves AP m).
    arma::vec backhaul_sinrs(const BackhaulProblem &problem, const ComplexMatrix &f_bb);

    enum class Formulation
    {
        automatic,      // stream space when the effective rows are well conditioned
        stream_space,   // variables are the noise-normalized received amplitudes b_m f_n / sigma_m
        precoder_space  // variables are the precoder entries themselves
    };

    struct SocpOptions
    {
        double tolerance = 1e-7; // cone violation, in units of the noise amplitude
        int max_iterations = 500;
        Formulation formulation = Formulation::automatic;
    };

    struct SocpTraceRecord
    {
        int iteration;
        double tau;        // current primal objective (worst cone violation)
        double dual_bound; // dual objective
        double gap;
        double primal_residual;
        double dual_residual;
    };

    // Feasibility of common rate target t (bits/s/Hz). Internally minimizes the worst violation
    // tau of the cones  Re(b_m f_m) / sqrt(2^t - 1) >= ||[b_m f_n (n != m), sigma_m]||  subject to
    // ||F||_F^2 <= P_B, with b_m f_m real. A returned precoder satisfies every cone within
    // `tolerance`, has b_m f_m real and nonnegative, and is scaled down to the least power that
    // keeps it feasible. std::nullopt means infeasibility was certified by the dual bound.
    // Throws std::invalid_argument for t <= 0 and NumericalFailure when the solver stalls.
    std::optional<ComplexMatrix> socp_feasible(const BackhaulProblem &problem, double t,
                                               const SocpOptions &options = {},
                                               std::vector<SocpTraceRecord> *trace = nullptr);

    // Largest violation of the rate-t cones by precoder f (<= 0 means feasible), in noise units.
    double cone_violation(const BackhaulProblem &problem, const ComplexMatrix &f_bb, double t);

    struct BisectionStep
    {
        double t;
        bool feasible;
    };

    struct BackhaulSolution
    {
        ComplexMatrix analog_precoder;      // N_C x M (empty from maxmin_bisection alone)
        ComplexMatrix digital_precoder;     // M x M
        std::vector<ComplexRow> combiners;  // M rows of 1 x N_A
        double t_star = 0.0;                // bits/s/Hz
        arma::vec sinrs;
        int iterations = 0;
        bool degenerate = false;            // no feasible positive rate was found
        std::string diagnostic;
        std::vector<BisectionStep> steps;
    };

    // log2(1 + P_B max_m ||b_m||^2 / sigma_m^2): the rate of the best node with no interference.
    double bisection_upper_bound(const BackhaulProblem &problem);

    // Bisection over the common rate. Runs ceil(log2((t_max - t_min) / eps)) feasibility checks and
    // returns the last feasible precoder scaled to the full power budget.
    BackhaulSolution maxmin_bisection(const BackhaulProblem &problem, double t_min, double t_max, double eps,
                                      const SocpOptions &options = {});

    struct BackhaulInputs
    {
        std::span<const ComplexMatrix> channels; // H_m, N_A x N_C
        std::span<const double> aod;             // CPU departure angles
        std::span<const double> aoa;             // AP arrival angles
        double spacing_ratio = 0.5;
        arma::vec noise_vars;                    // sigma_m^2, W
        double power_budget = 1.0;               // W
        double eps = 1e-3;
    };

    // Analog stage from steering vectors, then bisection on the digital precoder.
    BackhaulSolution optimize_backhaul(const BackhaulInputs &inputs, const SocpOptions &options = {});

    struct BackhaulRates
    {
        arma::vec per_node; // bits/s
        double minimum;
    };

    BackhaulRates backhaul_rates(const arma::vec &sinrs, double bandwidth_hz, double eta);
    BackhaulRates backhaul_rates(const BackhaulSolution &solution, double bandwidth_hz, double eta);
}

#endif
