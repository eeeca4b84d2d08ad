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

#ifndef IAB_EXPERIMENT_HPP
#define IAB_EXPERIMENT_HPP

#include "iab/channel.hpp"
#include "iab/scenario.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace iab::harness
{
    struct TrialResult
    {
        std::size_t trial_index = 0;
        bool failed = false;
        std::string error;
        double c_a = 0.0;        // bits/s over the full band
        double c_b = 0.0;        // bits/s over the full band
        double eta = 0.0;
        double end_to_end = 0.0; // bits/s
        double t_star = 0.0;     // backhaul common rate, bits/s/Hz
        arma::vec user_sinrs;
        arma::vec backhaul_sinrs;
        double seconds = 0.0;
    };

    // Channel draw, backhaul optimization, access precoding and bandwidth split for one trial.
    // Random draws depend only on (seed, trial_index). A fixed topology replaces the sampled one.
    // NumericalFailure and UndefinedSplit are caught and recorded in the result.
    TrialResult run_trial(const ScenarioConfig &config, std::size_t trial_index,
                          const channel::NetworkTopology *topology = nullptr);

    enum class SweepAxis
    {
        none, // single scenario, one row
        p_access,
        p_backhaul,
        m_aps,
        eta_grid
    };

    SweepAxis parse_axis(const std::string &name);
    std::string to_string(SweepAxis axis);

    enum class Execution
    {
        parallel,
        serial
    };

    struct SweepRow
    {
        std::optional<double> axis_value;
        double mean_c_a = 0.0;
        double se_c_a = 0.0;
        double mean_c_b = 0.0;
        double se_c_b = 0.0;
        double mean_eta = 0.0;
        double mean_end_to_end = 0.0;
        double se_end_to_end = 0.0;
        std::size_t failures = 0;
        std::size_t successes = 0;
    };

    struct SweepTable
    {
        SweepAxis axis = SweepAxis::none;
        std::vector<SweepRow> rows;
        // trials[i] belongs to rows[i]; for eta_grid every row shares trials[0].
        std::vector<std::vector<TrialResult>> trials;
    };

    // One aggregated row per axis value. Trials are spread over OpenMP threads unless
    // execution is serial; results do not depend on the thread count.
    SweepTable sweep(const ScenarioConfig &config, SweepAxis axis, const std::vector<double> &values,
                     Execution execution = Execution::parallel);

    // Single scenario, one row with an empty axis value.
    SweepTable run_scenario(const ScenarioConfig &config, Execution execution = Execution::parallel);

    // Mean and standard error (n - 1 denominator) of the successful trials.
    SweepRow aggregate(const std::vector<TrialResult> &trials);
}

#endif
