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

#ifndef IAB_SCENARIO_HPP
#define IAB_SCENARIO_HPP

#include "iab/channel.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace iab::harness
{
    enum class NoiseModel
    {
        fixed,      // noise_dbm is the total noise power
        psd_per_hz  // noise_dbm is a density; 10 log10(bandwidth_hz) is added
    };

    enum class AccessScheme
    {
        hybrid,
        fd,
        random_analog,
        centralized_fd
    };

    struct ScenarioConfig
    {
        std::size_t m_aps = 6;
        std::size_t k_users = 8;
        std::size_t n_a = 64;
        std::size_t n_c = 64;
        double p_access_dbm = 30.0;
        double p_backhaul_dbm = 30.0;
        double noise_dbm = -174.0;
        NoiseModel noise_model = NoiseModel::fixed;
        double bandwidth_hz = 2e9;
        double carrier_ghz = 28.0;
        double alpha_los = 2.1;
        double alpha_nlos = 3.64;
        std::size_t n_nlos_paths = 5;
        bool los_only = false;
        double element_spacing_ratio = 0.5;
        double ap_cpu_min_m = 30.0;
        double ap_cpu_max_m = 50.0;
        double user_ap_min_m = 150.0;
        double user_ap_max_m = 200.0;
        AccessScheme access_scheme = AccessScheme::hybrid;
        std::string topology_file; // empty: sample a fresh topology per trial
        std::size_t trials = 100;
        std::uint64_t seed = 1;
        double eps_bisect = 1e-3;
        double socp_tol = 1e-7;
        double rank_tol = 1e-10;

        // Throws ConfigError.
        void validate() const;

        channel::ChannelParams channel_params() const;
        channel::GeometryBounds bounds() const;
        double noise_watt() const;
        double p_access_watt() const;
        double p_backhaul_watt() const;
    };

    // Every configuration key, in serialization order.
    const std::vector<std::string> &config_keys();

    // JSON object with any subset of the keys; unknown keys and ill-typed values throw ConfigError.
    ScenarioConfig parse_config(const std::string &json_text, const ScenarioConfig &base = {});
    ScenarioConfig load_config(const std::string &path, const ScenarioConfig &base = {});

    // Applies command-line overrides given as key -> raw text. Numbers and booleans are parsed,
    // everything else is taken as a string.
    ScenarioConfig apply_overrides(const ScenarioConfig &config, const std::map<std::string, std::string> &overrides);

    std::string to_json(const ScenarioConfig &config);

    std::string to_string(NoiseModel m);
    std::string to_string(AccessScheme s);
}

#endif
