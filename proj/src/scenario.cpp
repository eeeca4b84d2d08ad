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

#include "iab/scenario.hpp"
#include "iab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace iab::harness
{
    using nlohmann::json;

    namespace
    {
        template <class T>
        T get_as(const json &j, const std::string &key)
        {
            try
            {
                if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>)
                {
                    if (!j.is_number_integer() || (j.is_number_integer() && j.get<std::int64_t>() < 0))
                        throw ConfigError("");
                }
                else if constexpr (std::is_same_v<T, double>)
                {
                    if (!j.is_number())
                        throw ConfigError("");
                }
                else if constexpr (std::is_same_v<T, bool>)
                {
                    if (!j.is_boolean())
                        throw ConfigError("");
                }
                else if (!j.is_string())
                    throw ConfigError("");
                return j.get<T>();
            }
            catch (const std::exception &)
            {
                throw ConfigError("config: bad value for '" + key + "': " + j.dump());
            }
        }

        NoiseModel noise_model_from(const std::string &s)
        {
            if (s == "fixed")
                return NoiseModel::fixed;
            if (s == "psd_per_hz")
                return NoiseModel::psd_per_hz;
            throw ConfigError("config: noise_model must be 'fixed' or 'psd_per_hz', got '" + s + "'");
        }

        AccessScheme scheme_from(const std::string &s)
        {
            if (s == "hybrid")
                return AccessScheme::hybrid;
            if (s == "fd")
                return AccessScheme::fd;
            if (s == "random_analog")
                return AccessScheme::random_analog;
            if (s == "centralized_fd")
                return AccessScheme::centralized_fd;
            throw ConfigError("config: access_scheme must be hybrid, fd, random_analog or centralized_fd, got '" +
                              s + "'");
        }

        json to_object(const ScenarioConfig &c)
        {
            json j;
            j["m_aps"] = c.m_aps;
            j["k_users"] = c.k_users;
            j["n_a"] = c.n_a;
            j["n_c"] = c.n_c;
            j["p_access_dbm"] = c.p_access_dbm;
            j["p_backhaul_dbm"] = c.p_backhaul_dbm;
            j["noise_dbm"] = c.noise_dbm;
            j["noise_model"] = to_string(c.noise_model);
            j["bandwidth_hz"] = c.bandwidth_hz;
            j["carrier_ghz"] = c.carrier_ghz;
            j["alpha_los"] = c.alpha_los;
            j["alpha_nlos"] = c.alpha_nlos;
            j["n_nlos_paths"] = c.n_nlos_paths;
            j["los_only"] = c.los_only;
            j["element_spacing_ratio"] = c.element_spacing_ratio;
            j["ap_cpu_min_m"] = c.ap_cpu_min_m;
            j["ap_cpu_max_m"] = c.ap_cpu_max_m;
            j["user_ap_min_m"] = c.user_ap_min_m;
            j["user_ap_max_m"] = c.user_ap_max_m;
            j["access_scheme"] = to_string(c.access_scheme);
            j["topology_file"] = c.topology_file;
            j["trials"] = c.trials;
            j["seed"] = c.seed;
            j["eps_bisect"] = c.eps_bisect;
            j["socp_tol"] = c.socp_tol;
            j["rank_tol"] = c.rank_tol;
            return j;
        }

        ScenarioConfig from_object(const json &j, const ScenarioConfig &base)
        {
            if (!j.is_object())
                throw ConfigError("config: top level must be an object");
            const auto &keys = config_keys();
            ScenarioConfig c = base;
            for (auto it = j.begin(); it != j.end(); ++it)
            {
                const std::string &k = it.key();
                const json &v = it.value();
                if (std::find(keys.begin(), keys.end(), k) == keys.end())
                    throw ConfigError("config: unknown key '" + k + "'");
                if (k == "m_aps") c.m_aps = get_as<std::size_t>(v, k);
                else if (k == "k_users") c.k_users = get_as<std::size_t>(v, k);
                else if (k == "n_a") c.n_a = get_as<std::size_t>(v, k);
                else if (k == "n_c") c.n_c = get_as<std::size_t>(v, k);
                else if (k == "p_access_dbm") c.p_access_dbm = get_as<double>(v, k);
                else if (k == "p_backhaul_dbm") c.p_backhaul_dbm = get_as<double>(v, k);
                else if (k == "noise_dbm") c.noise_dbm = get_as<double>(v, k);
                else if (k == "noise_model") c.noise_model = noise_model_from(get_as<std::string>(v, k));
                else if (k == "bandwidth_hz") c.bandwidth_hz = get_as<double>(v, k);
                else if (k == "carrier_ghz") c.carrier_ghz = get_as<double>(v, k);
                else if (k == "alpha_los") c.alpha_los = get_as<double>(v, k);
                else if (k == "alpha_nlos") c.alpha_nlos = get_as<double>(v, k);
                else if (k == "n_nlos_paths") c.n_nlos_paths = get_as<std::size_t>(v, k);
                else if (k == "los_only") c.los_only = get_as<bool>(v, k);
                else if (k == "element_spacing_ratio") c.element_spacing_ratio = get_as<double>(v, k);
                else if (k == "ap_cpu_min_m") c.ap_cpu_min_m = get_as<double>(v, k);
                else if (k == "ap_cpu_max_m") c.ap_cpu_max_m = get_as<double>(v, k);
                else if (k == "user_ap_min_m") c.user_ap_min_m = get_as<double>(v, k);
                else if (k == "user_ap_max_m") c.user_ap_max_m = get_as<double>(v, k);
                else if (k == "access_scheme") c.access_scheme = scheme_from(get_as<std::string>(v, k));
                else if (k == "topology_file") c.topology_file = get_as<std::string>(v, k);
                else if (k == "trials") c.trials = get_as<std::size_t>(v, k);
                else if (k == "seed") c.seed = get_as<std::uint64_t>(v, k);
                else if (k == "eps_bisect") c.eps_bisect = get_as<double>(v, k);
                else if (k == "socp_tol") c.socp_tol = get_as<double>(v, k);
                else if (k == "rank_tol") c.rank_tol = get_as<double>(v, k);
            }
            return c;
        }
    }

    const std::vector<std::string> &config_keys()
    {
        static const std::vector<std::string> keys = {
            "m_aps", "k_users", "n_a", "n_c", "p_access_dbm", "p_backhaul_dbm", "noise_dbm", "noise_model",
            "bandwidth_hz", "carrier_ghz", "alpha_los", "alpha_nlos", "n_nlos_paths", "los_only",
            "element_spacing_ratio", "ap_cpu_min_m", "ap_cpu_max_m", "user_ap_min_m", "user_ap_max_m",
            "access_scheme", "topology_file", "trials", "seed", "eps_bisect", "socp_tol", "rank_tol"};
        return keys;
    }

    std::string to_string(NoiseModel m)
    {
        return m == NoiseModel::fixed ? "fixed" : "psd_per_hz";
    }

    std::string to_string(AccessScheme s)
    {
        switch (s)
        {
        case AccessScheme::hybrid: return "hybrid";
        case AccessScheme::fd: return "fd";
        case AccessScheme::random_analog: return "random_analog";
        case AccessScheme::centralized_fd: return "centralized_fd";
        }
        return "hybrid";
    }

    void ScenarioConfig::validate() const
    {
        auto fail = [](const std::string &msg) { throw ConfigError("config: " + msg); };
        if (m_aps == 0 || k_users == 0 || n_a == 0 || n_c == 0)
            fail("m_aps, k_users, n_a and n_c must be positive");
        if (k_users > n_a)
            fail("k_users (" + std::to_string(k_users) + ") exceeds n_a (" + std::to_string(n_a) +
                 "); block diagonalization needs one RF chain per user");
        if (m_aps > n_c)
            fail("m_aps (" + std::to_string(m_aps) + ") exceeds n_c (" + std::to_string(n_c) +
                 "); the CPU needs one RF chain per AP");
        for (double v : {p_access_dbm, p_backhaul_dbm, noise_dbm})
            if (!std::isfinite(v))
                fail("powers must be finite");
        if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
            fail("bandwidth_hz must be positive");
        if (!(element_spacing_ratio > 0.0))
            fail("element_spacing_ratio must be positive");
        if (!(ap_cpu_min_m > 0.0 && ap_cpu_max_m >= ap_cpu_min_m))
            fail("AP-CPU distance range is invalid");
        if (!(user_ap_min_m > 0.0 && user_ap_max_m >= user_ap_min_m))
            fail("user-AP distance range is invalid");
        if (trials == 0)
            fail("trials must be positive");
        if (!(eps_bisect > 0.0) || !(socp_tol > 0.0) || !(rank_tol > 0.0 && rank_tol < 1.0))
            fail("solver tolerances must be positive (rank_tol below 1)");
        try
        {
            channel_params().validate();
        }
        catch (const std::exception &e)
        {
            fail(e.what());
        }
    }

    channel::ChannelParams ScenarioConfig::channel_params() const
    {
        channel::ChannelParams p;
        p.carrier_ghz = carrier_ghz;
        p.alpha_los = alpha_los;
        p.alpha_nlos = alpha_nlos;
        p.n_nlos_paths = n_nlos_paths;
        p.los_only = los_only;
        return p;
    }

    channel::GeometryBounds ScenarioConfig::bounds() const
    {
        channel::GeometryBounds b;
        b.ap_cpu = {ap_cpu_min_m, ap_cpu_max_m};
        b.user_ap = {user_ap_min_m, user_ap_max_m};
        return b;
    }

    double ScenarioConfig::noise_watt() const
    {
        const double dbm = noise_model == NoiseModel::fixed ? noise_dbm : noise_dbm + 10.0 * std::log10(bandwidth_hz);
        return dbm_to_watt(dbm);
    }

    double ScenarioConfig::p_access_watt() const { return dbm_to_watt(p_access_dbm); }
    double ScenarioConfig::p_backhaul_watt() const { return dbm_to_watt(p_backhaul_dbm); }

    ScenarioConfig parse_config(const std::string &json_text, const ScenarioConfig &base)
    {
        json j;
        try
        {
            j = json::parse(json_text);
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return from_object(j, base);
    }

    ScenarioConfig load_config(const std::string &path, const ScenarioConfig &base)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("config: cannot open '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), base);
    }

    ScenarioConfig apply_overrides(const ScenarioConfig &config, const std::map<std::string, std::string> &overrides)
    {
        json j = json::object();
        for (const auto &[key, raw] : overrides)
        {
            json v = json::parse(raw, nullptr, false);
            if (v.is_discarded() || v.is_object() || v.is_array())
                v = raw;
            j[key] = v;
        }
        return from_object(j, config);
    }

    std::string to_json(const ScenarioConfig &config)
    {
        return to_object(config).dump(2);
    }
}
