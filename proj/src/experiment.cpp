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

#include "iab/experiment.hpp"
#include "iab/access_bf.hpp"
#include "iab/allocation.hpp"
#include "iab/backhaul_bf.hpp"
#include "iab/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace iab::harness
{
    namespace
    {
        enum Purpose : std::uint64_t
        {
            topology_stream = 0,
            channel_stream = 1,
            analog_stream = 2
        };

        struct Moments
        {
            double mean = 0.0;
            double se = 0.0;
        };

        Moments moments(const std::vector<double> &x)
        {
            Moments m;
            if (x.empty())
            {
                m.mean = std::numeric_limits<double>::quiet_NaN();
                m.se = m.mean;
                return m;
            }
            double s = 0.0;
            for (double v : x)
                s += v;
            m.mean = s / double(x.size());
            if (x.size() > 1)
            {
                double ss = 0.0;
                for (double v : x)
                    ss += (v - m.mean) * (v - m.mean);
                m.se = std::sqrt(ss / double(x.size() - 1) / double(x.size()));
            }
            return m;
        }

        std::vector<access::AccessPrecoder> access_precoders(const ScenarioConfig &c,
                                                             const channel::ChannelRealization &r,
                                                             RandomStream &analog_rng)
        {
            const double p = c.p_access_watt();
            if (c.access_scheme == AccessScheme::centralized_fd)
                return access::centralized_fd_bd(r.access, p, c.rank_tol);
            std::vector<access::AccessPrecoder> out;
            out.reserve(r.n_aps);
            for (std::size_t m = 0; m < r.n_aps; ++m)
            {
                switch (c.access_scheme)
                {
                case AccessScheme::fd:
                    out.push_back(access::fully_digital_bd(r.access[m], m, p, c.rank_tol));
                    break;
                case AccessScheme::random_analog:
                    out.push_back(access::random_analog_bd(r.access[m], m, p, analog_rng, c.rank_tol));
                    break;
                default:
                    out.push_back(access::hybrid_bd(r.access[m], m, p, c.rank_tol));
                }
            }
            return out;
        }

        std::vector<TrialResult> run_batch(const ScenarioConfig &config, const channel::NetworkTopology *topology,
                                           Execution execution)
        {
            const std::size_t n = config.trials;
            std::vector<TrialResult> out(n);
            if (execution == Execution::serial)
            {
                for (std::size_t i = 0; i < n; ++i)
                    out[i] = run_trial(config, i, topology);
                return out;
            }
            const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
            for (long long i = 0; i < count; ++i)
                out[i] = run_trial(config, std::size_t(i), topology);
            return out;
        }
    }

    TrialResult run_trial(const ScenarioConfig &config, std::size_t trial_index,
                          const channel::NetworkTopology *topology)
    {
        const auto start = std::chrono::steady_clock::now();
        TrialResult res;
        res.trial_index = trial_index;
        try
        {
            channel::NetworkTopology sampled;
            if (!topology)
            {
                RandomStream topo_rng = RandomStream::derive(config.seed, trial_index, topology_stream);
                sampled = channel::sample_topology(config.m_aps, config.k_users, config.n_a, config.n_c,
                                                   config.element_spacing_ratio, config.bounds(), topo_rng);
                topology = &sampled;
            }

            RandomStream ch_rng = RandomStream::derive(config.seed, trial_index, channel_stream);
            const channel::ChannelRealization r =
                channel::generate_realization(*topology, config.channel_params(), ch_rng);

            const double noise = config.noise_watt();

            backhaul::BackhaulInputs in;
            in.channels = r.backhaul;
            in.aod = r.backhaul_aod;
            in.aoa = r.backhaul_aoa;
            in.spacing_ratio = topology->element_spacing_ratio;
            in.noise_vars = arma::vec(r.n_aps, arma::fill::value(noise));
            in.power_budget = config.p_backhaul_watt();
            in.eps = config.eps_bisect;
            backhaul::SocpOptions opts;
            opts.tolerance = config.socp_tol;
            const backhaul::BackhaulSolution bh = backhaul::optimize_backhaul(in, opts);
            res.t_star = bh.t_star;
            res.backhaul_sinrs = bh.sinrs;

            RandomStream analog_rng = RandomStream::derive(config.seed, trial_index, analog_stream);
            const auto precoders = access_precoders(config, r, analog_rng);
            const access::AccessLinkResult al =
                access::access_link_eval(r.access, precoders, arma::vec(r.n_users, arma::fill::value(noise)));
            res.user_sinrs = al.sinrs;

            res.c_a = config.bandwidth_hz * al.sum_rate_bpshz;
            res.c_b = bh.degenerate ? 0.0 : config.bandwidth_hz * std::log2(1.0 + bh.sinrs.min());
            const allocation::RateSummary s = allocation::summarize(res.c_a, res.c_b);
            res.eta = s.eta;
            res.end_to_end = s.end_to_end;
        }
        catch (const NumericalFailure &e)
        {
            res.failed = true;
            res.error = e.what();
        }
        catch (const UndefinedSplit &e)
        {
            res.failed = true;
            res.error = e.what();
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return res;
    }

    SweepAxis parse_axis(const std::string &name)
    {
        if (name == "p_access")
            return SweepAxis::p_access;
        if (name == "p_backhaul")
            return SweepAxis::p_backhaul;
        if (name == "m_aps")
            return SweepAxis::m_aps;
        if (name == "eta_grid")
            return SweepAxis::eta_grid;
        throw ConfigError("unknown sweep axis '" + name + "' (p_access, p_backhaul, m_aps, eta_grid)");
    }

    std::string to_string(SweepAxis axis)
    {
        switch (axis)
        {
        case SweepAxis::p_access: return "p_access";
        case SweepAxis::p_backhaul: return "p_backhaul";
        case SweepAxis::m_aps: return "m_aps";
        case SweepAxis::eta_grid: return "eta_grid";
        default: return "none";
        }
    }

    SweepRow aggregate(const std::vector<TrialResult> &trials)
    {
        std::vector<double> ca, cb, eta, e2e;
        SweepRow row;
        for (const auto &t : trials)
        {
            if (t.failed)
            {
                ++row.failures;
                continue;
            }
            ca.push_back(t.c_a);
            cb.push_back(t.c_b);
            eta.push_back(t.eta);
            e2e.push_back(t.end_to_end);
        }
        row.successes = ca.size();
        const Moments a = moments(ca), b = moments(cb), h = moments(eta), r = moments(e2e);
        row.mean_c_a = a.mean;
        row.se_c_a = a.se;
        row.mean_c_b = b.mean;
        row.se_c_b = b.se;
        row.mean_eta = h.mean;
        row.mean_end_to_end = r.mean;
        row.se_end_to_end = r.se;
        return row;
    }

    SweepTable sweep(const ScenarioConfig &config, SweepAxis axis, const std::vector<double> &values,
                     Execution execution)
    {
        config.validate();
        if (axis != SweepAxis::none && values.empty())
            throw ConfigError("sweep: no axis values given");
        if (axis == SweepAxis::m_aps && !config.topology_file.empty())
            throw ConfigError("sweep: the m_aps axis cannot be combined with a fixed topology file");

        std::optional<channel::NetworkTopology> fixed;
        if (!config.topology_file.empty())
        {
            fixed = channel::load_topology(config.topology_file);
            channel::validate(*fixed, config.bounds());
            if (fixed->n_aps() != config.m_aps || fixed->n_users() != config.k_users ||
                fixed->n_ap_antennas != config.n_a || fixed->n_cpu_antennas != config.n_c)
                throw ConfigError("sweep: topology file disagrees with m_aps, k_users, n_a or n_c");
        }
        const channel::NetworkTopology *topo = fixed ? &*fixed : nullptr;

        SweepTable table;
        table.axis = axis;
        if (axis == SweepAxis::none)
        {
            table.trials.push_back(run_batch(config, topo, execution));
            table.rows.push_back(aggregate(table.trials.back()));
            return table;
        }

        if (axis == SweepAxis::eta_grid)
        {
            for (double eta : values)
                if (!(eta >= 0.0 && eta <= 1.0))
                    throw ConfigError("sweep: eta_grid values must lie in [0, 1]");
            table.trials.push_back(run_batch(config, topo, execution));
            const auto &trials = table.trials.back();
            for (double eta : values)
            {
                SweepRow row = aggregate(trials);
                std::vector<double> split;
                for (const auto &t : trials)
                    if (!t.failed)
                        split.push_back(allocation::split_rate(t.c_a, t.c_b, eta));
                const Moments m = moments(split);
                row.axis_value = eta;
                row.mean_end_to_end = m.mean;
                row.se_end_to_end = m.se;
                table.rows.push_back(row);
            }
            return table;
        }

        for (double v : values)
        {
            ScenarioConfig c = config;
            switch (axis)
            {
            case SweepAxis::p_access:
                c.p_access_dbm = v;
                break;
            case SweepAxis::p_backhaul:
                c.p_backhaul_dbm = v;
                break;
            case SweepAxis::m_aps:
                if (!(v >= 1.0) || v != std::floor(v))
                    throw ConfigError("sweep: m_aps values must be positive integers");
                c.m_aps = std::size_t(v);
                break;
            default:
                break;
            }
            c.validate();
            table.trials.push_back(run_batch(c, topo, execution));
            SweepRow row = aggregate(table.trials.back());
            row.axis_value = v;
            table.rows.push_back(row);
        }
        return table;
    }

    SweepTable run_scenario(const ScenarioConfig &config, Execution execution)
    {
        return sweep(config, SweepAxis::none, {}, execution);
    }
}
