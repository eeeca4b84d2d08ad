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

// Command-line front end: run, sweep, selftest.

#include "iab/access_bf.hpp"
#include "iab/allocation.hpp"
#include "iab/backhaul_bf.hpp"
#include "iab/errors.hpp"
#include "iab/experiment.hpp"
#include "iab/report.hpp"
#include "iab/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

using namespace iab;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_config = 1;
    constexpr int exit_numerical = 2;

    struct Common
    {
        std::string config_path;
        std::string out_path;
        std::string trials_path;
        bool serial = false;
        std::map<std::string, std::string> raw; // storage for the per-key flags
    };

    void add_common(CLI::App *cmd, Common &c)
    {
        cmd->add_option("-c,--config", c.config_path, "JSON scenario file");
        cmd->add_option("-o,--out", c.out_path, "summary CSV (default: stdout)");
        cmd->add_option("--trials-out", c.trials_path, "per-trial CSV dump");
        cmd->add_flag("--serial", c.serial, "run trials on one thread");
        for (const auto &key : harness::config_keys())
            cmd->add_option("--" + key, c.raw[key], "override config field " + key);
    }

    harness::ScenarioConfig resolve(CLI::App *cmd, const Common &c)
    {
        harness::ScenarioConfig cfg;
        if (!c.config_path.empty())
            cfg = harness::load_config(c.config_path);
        std::map<std::string, std::string> given;
        for (const auto &key : harness::config_keys())
            if (cmd->count("--" + key) > 0)
                given[key] = c.raw.at(key);
        cfg = harness::apply_overrides(cfg, given);
        cfg.validate();
        return cfg;
    }

    int emit(const harness::SweepTable &table, const Common &c, const std::vector<double> &values)
    {
        if (c.out_path.empty())
            harness::write_summary_csv(std::cout, table);
        else
        {
            std::ofstream f(c.out_path);
            if (!f)
                throw ConfigError("cannot write '" + c.out_path + "'");
            harness::write_summary_csv(f, table);
        }
        if (!c.trials_path.empty())
        {
            std::ofstream f(c.trials_path);
            if (!f)
                throw ConfigError("cannot write '" + c.trials_path + "'");
            harness::write_trials_csv(f, table, values);
        }

        std::size_t ok = 0, failed = 0;
        for (const auto &batch : table.trials)
            for (const auto &t : batch)
            {
                if (t.failed)
                {
                    ++failed;
                    std::cerr << "trial " << t.trial_index << " failed: " << t.error << '\n';
                }
                else
                    ++ok;
            }
        if (ok == 0 && failed > 0)
        {
            std::cerr << "all trials failed\n";
            return exit_numerical;
        }
        return exit_ok;
    }

    // Small invariant suite on random instances.
    int selftest(std::uint64_t seed)
    {
        int failures = 0;
        auto report = [&](const std::string &name, bool ok)
        {
            std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
            failures += ok ? 0 : 1;
        };

        RandomStream rng(seed);
        {
            ComplexMatrix h(4, 16);
            for (auto &v : h)
                v = sample_cn(rng, 1.0);
            const access::AccessPrecoder p = access::hybrid_bd(h, 0, 1.0);
            const ComplexMatrix g = h * p.product();
            const double peak = arma::max(arma::square(arma::abs(g.diag())));
            double worst = 0.0;
            for (arma::uword j = 0; j < g.n_rows; ++j)
                for (arma::uword k = 0; k < g.n_cols; ++k)
                    if (j != k)
                        worst = std::max(worst, std::norm(g(j, k)));
            report("block diagonalization cancels inter-user terms", worst <= 1e-12 * peak);
            bool unit = true;
            for (const auto &v : p.analog)
                unit = unit && std::abs(std::norm(v) - 1.0 / 16.0) <= 1e-12;
            report("analog entries have constant modulus", unit);
            const double fro = arma::norm(p.digital, "fro");
            report("digital precoder meets the power budget", std::abs(fro * fro - 1.0) <= 1e-9);
        }
        {
            const double ca = 3.0, cb = 1.0;
            const double eta = allocation::optimal_eta(ca, cb);
            report("closed-form split balances both links", std::abs(eta * ca - (1.0 - eta) * cb) <= 1e-12);
        }
        {
            backhaul::BackhaulProblem p;
            p.rows = ComplexMatrix(1, 1, arma::fill::ones);
            p.noise_vars = arma::vec{1.0};
            p.power_budget = 10.0;
            const auto s = backhaul::maxmin_bisection(p, 0.0, backhaul::bisection_upper_bound(p), 1e-3);
            report("scalar backhaul bisection reaches log2(1 + snr)", std::abs(s.t_star - std::log2(11.0)) <= 1e-3);
        }
        return failures == 0 ? exit_ok : exit_numerical;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"iabsim: integrated access and backhaul simulator for cell-free mmWave massive MIMO"};
    app.require_subcommand(1);

    Common run_opts, sweep_opts;
    CLI::App *run = app.add_subcommand("run", "one scenario, one aggregated CSV row");
    add_common(run, run_opts);

    CLI::App *sw = app.add_subcommand("sweep", "one aggregated CSV row per axis value");
    add_common(sw, sweep_opts);
    std::string axis_name;
    std::vector<double> values;
    sw->add_option("--axis", axis_name, "p_access, p_backhaul, m_aps or eta_grid")->required();
    sw->add_option("--values", values, "comma separated axis values")->required()->delimiter(',');

    CLI::App *st = app.add_subcommand("selftest", "invariant checks on random instances");
    std::uint64_t st_seed = 1;
    st->add_option("--seed", st_seed, "random seed");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        if (*run)
        {
            const auto cfg = resolve(run, run_opts);
            const auto exec = run_opts.serial ? harness::Execution::serial : harness::Execution::parallel;
            return emit(harness::run_scenario(cfg, exec), run_opts, {});
        }
        if (*sw)
        {
            const auto cfg = resolve(sw, sweep_opts);
            const auto exec = sweep_opts.serial ? harness::Execution::serial : harness::Execution::parallel;
            return emit(harness::sweep(cfg, harness::parse_axis(axis_name), values, exec), sweep_opts, values);
        }
        if (*st)
            return selftest(st_seed);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const NumericalFailure &e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_ok;
}
