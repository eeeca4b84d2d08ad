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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include "../oracles.hpp"
#include "iab/access_bf.hpp"
#include "iab/allocation.hpp"
#include "iab/backhaul_bf.hpp"
#include "iab/channel.hpp"
#include "iab/experiment.hpp"
#include "iab/report.hpp"
#include "iab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace iab;

namespace
{
    struct Outcome
    {
        bool pass;
        std::string detail;
    };

    int failures = 0;

    void run(const char *id, const char *title, double budget_s, const std::function<Outcome()> &body)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = body();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget_s > 0.0 && dt > budget_s)
        {
            o.pass = false;
            o.detail += " (runtime " + std::to_string(dt) + " s over budget)";
        }
        std::printf("%s %s: %s [%.1f s] %s\n", id, o.pass ? "PASS" : "FAIL", title, dt, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }

    std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, f, a, b, c);
        return buf;
    }

    channel::ChannelRealization draw(const harness::ScenarioConfig &c, std::size_t trial)
    {
        RandomStream tr = RandomStream::derive(c.seed, trial, 0);
        const auto topo = channel::sample_topology(c.m_aps, c.k_users, c.n_a, c.n_c, c.element_spacing_ratio,
                                                   c.bounds(), tr);
        RandomStream cr = RandomStream::derive(c.seed, trial, 1);
        return channel::generate_realization(topo, c.channel_params(), cr);
    }

    // Block diagonalization leaves no inter-user terms at any AP.
    Outcome ac1()
    {
        harness::ScenarioConfig c;
        c.m_aps = 2;
        c.k_users = 4;
        c.n_a = 16;
        c.n_c = 16;
        c.seed = 101;
        double worst = 0.0;
        for (std::size_t trial = 0; trial < 200; ++trial)
        {
            const auto r = draw(c, trial);
            for (std::size_t m = 0; m < c.m_aps; ++m)
            {
                const access::AccessPrecoder p = access::hybrid_bd(r.access[m], m, c.p_access_watt());
                const ComplexMatrix g = (r.access[m] * p.analog) * p.digital;
                double desired = 0.0, cross = 0.0;
                for (arma::uword j = 0; j < g.n_rows; ++j)
                    for (arma::uword k = 0; k < g.n_cols; ++k)
                        (j == k ? desired : cross) = std::max(j == k ? desired : cross, std::norm(g(j, k)));
                worst = std::max(worst, cross / desired);
            }
        }
        return {worst <= 1e-12, fmt("worst cross/desired power ratio %.3e (limit 1e-12)", worst)};
    }

    // Closed-form split against a 10^4-point grid.
    Outcome ac2()
    {
        RandomStream rng(202);
        double worst_arg = 0.0, worst_val = 0.0;
        for (int i = 0; i < 50; ++i)
        {
            const double ca = std::pow(10.0, rng.uniform(8.0, 12.0));
            const double cb = std::pow(10.0, rng.uniform(8.0, 12.0));
            const auto [arg, peak] = oracle::eta_grid_peak(ca, cb, 10000);
            const double r = allocation::end_to_end_rate(ca, cb);
            worst_arg = std::max(worst_arg, std::abs(arg - allocation::optimal_eta(ca, cb)));
            worst_val = std::max(worst_val, std::abs(peak - r) / r);
        }
        const bool ok = worst_arg <= 1e-4 + 1e-12 && worst_val <= 1e-4;
        return {ok, fmt("max |eta_grid - eta| %.2e (step 1e-4), max value error %.2e (limit 1e-4)", worst_arg, worst_val)};
    }

    // Bisection on scalar and two-node problems.
    Outcome ac3()
    {
        const double eps = 1e-3;
        double worst_scalar = 0.0;
        for (double gamma : {0.5, 1.0, 10.0, 100.0})
        {
            backhaul::BackhaulProblem p;
            p.rows = ComplexMatrix(1, 1);
            p.rows(0, 0) = cx(3e-6, 4e-6);
            p.noise_vars = {1e-12};
            p.power_budget = gamma * 1e-12 / std::norm(p.rows(0, 0));
            const auto s = backhaul::maxmin_bisection(p, 0.0, backhaul::bisection_upper_bound(p), eps);
            worst_scalar = std::max(worst_scalar, std::abs(s.t_star - std::log2(1.0 + gamma)));
        }
        RandomStream rng(303);
        double worst_pair = 0.0;
        for (int i = 0; i < 5; ++i)
        {
            backhaul::BackhaulProblem p;
            p.rows.set_size(2, 2);
            for (auto &v : p.rows)
                v = sample_cn(rng, 1.0);
            p.noise_vars = {1.0, 2.0};
            p.power_budget = db_to_linear(rng.uniform(0.0, 30.0));
            const auto s = backhaul::maxmin_bisection(p, 0.0, backhaul::bisection_upper_bound(p), eps);
            const double grid = oracle::two_node_grid_rate(p.rows, p.noise_vars, p.power_budget, 200);
            worst_pair = std::max(worst_pair, std::abs(s.t_star - grid) / grid);
        }
        const bool ok = worst_scalar <= eps && worst_pair <= 0.02;
        return {ok, fmt("scalar max |t* - log2(1+g)| %.2e (eps 1e-3), two-node max rel. gap to grid %.4f (limit 0.02)",
                        worst_scalar, worst_pair)};
    }

    // Unit modulus, power budgets and phase invariance over fuzzed scenarios.
    Outcome ac4()
    {
        RandomStream fuzz(404);
        double modulus = 0.0, power = 0.0, phase = 0.0, floor_est = 0.0;
        int checked = 0;
        for (int trial = 0; trial < 30; ++trial)
        {
            harness::ScenarioConfig c;
            c.m_aps = 1 + std::size_t(fuzz.uniform(0.0, 6.0));
            c.k_users = 1 + std::size_t(fuzz.uniform(0.0, 6.0));
            c.n_a = std::size_t(8) << std::size_t(fuzz.uniform(0.0, 3.0));
            c.n_c = std::size_t(8) << std::size_t(fuzz.uniform(0.0, 3.0));
            c.p_access_dbm = fuzz.uniform(0.0, 40.0);
            c.p_backhaul_dbm = fuzz.uniform(0.0, 40.0);
            c.seed = 4000 + trial;
            if (c.k_users > c.n_a || c.m_aps > c.n_c)
                continue;
            const auto r = draw(c, 0);

            backhaul::BackhaulInputs in;
            in.channels = r.backhaul;
            in.aod = r.backhaul_aod;
            in.aoa = r.backhaul_aoa;
            in.noise_vars = arma::vec(c.m_aps, arma::fill::value(c.noise_watt()));
            in.power_budget = c.p_backhaul_watt();
            const auto bh = backhaul::optimize_backhaul(in);
            for (const auto &v : bh.analog_precoder)
                modulus = std::max(modulus, std::abs(std::norm(v) - 1.0 / double(c.n_c)));
            for (const auto &w : bh.combiners)
                for (const auto &v : w)
                    modulus = std::max(modulus, std::abs(std::norm(v) - 1.0 / double(c.n_a)));
            const double pb = std::pow(arma::norm(bh.digital_precoder, "fro"), 2);
            power = std::max(power, (pb - in.power_budget) / in.power_budget);

            backhaul::BackhaulProblem prob;
            prob.rows = backhaul::effective_rows(r.backhaul, bh.analog_precoder, bh.combiners);
            prob.noise_vars = in.noise_vars;
            prob.power_budget = in.power_budget;
            ComplexMatrix rotated = bh.digital_precoder;
            for (arma::uword m = 0; m < rotated.n_cols; ++m)
                rotated.col(m) *= std::polar(1.0, fuzz.uniform(-3.14, 3.14));
            const arma::vec s0 = backhaul::backhaul_sinrs(prob, bh.digital_precoder);
            const arma::vec s1 = backhaul::backhaul_sinrs(prob, rotated);
            phase = std::max(phase, arma::max(arma::abs(s1 - s0) / arma::clamp(s0, 1e-300, arma::datum::inf)));
            // Rounding floor: each interference entry carries about eps * |b_m| |f_n| absolute error.
            const ComplexMatrix g = prob.rows * bh.digital_precoder;
            for (arma::uword m = 0; m < g.n_rows; ++m)
            {
                double denom = prob.noise_vars(m), err = 0.0;
                for (arma::uword n = 0; n < g.n_cols; ++n)
                    if (n != m)
                    {
                        denom += std::norm(g(m, n));
                        err += 2.0 * std::abs(g(m, n)) * arma::datum::eps * arma::norm(prob.rows.row(m)) *
                               arma::norm(bh.digital_precoder.col(n));
                    }
                floor_est = std::max(floor_est, err / denom);
            }
            for (std::size_t m = 0; m < c.m_aps; ++m)
            {
                const auto p = access::hybrid_bd(r.access[m], m, c.p_access_watt());
                for (const auto &v : p.analog)
                    modulus = std::max(modulus, std::abs(std::norm(v) - 1.0 / double(c.n_a)));
                const double pa = std::pow(arma::norm(p.digital, "fro"), 2);
                power = std::max(power, (pa - c.p_access_watt()) / c.p_access_watt());
            }
            ++checked;
        }
        const bool ok = checked > 10 && modulus <= 1e-12 && power <= 1e-9 && phase <= 1e-10;
        return {ok, fmt("modulus error %.2e (1e-12), power excess %.2e (1e-9), phase SINR change %.2e (1e-10)", modulus,
                        power, phase) +
                        fmt(", estimated rounding floor %.2e", floor_est) +
                        " over " + std::to_string(checked) + " scenarios"};
    }

    // Access sum rate ordering of the precoder families.
    Outcome ac5()
    {
        harness::ScenarioConfig c;
        c.seed = 505;
        const std::vector<double> powers = {0.0, 10.0, 20.0, 30.0};
        const int trials = 100;
        std::vector<double> fd(powers.size()), hy(powers.size()), ra(powers.size());
        for (int t = 0; t < trials; ++t)
        {
            const auto r = draw(c, t);
            const arma::vec noise(c.k_users, arma::fill::value(c.noise_watt()));
            for (std::size_t i = 0; i < powers.size(); ++i)
            {
                const double p = dbm_to_watt(powers[i]);
                RandomStream analog = RandomStream::derive(c.seed, t, 2);
                std::vector<access::AccessPrecoder> a, b, d;
                for (std::size_t m = 0; m < c.m_aps; ++m)
                {
                    a.push_back(access::fully_digital_bd(r.access[m], m, p));
                    b.push_back(access::hybrid_bd(r.access[m], m, p));
                    d.push_back(access::random_analog_bd(r.access[m], m, p, analog));
                }
                fd[i] += access::access_link_eval(r.access, a, noise).sum_rate_bpshz / trials;
                hy[i] += access::access_link_eval(r.access, b, noise).sum_rate_bpshz / trials;
                ra[i] += access::access_link_eval(r.access, d, noise).sum_rate_bpshz / trials;
            }
        }
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < powers.size(); ++i)
        {
            ok = ok && fd[i] >= hy[i] && hy[i] >= ra[i];
            detail += fmt("P=%g dBm FD %.2f hybrid %.2f", powers[i], fd[i], hy[i]) + fmt(" random %.2f; ", ra[i]);
        }
        const double gap = (fd.back() - hy.back()) / fd.back();
        ok = ok && gap <= 0.15;
        return {ok, detail + fmt("hybrid below FD by %.1f%% at 30 dBm (limit 15%%)", 100.0 * gap)};
    }

    bool within(double later, double earlier, double se_a, double se_b, bool non_increasing)
    {
        const double slack = 2.0 * std::sqrt(se_a * se_a + se_b * se_b);
        return non_increasing ? later <= earlier + slack : later >= earlier - slack;
    }

    // Max-min backhaul rate does not grow with the number of APs.
    Outcome ac6()
    {
        harness::ScenarioConfig c;
        c.seed = 606;
        c.trials = 100;
        const std::vector<double> ms = {3, 6, 9, 12};
        const auto t = harness::sweep(c, harness::SweepAxis::m_aps, ms);
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < ms.size(); ++i)
        {
            detail += fmt("M=%g %.4e (se %.2e, failed ", ms[i], t.rows[i].mean_c_b, t.rows[i].se_c_b) +
                      std::to_string(t.rows[i].failures) + "); ";
            if (i > 0)
                ok = ok && within(t.rows[i].mean_c_b, t.rows[i - 1].mean_c_b, t.rows[i].se_c_b, t.rows[i - 1].se_c_b, true);
        }
        return {ok, detail};
    }

    // Split curve of one realization has a single peak at the closed form.
    Outcome ac7()
    {
        harness::ScenarioConfig c;
        c.seed = 707;
        const harness::TrialResult r = harness::run_trial(c, 0);
        if (r.failed)
            return {false, "trial failed: " + r.error};
        const int n = 10000;
        std::vector<double> v(n);
        for (int i = 1; i <= n; ++i)
            v[i - 1] = allocation::split_rate(r.c_a, r.c_b, double(i) / n);
        const auto peak = std::max_element(v.begin(), v.end()) - v.begin();
        bool mono = true;
        for (long i = 1; i < n; ++i)
            mono = mono && (i <= peak ? v[i] >= v[i - 1] : v[i] <= v[i - 1]);
        const double eta_peak = double(peak + 1) / n;
        const bool ok = mono && std::abs(eta_peak - r.eta) <= 1.0 / n;
        return {ok, fmt("peak at eta %.4f, closed form %.6f, piecewise monotone %g", eta_peak, r.eta, mono ? 1 : 0)};
    }

    // End-to-end rate over the number of APs rises then falls.
    Outcome ac8()
    {
        harness::ScenarioConfig c;
        c.seed = 808;
        c.los_only = true;
        c.p_access_dbm = 30.0;
        c.p_backhaul_dbm = 30.0;
        c.trials = 50;
        std::vector<double> ms;
        for (int m = 2; m <= 14; ++m)
            ms.push_back(m);
        const auto t = harness::sweep(c, harness::SweepAxis::m_aps, ms);
        const auto &rows = t.rows;
        std::size_t peak = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].mean_end_to_end > rows[peak].mean_end_to_end)
                peak = i;
        bool ok = peak > 0 && peak + 1 < rows.size();
        for (std::size_t i = 1; i < rows.size(); ++i)
            ok = ok && within(rows[i].mean_end_to_end, rows[i - 1].mean_end_to_end, rows[i].se_end_to_end,
                              rows[i - 1].se_end_to_end, i > peak);
        // The rise and the fall must both exceed the noise.
        ok = ok && !within(rows[peak].mean_end_to_end, rows.front().mean_end_to_end, rows[peak].se_end_to_end,
                           rows.front().se_end_to_end, true);
        ok = ok && !within(rows.back().mean_end_to_end, rows[peak].mean_end_to_end, rows.back().se_end_to_end,
                           rows[peak].se_end_to_end, false);
        std::string detail = "peak at M=" + std::to_string(int(ms[peak])) + "; ";
        for (std::size_t i = 0; i < rows.size(); ++i)
            detail += fmt("%g:%.3e ", ms[i], rows[i].mean_end_to_end);
        return {ok, detail};
    }

    // Byte-identical CSV for repeated runs, independent of threading.
    Outcome ac9()
    {
        harness::ScenarioConfig c;
        c.m_aps = 4;
        c.k_users = 4;
        c.n_a = 32;
        c.n_c = 32;
        c.trials = 8;
        c.seed = 909;
        auto csv = [&](harness::Execution e)
        {
            std::ostringstream o;
            harness::write_summary_csv(o, harness::run_scenario(c, e));
            return o.str();
        };
        const std::string a = csv(harness::Execution::parallel);
        const std::string b = csv(harness::Execution::parallel);
        const std::string s = csv(harness::Execution::serial);
        return {a == b && a == s, "three runs, " + std::to_string(a.size()) + " bytes each"};
    }
}

int main()
{
    run("AC1", "block diagonalization zero interference", 10.0, ac1);
    run("AC2", "closed-form bandwidth split optimality", 5.0, ac2);
    run("AC3", "backhaul bisection oracle", 60.0, ac3);
    run("AC4", "constraint compliance", 0.0, ac4);
    run("AC5", "access precoder ordering", 900.0, ac5);
    run("AC6", "max-min backhaul rate versus number of APs", 0.0, ac6);
    run("AC7", "bandwidth split curve", 0.0, ac7);
    run("AC8", "end-to-end rate versus number of APs", 0.0, ac8);
    run("AC9", "deterministic run output", 0.0, ac9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
