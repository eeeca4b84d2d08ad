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

#include "iab/backhaul_bf.hpp"
#include "iab/channel.hpp"
#include "iab/cone_program.hpp"
#include "iab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <stdexcept>

namespace iab::backhaul
{
    namespace
    {
        // Dual residual below which the dual objective is trusted as a lower bound on the violation.
        constexpr double certificate_dual_residual = 1e-8;
        constexpr double power_slack = 1e-9;

        struct Encoded
        {
            ConeProgram program;
            arma::vec start;
            std::function<ComplexMatrix(const arma::vec &)> decode;
        };

        arma::vec noise_amplitudes(const BackhaulProblem &p)
        {
            return arma::sqrt(p.noise_vars);
        }

        // Rows scaled by 1 / sigma_m.
        ComplexMatrix normalized_rows(const BackhaulProblem &p)
        {
            ComplexMatrix bn = p.rows;
            const arma::vec sigma = noise_amplitudes(p);
            for (arma::uword m = 0; m < bn.n_rows; ++m)
                bn.row(m) /= sigma(m);
            return bn;
        }

        // Variables: for m != n the real and imaginary parts of y_mn = b_m f_n / sigma_m, for m == n the
        // real amplitude y_mm / sqrt(gamma); then tau. The precoder is recovered as F = Bn^{-1} Y.
        Encoded encode_stream_space(const BackhaulProblem &p, const ComplexMatrix &bn, double gamma)
        {
            const arma::uword M = p.size();
            const double sg = std::sqrt(gamma);
            ComplexMatrix bn_inv;
            if (!arma::inv(bn_inv, bn))
                throw NumericalFailure("socp_feasible: effective rows are singular");
            const ComplexMatrix c = bn_inv / std::sqrt(p.power_budget);

            arma::umat re(M, M), im(M, M);
            arma::uword next = 0;
            for (arma::uword m = 0; m < M; ++m)
                for (arma::uword n = 0; n < M; ++n)
                {
                    re(m, n) = next++;
                    im(m, n) = (m == n) ? re(m, n) : next++;
                }
            const arma::uword tau = next;

            Encoded e;
            ConeProgram &prog = e.program;
            prog.n_vars = tau + 1;
            prog.c.zeros(prog.n_vars);
            prog.c(tau) = 1.0;

            for (arma::uword m = 0; m < M; ++m)
            {
                SocBlock blk;
                const arma::uword dim = 2 * M;
                blk.support.push_back(re(m, m));
                for (arma::uword n = 0; n < M; ++n)
                    if (n != m)
                    {
                        blk.support.push_back(re(m, n));
                        blk.support.push_back(im(m, n));
                    }
                blk.support.push_back(tau);
                blk.g.zeros(dim, blk.support.size());
                blk.h.zeros(dim);
                blk.g(0, 0) = -1.0;
                blk.g(0, blk.support.size() - 1) = -1.0;
                for (arma::uword j = 1; j + 1 < dim; ++j)
                    blk.g(j, j) = -1.0;
                blk.h(dim - 1) = 1.0;
                prog.cones.push_back(std::move(blk));
            }

            SocBlock power;
            for (arma::uword i = 0; i < tau; ++i)
                power.support.push_back(i);
            power.g.zeros(1 + 2 * M * M, tau);
            power.h.zeros(1 + 2 * M * M);
            power.h(0) = 1.0;
            for (arma::uword i = 0; i < M; ++i)
                for (arma::uword n = 0; n < M; ++n)
                {
                    const arma::uword row_re = 1 + 2 * (i * M + n);
                    const arma::uword row_im = row_re + 1;
                    for (arma::uword m = 0; m < M; ++m)
                    {
                        const double cr = c(i, m).real();
                        const double ci = c(i, m).imag();
                        if (m == n)
                        {
                            power.g(row_re, re(m, n)) -= cr * sg;
                            power.g(row_im, re(m, n)) -= ci * sg;
                        }
                        else
                        {
                            power.g(row_re, re(m, n)) -= cr;
                            power.g(row_re, im(m, n)) += ci;
                            power.g(row_im, re(m, n)) -= ci;
                            power.g(row_im, im(m, n)) -= cr;
                        }
                    }
                }
            prog.cones.push_back(std::move(power));

            e.start.zeros(prog.n_vars);
            e.start(tau) = 2.0;
            e.decode = [=](const arma::vec &x)
            {
                ComplexMatrix y(M, M);
                for (arma::uword m = 0; m < M; ++m)
                    for (arma::uword n = 0; n < M; ++n)
                        y(m, n) = (m == n) ? cx(sg * x(re(m, n)), 0.0) : cx(x(re(m, n)), x(im(m, n)));
                // Backward-stable solve keeps Bn F close to Y even when Bn is badly conditioned.
                return ComplexMatrix(arma::solve(bn, y));
            };
            return e;
        }

        // Variables: real and imaginary parts of G = F / sqrt(P_B), then tau. Realness of b_m f_m is an
        // equality constraint.
        Encoded encode_precoder_space(const BackhaulProblem &p, const ComplexMatrix &bn, double gamma)
        {
            const arma::uword M = p.size();
            const double sg = std::sqrt(gamma);
            const double sp = std::sqrt(p.power_budget);
            const ComplexMatrix beta = bn * sp;
            auto re = [M](arma::uword i, arma::uword n) { return 2 * (i * M + n); };
            auto im = [M](arma::uword i, arma::uword n) { return 2 * (i * M + n) + 1; };
            const arma::uword tau = 2 * M * M;

            Encoded e;
            ConeProgram &prog = e.program;
            prog.n_vars = tau + 1;
            prog.c.zeros(prog.n_vars);
            prog.c(tau) = 1.0;

            for (arma::uword m = 0; m < M; ++m)
            {
                SocBlock blk;
                const arma::uword dim = 2 * M;
                for (arma::uword i = 0; i <= tau; ++i)
                    blk.support.push_back(i);
                blk.g.zeros(dim, prog.n_vars);
                blk.h.zeros(dim);
                for (arma::uword i = 0; i < M; ++i)
                {
                    const double br = beta(m, i).real() / sg;
                    const double bi = beta(m, i).imag() / sg;
                    blk.g(0, re(i, m)) = -br;
                    blk.g(0, im(i, m)) = bi;
                }
                blk.g(0, tau) = -1.0;
                arma::uword row = 1;
                for (arma::uword n = 0; n < M; ++n)
                {
                    if (n == m)
                        continue;
                    for (arma::uword i = 0; i < M; ++i)
                    {
                        const double br = beta(m, i).real();
                        const double bi = beta(m, i).imag();
                        blk.g(row, re(i, n)) = -br;
                        blk.g(row, im(i, n)) = bi;
                        blk.g(row + 1, re(i, n)) = -bi;
                        blk.g(row + 1, im(i, n)) = -br;
                    }
                    row += 2;
                }
                blk.h(dim - 1) = 1.0;
                prog.cones.push_back(std::move(blk));
            }

            prog.a.zeros(M, prog.n_vars);
            prog.b.zeros(M);
            for (arma::uword m = 0; m < M; ++m)
            {
                const double scale = arma::norm(beta.row(m));
                if (!(scale > 0.0))
                {
                    prog.a(m, tau) = 0.0;
                    continue;
                }
                for (arma::uword i = 0; i < M; ++i)
                {
                    prog.a(m, re(i, m)) = beta(m, i).imag() / scale;
                    prog.a(m, im(i, m)) = beta(m, i).real() / scale;
                }
            }
            // Zero rows make the equality block rank deficient; drop them.
            arma::uvec keep = arma::find(arma::sum(arma::abs(prog.a), 1) > 0.0);
            prog.a = arma::mat(prog.a.rows(keep));
            prog.b = arma::vec(prog.b.elem(keep));

            SocBlock power;
            for (arma::uword i = 0; i < tau; ++i)
                power.support.push_back(i);
            power.g.zeros(1 + tau, tau);
            power.g.submat(1, 0, tau, tau - 1) = -arma::eye(tau, tau);
            power.h.zeros(1 + tau);
            power.h(0) = 1.0;
            prog.cones.push_back(std::move(power));

            e.start.zeros(prog.n_vars);
            e.start(tau) = 2.0;
            e.decode = [=](const arma::vec &x)
            {
                ComplexMatrix f(M, M);
                for (arma::uword i = 0; i < M; ++i)
                    for (arma::uword n = 0; n < M; ++n)
                        f(i, n) = sp * cx(x(re(i, n)), x(im(i, n)));
                return f;
            };
            return e;
        }

        // Rotates column m so that b_m f_m is real and nonnegative.
        void realign_phases(const BackhaulProblem &p, ComplexMatrix &f)
        {
            for (arma::uword m = 0; m < p.size(); ++m)
            {
                const cx s = arma::as_scalar(p.rows.row(m) * f.col(m));
                const double a = std::abs(s);
                if (a > 0.0)
                    f.col(m) *= std::conj(s) / a;
            }
        }

        double power_of(const ComplexMatrix &f)
        {
            const double n = arma::norm(f, "fro");
            return n * n;
        }

        void clamp_power(const BackhaulProblem &p, ComplexMatrix &f)
        {
            const double pw = power_of(f);
            if (pw > p.power_budget)
                f *= std::sqrt(p.power_budget / pw);
        }

        // Least scaling c <= 1 of a feasible precoder that keeps every rate-t cone satisfied.
        void trim_power(const BackhaulProblem &p, ComplexMatrix &f, double gamma)
        {
            const ComplexMatrix y = normalized_rows(p) * f;
            double c = 0.0;
            for (arma::uword m = 0; m < p.size(); ++m)
            {
                const double x = std::abs(y(m, m));
                double interference = 0.0;
                for (arma::uword n = 0; n < p.size(); ++n)
                    if (n != m)
                        interference += std::norm(y(m, n));
                const double den = x * x / gamma - interference;
                c = std::max(c, den > 1.0 ? 1.0 / std::sqrt(den) : 1.0);
            }
            f *= std::min(c, 1.0);
        }
    }

    ComplexMatrix build_cpu_analog(std::span<const double> angles_of_departure, std::size_t n_cpu_antennas,
                                   double spacing_ratio)
    {
        const std::size_t m_aps = angles_of_departure.size();
        if (m_aps == 0)
            throw std::invalid_argument("build_cpu_analog: no angles");
        if (m_aps > n_cpu_antennas)
            throw ConfigError("build_cpu_analog: " + std::to_string(m_aps) + " APs exceed " +
                              std::to_string(n_cpu_antennas) + " CPU antennas (one RF chain per AP)");
        ComplexMatrix f(n_cpu_antennas, m_aps);
        for (std::size_t m = 0; m < m_aps; ++m)
            f.col(m) = channel::ula_response(n_cpu_antennas, angles_of_departure[m], spacing_ratio).t();
        return f;
    }

    std::vector<ComplexRow> build_ap_combiners(std::span<const double> angles_of_arrival,
                                               std::size_t n_ap_antennas, double spacing_ratio)
    {
        if (angles_of_arrival.empty())
            throw std::invalid_argument("build_ap_combiners: no angles");
        std::vector<ComplexRow> out;
        out.reserve(angles_of_arrival.size());
        for (double a : angles_of_arrival)
            out.push_back(channel::ula_response(n_ap_antennas, a, spacing_ratio));
        return out;
    }

    ComplexMatrix effective_rows(std::span<const ComplexMatrix> channels, const ComplexMatrix &f_rf,
                                 std::span<const ComplexRow> combiners)
    {
        if (channels.size() != combiners.size())
            throw std::invalid_argument("effective_rows: channel and combiner counts differ");
        ComplexMatrix b(channels.size(), f_rf.n_cols);
        for (std::size_t m = 0; m < channels.size(); ++m)
        {
            const ComplexMatrix &h = channels[m];
            if (h.n_rows != combiners[m].n_elem || h.n_cols != f_rf.n_rows)
                throw std::invalid_argument("effective_rows: dimension mismatch at AP " + std::to_string(m));
            b.row(m) = combiners[m] * h * f_rf;
        }
        return b;
    }

    void BackhaulProblem::validate() const
    {
        if (rows.n_rows == 0 || rows.n_rows != rows.n_cols)
            throw std::invalid_argument("BackhaulProblem: effective rows must form a non-empty M x M matrix");
        if (noise_vars.n_elem != rows.n_rows)
            throw std::invalid_argument("BackhaulProblem: one noise variance per node required");
        if (!(power_budget > 0.0) || !arma::all(noise_vars > 0.0))
            throw std::invalid_argument("BackhaulProblem: power budget and noise variances must be positive");
        if (!rows.is_finite())
            throw std::invalid_argument("BackhaulProblem: non-finite effective rows");
    }

    arma::vec backhaul_sinrs(const BackhaulProblem &problem, const ComplexMatrix &f_bb)
    {
        const ComplexMatrix g = problem.rows * f_bb;
        arma::vec out(problem.size());
        for (arma::uword m = 0; m < problem.size(); ++m)
        {
            double interference = 0.0;
            for (arma::uword n = 0; n < g.n_cols; ++n)
                if (n != m)
                    interference += std::norm(g(m, n));
            out(m) = std::norm(g(m, m)) / (interference + problem.noise_vars(m));
        }
        return out;
    }

    double cone_violation(const BackhaulProblem &problem, const ComplexMatrix &f_bb, double t)
    {
        const double sg = std::sqrt(std::exp2(t) - 1.0);
        const ComplexMatrix y = normalized_rows(problem) * f_bb;
        double worst = -std::numeric_limits<double>::infinity();
        for (arma::uword m = 0; m < problem.size(); ++m)
        {
            double sq = 1.0;
            for (arma::uword n = 0; n < problem.size(); ++n)
                if (n != m)
                    sq += std::norm(y(m, n));
            worst = std::max(worst, std::sqrt(sq) - std::abs(y(m, m)) / sg);
        }
        return worst;
    }

    namespace
    {
        // Below this reciprocal condition number the stream-space recovery F = Bn^{-1} Y loses too many digits.
        constexpr double stream_space_rcond = 1e-14;

        std::optional<ComplexMatrix> solve_feasibility(const BackhaulProblem &problem, const ComplexMatrix &bn,
                                                       double t, Formulation form, const SocpOptions &options,
                                                       std::vector<SocpTraceRecord> *trace)
        {
            const double gamma = std::exp2(t) - 1.0;
            const Encoded enc = form == Formulation::stream_space ? encode_stream_space(problem, bn, gamma)
                                                                  : encode_precoder_space(problem, bn, gamma);
            const arma::uword tau = enc.program.n_vars - 1;
            const double tol = options.tolerance;
            const double power_cap = problem.power_budget * (1.0 + power_slack);

            enum class Verdict
            {
                undecided,
                feasible,
                infeasible
            } verdict = Verdict::undecided;
            ComplexMatrix found;

            auto accept = [&](const arma::vec &x, double allowed) -> bool
            {
                ComplexMatrix f = enc.decode(x);
                if (!f.is_finite())
                    return false;
                realign_phases(problem, f);
                if (power_of(f) > power_cap)
                {
                    if (allowed <= 0.0)
                        return false;
                    clamp_power(problem, f);
                }
                if (cone_violation(problem, f, t) > allowed)
                    return false;
                found = std::move(f);
                return true;
            };

            IpmOptions ipm;
            ipm.max_iterations = options.max_iterations;
            auto monitor = [&](const IpmProgress &pr)
            {
                if (trace)
                    trace->push_back({pr.iteration, pr.x(tau), pr.dual_objective, pr.gap, pr.primal_residual, pr.dual_residual});
                if (pr.x(tau) <= 0.0 && accept(pr.x, 0.0))
                {
                    verdict = Verdict::feasible;
                    return true;
                }
                if (pr.dual_residual <= certificate_dual_residual && pr.dual_objective > tol)
                {
                    verdict = Verdict::infeasible;
                    return true;
                }
                return false;
            };

            const IpmResult res = solve_cone_program(enc.program, enc.start, ipm, monitor);

            if (res.status != IpmStatus::stopped)
            {
                const bool trusted_bound = res.dual_residual <= certificate_dual_residual;
                if (res.x(tau) <= tol && accept(res.x, tol))
                    verdict = Verdict::feasible;
                else if (trusted_bound && res.dual_objective > tol)
                    verdict = Verdict::infeasible;
                else if ((res.status == IpmStatus::optimal || res.status == IpmStatus::near_optimal) &&
                         res.primal_objective > tol)
                    verdict = Verdict::infeasible;
                else
                    throw NumericalFailure("socp_feasible: solver stalled at t = " + std::to_string(t) + " (" +
                                           (res.message.empty() ? "no certificate" : res.message) + ")");
            }

            if (verdict == Verdict::infeasible)
                return std::nullopt;
            trim_power(problem, found, gamma);
            return found;
        }
    }

    std::optional<ComplexMatrix> socp_feasible(const BackhaulProblem &problem, double t,
                                               const SocpOptions &options, std::vector<SocpTraceRecord> *trace)
    {
        problem.validate();
        if (!(t > 0.0))
            throw std::invalid_argument("socp_feasible: rate target must be positive");

        const ComplexMatrix bn = normalized_rows(problem);
        if (options.formulation != Formulation::automatic)
            return solve_feasibility(problem, bn, t, options.formulation, options, trace);

        const double rc = arma::rcond(bn);
        if (!(std::isfinite(rc) && rc > stream_space_rcond))
            return solve_feasibility(problem, bn, t, Formulation::precoder_space, options, trace);
        try
        {
            return solve_feasibility(problem, bn, t, Formulation::stream_space, options, trace);
        }
        catch (const NumericalFailure &)
        {
            if (trace)
                trace->clear();
            return solve_feasibility(problem, bn, t, Formulation::precoder_space, options, trace);
        }
    }

    double bisection_upper_bound(const BackhaulProblem &problem)
    {
        problem.validate();
        double best = 0.0;
        for (arma::uword m = 0; m < problem.size(); ++m)
        {
            const double g = arma::norm(problem.rows.row(m));
            best = std::max(best, problem.power_budget * g * g / problem.noise_vars(m));
        }
        return std::log2(1.0 + best);
    }

    BackhaulSolution maxmin_bisection(const BackhaulProblem &problem, double t_min, double t_max, double eps,
                                      const SocpOptions &options)
    {
        problem.validate();
        if (!(eps > 0.0))
            throw std::invalid_argument("maxmin_bisection: eps must be positive");
        if (!(t_min >= 0.0) || !(t_max > t_min))
            throw std::invalid_argument("maxmin_bisection: need t_max > t_min >= 0");

        BackhaulSolution sol;
        const arma::uword M = problem.size();
        std::optional<ComplexMatrix> best;
        double lo = t_min;
        double hi = t_max;
        double lowest_infeasible = std::numeric_limits<double>::infinity();
        double highest_feasible = -std::numeric_limits<double>::infinity();

        auto check = [&](double t)
        {
            auto r = socp_feasible(problem, t, options);
            sol.steps.push_back({t, r.has_value()});
            if (r)
                highest_feasible = std::max(highest_feasible, t);
            else
                lowest_infeasible = std::min(lowest_infeasible, t);
            if (highest_feasible > lowest_infeasible)
                throw NumericalFailure("maxmin_bisection: feasibility is not monotone in t");
            return r;
        };

        bool lower_feasible = true;
        if (t_min > 0.0)
        {
            auto r = check(t_min);
            lower_feasible = r.has_value();
            if (r)
                best = std::move(r);
        }

        const int n_iter = std::max(0, int(std::ceil(std::log2((t_max - t_min) / eps))));
        for (int i = 0; i < n_iter && lower_feasible; ++i)
        {
            const double t = 0.5 * (lo + hi);
            auto r = check(t);
            if (r)
            {
                lo = t;
                best = std::move(r);
            }
            else
                hi = t;
            ++sol.iterations;
        }

        if (!best)
        {
            sol.degenerate = true;
            sol.t_star = 0.0;
            sol.digital_precoder.zeros(M, M);
            sol.sinrs.zeros(M);
            sol.diagnostic = lower_feasible ? "no positive rate below " + std::to_string(hi) + " is feasible"
                                            : "lower bisection bound is infeasible";
            return sol;
        }

        // Every SINR grows with a common scale factor, so spend the whole budget.
        ComplexMatrix f = std::move(*best);
        const double pw = power_of(f);
        if (pw > 0.0)
            f *= std::sqrt(problem.power_budget / pw);
        sol.digital_precoder = std::move(f);
        sol.t_star = lo;
        sol.sinrs = backhaul_sinrs(problem, sol.digital_precoder);

        const double target = std::exp2(sol.t_star - eps) - 1.0;
        if (sol.sinrs.min() < target * (1.0 - 1e-6))
            sol.diagnostic = "returned precoder falls short of the bisection target";
        return sol;
    }

    BackhaulSolution optimize_backhaul(const BackhaulInputs &in, const SocpOptions &options)
    {
        const std::size_t M = in.channels.size();
        if (M == 0 || in.aod.size() != M || in.aoa.size() != M || in.noise_vars.n_elem != M)
            throw std::invalid_argument("optimize_backhaul: inconsistent input sizes");
        const std::size_t n_a = in.channels[0].n_rows;
        const std::size_t n_c = in.channels[0].n_cols;

        ComplexMatrix f_rf = build_cpu_analog(in.aod, n_c, in.spacing_ratio);
        std::vector<ComplexRow> combiners = build_ap_combiners(in.aoa, n_a, in.spacing_ratio);

        BackhaulProblem problem;
        problem.rows = effective_rows(in.channels, f_rf, combiners);
        problem.noise_vars.set_size(M);
        for (std::size_t m = 0; m < M; ++m)
        {
            const double w = arma::norm(combiners[m]);
            problem.noise_vars(m) = w * w * in.noise_vars(m);
        }
        problem.power_budget = in.power_budget;

        BackhaulSolution sol;
        const double t_max = bisection_upper_bound(problem);
        if (t_max > 0.0)
            sol = maxmin_bisection(problem, 0.0, t_max, in.eps, options);
        else
        {
            sol.degenerate = true;
            sol.digital_precoder.zeros(M, M);
            sol.sinrs.zeros(M);
            sol.diagnostic = "all backhaul effective channels are zero";
        }
        sol.analog_precoder = std::move(f_rf);
        sol.combiners = std::move(combiners);
        return sol;
    }

    BackhaulRates backhaul_rates(const arma::vec &sinrs, double bandwidth_hz, double eta)
    {
        if (!(eta > 0.0 && eta <= 1.0))
            throw std::invalid_argument("backhaul_rates: eta must lie in (0, 1]");
        BackhaulRates r;
        r.per_node = (1.0 - eta) * bandwidth_hz * arma::log2(1.0 + sinrs);
        r.minimum = r.per_node.is_empty() ? 0.0 : r.per_node.min();
        return r;
    }

    BackhaulRates backhaul_rates(const BackhaulSolution &solution, double bandwidth_hz, double eta)
    {
        return backhaul_rates(solution.sinrs, bandwidth_hz, eta);
    }
}
