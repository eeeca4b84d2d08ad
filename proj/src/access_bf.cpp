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

#include "iab/access_bf.hpp"
#include "iab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iab::access
{
    namespace
    {
        // Relative size below which a projected own channel counts as lost.
        constexpr double projection_floor = 1e-10;

        ComplexMatrix bd_columns(const ComplexMatrix &h, double power, double rank_tolerance)
        {
            const arma::uword k_users = h.n_rows;
            const arma::uword n = h.n_cols;
            if (k_users == 0 || n < k_users)
                throw std::invalid_argument("block diagonalization needs at least as many dimensions (" +
                                            std::to_string(n) + ") as users (" + std::to_string(k_users) + ")");
            if (!(power >= 0.0))
                throw std::invalid_argument("block diagonalization: negative power");

            ComplexMatrix w(n, k_users, arma::fill::zeros);
            for (arma::uword k = 0; k < k_users; ++k)
            {
                const double own = arma::norm(h.row(k));
                if (own == 0.0)
                    continue;

                ComplexMatrix null_basis;
                if (k_users == 1)
                    null_basis = arma::eye<ComplexMatrix>(n, n);
                else
                {
                    ComplexMatrix others(k_users - 1, n);
                    arma::uword r = 0;
                    for (arma::uword j = 0; j < k_users; ++j)
                        if (j != k)
                            others.row(r++) = h.row(j);
                    const SvdResult d = svd(others);
                    const std::size_t rank = d.rank(rank_tolerance);
                    if (rank >= n)
                        throw DegradedPrecoding(k, "block diagonalization: empty null space for user " +
                                                       std::to_string(k));
                    null_basis = d.v.cols(rank, n - 1);
                }

                const ComplexRow p = h.row(k) * null_basis;
                const double pn = arma::norm(p);
                if (!(pn > projection_floor * own))
                    throw DegradedPrecoding(k, "block diagonalization: user " + std::to_string(k) +
                                                   " has no channel left outside the other users' span");
                w.col(k) = null_basis * ComplexCol(p.t() / pn);
            }

            const double fro = arma::norm(w, "fro");
            if (fro > 0.0)
                w *= std::sqrt(power) / fro;
            return w;
        }

        void check_channels(const ComplexMatrix &channels)
        {
            if (channels.n_rows == 0 || channels.n_cols == 0)
                throw std::invalid_argument("access precoder: empty channel matrix");
            if (!channels.is_finite())
                throw NumericalFailure("access precoder: non-finite channel");
        }
    }

    ComplexCol analog_from_phases(const ComplexRow &channel_row, bool *fell_back)
    {
        const arma::uword n = channel_row.n_elem;
        if (n == 0)
            throw std::invalid_argument("analog_from_phases: empty channel");
        const double amp = 1.0 / std::sqrt(double(n));
        const double norm = arma::norm(channel_row);
        if (fell_back)
            *fell_back = !(norm > 0.0);
        ComplexCol col(n);
        if (!(norm > 0.0))
        {
            col.fill(cx(amp, 0.0));
            return col;
        }
        // w_opt = h^H / ||h||; only its phases are kept.
        for (arma::uword i = 0; i < n; ++i)
            col(i) = std::polar(amp, std::arg(std::conj(channel_row(i))));
        return col;
    }

    ComplexMatrix hybrid_analog(const ComplexMatrix &channels, std::string *diagnostic)
    {
        check_channels(channels);
        ComplexMatrix f(channels.n_cols, channels.n_rows);
        for (arma::uword k = 0; k < channels.n_rows; ++k)
        {
            bool fell_back = false;
            f.col(k) = analog_from_phases(channels.row(k), &fell_back);
            if (fell_back && diagnostic)
                *diagnostic += "user " + std::to_string(k) + " has a zero channel; analog column set to all ones. ";
        }
        return f;
    }

    ComplexMatrix bd_digital(const ComplexMatrix &effective_channels, double power, double rank_tolerance)
    {
        return bd_columns(effective_channels, power, rank_tolerance);
    }

    ComplexMatrix fd_bd_precoder(const ComplexMatrix &raw_channels, double power, double rank_tolerance)
    {
        return bd_columns(raw_channels, power, rank_tolerance);
    }

    ComplexMatrix random_analog_precoder(RandomStream &rng, std::size_t n_antennas, std::size_t k_users)
    {
        if (n_antennas == 0)
            throw std::invalid_argument("random_analog_precoder: no antennas");
        const double amp = 1.0 / std::sqrt(double(n_antennas));
        ComplexMatrix f(n_antennas, k_users);
        for (arma::uword j = 0; j < k_users; ++j)
            for (arma::uword i = 0; i < n_antennas; ++i)
                f(i, j) = std::polar(amp, rng.uniform(-std::numbers::pi, std::numbers::pi));
        return f;
    }

    AccessPrecoder hybrid_bd(const ComplexMatrix &channels, std::size_t ap, double power, double rank_tolerance)
    {
        AccessPrecoder out;
        out.ap_index = ap;
        out.analog = hybrid_analog(channels, &out.diagnostic);
        out.digital = bd_digital(channels * out.analog, power, rank_tolerance);
        return out;
    }

    AccessPrecoder random_analog_bd(const ComplexMatrix &channels, std::size_t ap, double power, RandomStream &rng,
                                    double rank_tolerance)
    {
        check_channels(channels);
        AccessPrecoder out;
        out.ap_index = ap;
        out.analog = random_analog_precoder(rng, channels.n_cols, channels.n_rows);
        out.digital = bd_digital(channels * out.analog, power, rank_tolerance);
        return out;
    }

    AccessPrecoder fully_digital_bd(const ComplexMatrix &channels, std::size_t ap, double power,
                                    double rank_tolerance)
    {
        check_channels(channels);
        AccessPrecoder out;
        out.ap_index = ap;
        out.analog = arma::eye<ComplexMatrix>(channels.n_cols, channels.n_cols);
        out.digital = fd_bd_precoder(channels, power, rank_tolerance);
        return out;
    }

    std::vector<AccessPrecoder> centralized_fd_bd(const std::vector<ComplexMatrix> &channels, double power,
                                                  double rank_tolerance)
    {
        if (channels.empty())
            throw std::invalid_argument("centralized_fd_bd: no APs");
        const arma::uword k_users = channels[0].n_rows;
        const arma::uword n_a = channels[0].n_cols;
        ComplexMatrix stacked(k_users, n_a * channels.size());
        for (std::size_t m = 0; m < channels.size(); ++m)
        {
            check_channels(channels[m]);
            if (channels[m].n_rows != k_users || channels[m].n_cols != n_a)
                throw std::invalid_argument("centralized_fd_bd: APs disagree on dimensions");
            stacked.cols(m * n_a, (m + 1) * n_a - 1) = channels[m];
        }
        ComplexMatrix w = bd_columns(stacked, 1.0, rank_tolerance);

        double worst = 0.0;
        for (std::size_t m = 0; m < channels.size(); ++m)
        {
            const double b = arma::norm(w.rows(m * n_a, (m + 1) * n_a - 1), "fro");
            worst = std::max(worst, b * b);
        }
        if (worst > 0.0)
            w *= std::sqrt(power / worst);

        std::vector<AccessPrecoder> out(channels.size());
        for (std::size_t m = 0; m < channels.size(); ++m)
        {
            out[m].ap_index = m;
            out[m].analog = arma::eye<ComplexMatrix>(n_a, n_a);
            out[m].digital = w.rows(m * n_a, (m + 1) * n_a - 1);
        }
        return out;
    }

    AccessLinkResult access_link_eval(const std::vector<ComplexMatrix> &channels,
                                      const std::vector<AccessPrecoder> &precoders, const arma::vec &noise_vars)
    {
        if (channels.empty() || channels.size() != precoders.size())
            throw std::invalid_argument("access_link_eval: need one precoder per AP");
        const arma::uword k_users = channels[0].n_rows;
        if (noise_vars.n_elem != k_users)
            throw std::invalid_argument("access_link_eval: one noise variance per user required");

        // amp(k, j): coherent sum over APs of the beam for user j as received by user k.
        ComplexMatrix amp(k_users, k_users, arma::fill::zeros);
        for (std::size_t m = 0; m < channels.size(); ++m)
        {
            const ComplexMatrix w = precoders[m].product();
            if (channels[m].n_rows != k_users || channels[m].n_cols != w.n_rows || w.n_cols != k_users)
                throw std::invalid_argument("access_link_eval: dimension mismatch at AP " + std::to_string(m));
            amp += channels[m] * w;
        }

        AccessLinkResult r;
        r.sinrs.set_size(k_users);
        r.signal.set_size(k_users);
        r.interference.set_size(k_users);
        for (arma::uword k = 0; k < k_users; ++k)
        {
            double interference = 0.0;
            for (arma::uword j = 0; j < k_users; ++j)
                if (j != k)
                    interference += std::norm(amp(k, j));
            r.signal(k) = std::norm(amp(k, k));
            r.interference(k) = interference;
            const double den = interference + noise_vars(k);
            r.sinrs(k) = den > 0.0 ? r.signal(k) / den : 0.0;
        }
        r.sum_rate_bpshz = arma::accu(arma::log2(1.0 + r.sinrs));
        return r;
    }
}
