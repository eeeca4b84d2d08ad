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

#ifndef IAB_ACCESS_BF_HPP
#define IAB_ACCESS_BF_HPP

#include "iab/numerics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace iab::access
{
    // Precoder of one AP, W_m = analog * digital.
    // Hybrid schemes: analog is N_A x K with entries of modulus 1/sqrt(N_A), digital is K x K.
    // Fully digital schemes: analog is the N_A x N_A identity, digital is N_A x K.
    struct AccessPrecoder
    {
        ComplexMatrix analog;
        ComplexMatrix digital;
        std::size_t ap_index = 0;
        std::string diagnostic;

        ComplexMatrix product() const { return analog * digital; }
    };

    struct AccessLinkResult
    {
        arma::vec sinrs;
        double sum_rate_bpshz = 0.0; // sum_k log2(1 + SINR_k)
        arma::vec signal;            // W
        arma::vec interference;      // W
    };

    // Column with entries exp(j angle(w_opt_i)) / sqrt(N_A), w_opt = h^H / ||h||.
    // A zero row gives the all-ones column and sets *fell_back.
    ComplexCol analog_from_phases(const ComplexRow &channel_row, bool *fell_back = nullptr);

    // One column per user row of `channels` (K x N_A).
    ComplexMatrix hybrid_analog(const ComplexMatrix &channels, std::string *diagnostic = nullptr);

    // Block diagonalization on K effective rows of length n >= K. Column k lies in the null space of
    // the other users' rows and is matched to user k's projection onto it; columns have unit norm
    // before the whole matrix is scaled to ||W||_F^2 = power. A user with an all-zero row gets a zero
    // column. Throws DegradedPrecoding when a nonzero user loses its whole channel to the projection.
    ComplexMatrix bd_digital(const ComplexMatrix &effective_channels, double power,
                             double rank_tolerance = default_rank_tolerance);

    // The same construction on raw K x N_A channels; returns N_A x K.
    ComplexMatrix fd_bd_precoder(const ComplexMatrix &raw_channels, double power,
                                 double rank_tolerance = default_rank_tolerance);

    // I.i.d. uniform phases, modulus 1/sqrt(N_A).
    ComplexMatrix random_analog_precoder(RandomStream &rng, std::size_t n_antennas, std::size_t k_users);

    // Per-AP designs. `channels` is K x N_A for AP m.
    AccessPrecoder hybrid_bd(const ComplexMatrix &channels, std::size_t ap, double power,
                             double rank_tolerance = default_rank_tolerance);
    AccessPrecoder random_analog_bd(const ComplexMatrix &channels, std::size_t ap, double power, RandomStream &rng,
                                    double rank_tolerance = default_rank_tolerance);
    AccessPrecoder fully_digital_bd(const ComplexMatrix &channels, std::size_t ap, double power,
                                    double rank_tolerance = default_rank_tolerance);

    // BD on the network-wide channel [h_k1 ... h_kM]; the result is split into per-AP blocks and
    // scaled so the most loaded AP transmits exactly `power`.
    std::vector<AccessPrecoder> centralized_fd_bd(const std::vector<ComplexMatrix> &channels, double power,
                                                  double rank_tolerance = default_rank_tolerance);

    // SINR of user k from the coherent sum over APs of h_km W_m. channels[m] is K x N_A.
    AccessLinkResult access_link_eval(const std::vector<ComplexMatrix> &channels,
                                      const std::vector<AccessPrecoder> &precoders, const arma::vec &noise_vars);
}

#endif
