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

#ifndef IAB_ALLOCATION_HPP
#define IAB_ALLOCATION_HPP

#include <cstddef>
#include <cstdint>

namespace iab::allocation
{
    struct RateSummary
    {
        double c_a = 0.0;        // access capacity over the full band, bits/s
        double c_b = 0.0;        // minimum backhaul capacity over the full band, bits/s
        double eta = 0.0;        // access share of the band
        double end_to_end = 0.0; // bits/s
    };

    // Access share that equalizes eta c_a and (1 - eta) c_b. c_a = 0 < c_b gives 1.
    // Throws UndefinedSplit when both capacities are zero, std::invalid_argument when negative.
    double optimal_eta(double c_a, double c_b);

    // c_a c_b / (c_a + c_b); zero when either capacity is zero.
    double end_to_end_rate(double c_a, double c_b);

    // min(eta c_a, (1 - eta) c_b) for an arbitrary split.
    double split_rate(double c_a, double c_b, double eta);

    // optimal_eta and end_to_end_rate together.
    RateSummary summarize(double c_a, double c_b);

    enum class Scheme
    {
        centralized_fd,
        decentralized_fd,
        decentralized_hybrid
    };

    struct SignalingLoad
    {
        std::uint64_t uplink;
        std::uint64_t downlink;
    };

    // Backhaul resources spent on exchanging access-link beamforming information.
    SignalingLoad backhaul_signaling_load(Scheme scheme, std::size_t m_aps, std::size_t n_ap_antennas,
                                          std::size_t k_users);
}

#endif
