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

#include "iab/allocation.hpp"
#include "iab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iab::allocation
{
    namespace
    {
        void check(double c_a, double c_b)
        {
            if (!(c_a >= 0.0) || !(c_b >= 0.0))
                throw std::invalid_argument("capacities must be nonnegative");
        }
    }

    double optimal_eta(double c_a, double c_b)
    {
        check(c_a, c_b);
        if (c_a == 0.0 && c_b == 0.0)
            throw UndefinedSplit("optimal_eta: both capacities are zero");
        if (std::isinf(c_b))
            return 1.0;
        return c_b / (c_a + c_b);
    }

    double end_to_end_rate(double c_a, double c_b)
    {
        check(c_a, c_b);
        if (c_a == 0.0 || c_b == 0.0)
            return 0.0;
        if (std::isinf(c_b))
            return c_a;
        if (std::isinf(c_a))
            return c_b;
        return c_a * c_b / (c_a + c_b);
    }

    double split_rate(double c_a, double c_b, double eta)
    {
        check(c_a, c_b);
        if (!(eta >= 0.0 && eta <= 1.0))
            throw std::invalid_argument("split_rate: eta must lie in [0, 1]");
        return std::min(eta * c_a, (1.0 - eta) * c_b);
    }

    RateSummary summarize(double c_a, double c_b)
    {
        RateSummary r;
        r.c_a = c_a;
        r.c_b = c_b;
        r.eta = optimal_eta(c_a, c_b);
        r.end_to_end = end_to_end_rate(c_a, c_b);
        return r;
    }

    SignalingLoad backhaul_signaling_load(Scheme scheme, std::size_t m_aps, std::size_t n_ap_antennas,
                                          std::size_t k_users)
    {
        if (m_aps == 0 || n_ap_antennas == 0 || k_users == 0)
            throw std::invalid_argument("backhaul_signaling_load: counts must be positive");
        const std::uint64_t m = m_aps, n = n_ap_antennas, k = k_users;
        switch (scheme)
        {
        case Scheme::centralized_fd:
            return {m * n * k, 1 + m * n * k};
        case Scheme::decentralized_fd:
        case Scheme::decentralized_hybrid:
            return {2 * m * k, 1};
        }
        throw std::invalid_argument("backhaul_signaling_load: unknown scheme");
    }
}
