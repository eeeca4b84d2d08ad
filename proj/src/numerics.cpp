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

#include "iab/numerics.hpp"
#include "iab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iab
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ULL;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            return x ^ (x >> 31);
        }

        // Rotate a column so its largest-magnitude entry becomes real and nonnegative.
        // Returns the applied unit-modulus factor.
        cx phase_fix(ComplexMatrix &m, arma::uword col)
        {
            arma::uword best = 0;
            double best_abs = -1.0;
            for (arma::uword i = 0; i < m.n_rows; ++i)
            {
                double a = std::abs(m(i, col));
                if (a > best_abs)
                {
                    best_abs = a;
                    best = i;
                }
            }
            if (best_abs <= 0.0)
                return cx(1.0, 0.0);
            cx rot = std::conj(m(best, col)) / best_abs;
            m.col(col) *= rot;
            m(best, col) = cx(best_abs, 0.0);
            return rot;
        }
    }

    std::size_t SvdResult::rank(double tolerance) const
    {
        if (s.is_empty() || s(0) <= 0.0)
            return 0;
        double cut = tolerance * s(0);
        std::size_t r = 0;
        for (arma::uword i = 0; i < s.n_elem; ++i)
            if (s(i) > cut)
                ++r;
        return r;
    }

    SvdResult svd(const ComplexMatrix &a)
    {
        if (a.is_empty())
            throw std::invalid_argument("svd: empty matrix");
        if (!all_finite(a))
            throw NumericalFailure("svd: non-finite input");

        SvdResult out;
        if (!arma::svd(out.u, out.s, out.v, a, "std"))
            throw NumericalFailure("svd: LAPACK did not converge");

        const arma::uword k = out.s.n_elem;
        for (arma::uword i = 0; i < k; ++i)
        {
            cx rot = phase_fix(out.u, i);
            out.v.col(i) *= rot;
        }
        for (arma::uword i = k; i < out.u.n_cols; ++i)
            phase_fix(out.u, i);
        for (arma::uword i = k; i < out.v.n_cols; ++i)
            phase_fix(out.v, i);
        return out;
    }

    bool all_finite(const ComplexMatrix &a)
    {
        return a.is_finite();
    }

    RandomStream RandomStream::derive(std::uint64_t seed, std::uint64_t trial, std::uint64_t purpose)
    {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ splitmix64(trial + 0x632BE59BD9B4E019ULL));
        h = splitmix64(h ^ splitmix64(purpose + 0x85157AF5ULL));
        return RandomStream(h);
    }

    double RandomStream::uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double RandomStream::normal()
    {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    bool RandomStream::bernoulli(double p)
    {
        return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(engine_);
    }

    cx sample_cn(RandomStream &rng, double variance)
    {
        if (!(variance >= 0.0))
            throw std::invalid_argument("sample_cn: variance must be nonnegative");
        if (variance == 0.0)
            return cx(0.0, 0.0);
        const double sd = std::sqrt(variance / 2.0);
        double re = rng.normal();
        double im = rng.normal();
        return cx(sd * re, sd * im);
    }

    double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}
