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

#ifndef IAB_NUMERICS_HPP
#define IAB_NUMERICS_HPP

#include <armadillo>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

namespace iab
{
    using cx = std::complex<double>;
    using ComplexMatrix = arma::cx_mat;
    using ComplexRow = arma::cx_rowvec;
    using ComplexCol = arma::cx_colvec;

    // Singular values below this fraction of the largest one count as zero.
    inline constexpr double default_rank_tolerance = 1e-10;

    // Full singular value decomposition A = U * diag(S) * V^H.
    // U is rows x rows, V is cols x cols, S has min(rows, cols) entries in descending order.
    // Column phases are fixed: for every paired singular vector the largest-magnitude entry of
    // the U column is real and nonnegative; unpaired columns of U or V follow the same rule on
    // their own entries.
    struct SvdResult
    {
        ComplexMatrix u;
        arma::vec s;
        ComplexMatrix v;

        // Number of singular values above tolerance * s[0]. Zero for an all-zero matrix.
        std::size_t rank(double tolerance = default_rank_tolerance) const;
    };

    // Throws std::invalid_argument for an empty matrix and NumericalFailure when LAPACK
    // does not converge or the input holds non-finite entries.
    SvdResult svd(const ComplexMatrix &a);

    // True when no entry is NaN or Inf.
    bool all_finite(const ComplexMatrix &a);

    // Per-trial random source. Substreams are derived from (seed, trial, purpose) through a
    // SplitMix64 mix so that trials are independent of execution order.
    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

        static RandomStream derive(std::uint64_t seed, std::uint64_t trial, std::uint64_t purpose);

        double uniform(double lo, double hi);
        double normal();
        bool bernoulli(double p);

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
    };

    // Circularly symmetric complex Gaussian: real and imaginary parts independent N(0, variance/2).
    cx sample_cn(RandomStream &rng, double variance);

    // Unit conversions at the configuration boundary.
    double dbm_to_watt(double dbm);
    double db_to_linear(double db);
}

#endif
