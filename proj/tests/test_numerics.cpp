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

#include "iab/errors.hpp"
#include "iab/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace iab;

namespace
{
    ComplexMatrix random_matrix(RandomStream &rng, arma::uword r, arma::uword c)
    {
        ComplexMatrix a(r, c);
        for (auto &v : a)
            v = sample_cn(rng, 1.0);
        return a;
    }
}

TEST_CASE("svd reconstructs and is unitary")
{
    RandomStream rng(11);
    for (auto [r, c] : {std::pair{3u, 5u}, std::pair{5u, 3u}, std::pair{4u, 4u}})
    {
        const ComplexMatrix a = random_matrix(rng, r, c);
        const SvdResult d = svd(a);
        REQUIRE(d.u.n_rows == r);
        REQUIRE(d.u.n_cols == r);
        REQUIRE(d.v.n_rows == c);
        REQUIRE(d.v.n_cols == c);
        ComplexMatrix sigma(r, c, arma::fill::zeros);
        for (arma::uword i = 0; i < d.s.n_elem; ++i)
            sigma(i, i) = d.s(i);
        CHECK(arma::norm(a - d.u * sigma * d.v.t(), "fro") < 1e-12 * arma::norm(a, "fro"));
        CHECK(arma::norm(d.u.t() * d.u - arma::eye<ComplexMatrix>(r, r), "fro") < 1e-12);
        CHECK(arma::norm(d.v.t() * d.v - arma::eye<ComplexMatrix>(c, c), "fro") < 1e-12);
        for (arma::uword i = 1; i < d.s.n_elem; ++i)
            CHECK(d.s(i) <= d.s(i - 1));
    }
}

TEST_CASE("svd phase convention is deterministic")
{
    RandomStream rng(12);
    const ComplexMatrix a = random_matrix(rng, 3, 6);
    const SvdResult d = svd(a);
    for (arma::uword j = 0; j < d.u.n_cols; ++j)
    {
        const arma::uword i = arma::index_max(arma::abs(d.u.col(j)));
        CHECK(std::abs(d.u(i, j).imag()) < 1e-14);
        CHECK(d.u(i, j).real() >= 0.0);
    }
    // A phase-rotated input gives the same row-space factors up to the rotation carried by U.
    const SvdResult e = svd(ComplexMatrix(a * std::polar(1.0, 0.7)));
    CHECK(arma::norm(arma::abs(e.v.head_cols(3)) - arma::abs(d.v.head_cols(3)), "fro") < 1e-10);
}

TEST_CASE("svd rank and errors")
{
    ComplexMatrix a(3, 4, arma::fill::zeros);
    a(0, 0) = 1.0;
    a(1, 1) = 1e-12;
    CHECK(svd(a).rank() == 1);
    CHECK(svd(a).rank(1e-13) == 2);
    CHECK(svd(ComplexMatrix(2, 2, arma::fill::zeros)).rank() == 0);
    CHECK_THROWS_AS(svd(ComplexMatrix()), std::invalid_argument);
    a(2, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(a), NumericalFailure);
}

TEST_CASE("complex gaussian statistics")
{
    RandomStream rng(5);
    const int n = 200000;
    const double var = 2.5;
    double re = 0, im = 0, p = 0, re2 = 0;
    for (int i = 0; i < n; ++i)
    {
        const cx v = sample_cn(rng, var);
        re += v.real();
        im += v.imag();
        re2 += v.real() * v.real();
        p += std::norm(v);
    }
    CHECK(std::abs(re / n) < 0.02);
    CHECK(std::abs(im / n) < 0.02);
    CHECK(p / n == doctest::Approx(var).epsilon(0.02));
    CHECK(re2 / n == doctest::Approx(var / 2).epsilon(0.02));
    CHECK(sample_cn(rng, 0.0) == cx(0.0, 0.0));
    CHECK_THROWS(sample_cn(rng, -1.0));
}

TEST_CASE("derived streams")
{
    RandomStream a = RandomStream::derive(3, 4, 0);
    RandomStream b = RandomStream::derive(3, 4, 0);
    RandomStream c = RandomStream::derive(3, 4, 1);
    RandomStream d = RandomStream::derive(3, 5, 0);
    const double va = a.normal();
    CHECK(va == b.normal());
    CHECK(va != c.normal());
    CHECK(va != d.normal());
}

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watt(0.0) == doctest::Approx(1e-3));
    CHECK(db_to_linear(20.0) == doctest::Approx(100.0));
}
