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

#include "iab/channel.hpp"
#include "iab/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace iab;
using namespace iab::channel;

namespace
{
    NetworkTopology line_topology(std::size_t n_a = 16, std::size_t n_c = 16)
    {
        NetworkTopology t;
        t.cpu_position = {0, 0};
        t.ap_positions = {{40, 0}, {0, 35}};
        t.user_positions = {{40, 185}, {100, 170}};
        t.n_ap_antennas = n_a;
        t.n_cpu_antennas = n_c;
        return t;
    }
}

TEST_CASE("path loss")
{
    // 32.4 + 20 log10(28) + 21 log10(100)
    CHECK(path_loss_db(28.0, 100.0, 2.1) == doctest::Approx(103.3431606).epsilon(1e-9));
    CHECK(path_loss_db(28.0, 1.0, 3.0) == doctest::Approx(32.4 + 20.0 * std::log10(28.0)));
    CHECK_THROWS_AS(path_loss_db(28.0, 0.0, 2.1), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(0.0, 10.0, 2.1), std::invalid_argument);
}

TEST_CASE("los probability")
{
    const double e = std::exp(-1.0);
    CHECK(los_probability(39.0) == doctest::Approx(20.0 / 39.0 * (1.0 - e) + e).epsilon(1e-12));
    CHECK(los_probability(39.0) == doctest::Approx(0.6920).epsilon(1e-3));
    CHECK(los_probability(10.0) == doctest::Approx(1.0));
    CHECK(los_probability(1e4) < 0.01);
    CHECK_THROWS(los_probability(-1.0));
}

TEST_CASE("ula response")
{
    const ComplexRow a = ula_response(8, 0.3, 0.5);
    CHECK(arma::norm(a) == doctest::Approx(1.0));
    for (arma::uword i = 0; i < 8; ++i)
    {
        const cx expect = std::polar(1.0 / std::sqrt(8.0), std::numbers::pi * i * std::sin(0.3));
        CHECK(std::abs(a(i) - expect) < 1e-14);
    }
    // Broadside is all equal phases.
    const ComplexRow b = ula_response(4, 0.0, 0.5);
    CHECK(arma::norm(b - ComplexRow(4, arma::fill::value(cx(0.5, 0.0)))) < 1e-15);
    CHECK_THROWS(ula_response(0, 0.0, 0.5));
}

TEST_CASE("backhaul channel is rank one with geometric angles")
{
    const NetworkTopology t = line_topology();
    const BackhaulAngles a0 = backhaul_angles(t, 0);
    CHECK(a0.aod == doctest::Approx(0.0));
    CHECK(a0.aoa == doctest::Approx(0.0));
    const BackhaulAngles a1 = backhaul_angles(t, 1);
    // Endfire maps into the half-open interval.
    CHECK(a1.aod < std::numbers::pi / 2);
    CHECK(a1.aoa == doctest::Approx(-std::numbers::pi / 2));

    const cx zeta(0.3, -0.4);
    const ComplexMatrix h = backhaul_channel_matrix(16, 12, 0.2, -0.5, zeta, 0.5);
    const arma::vec s = arma::svd(h);
    CHECK(s(0) == doctest::Approx(std::sqrt(16.0 * 12.0) * std::abs(zeta)));
    CHECK(s(1) < 1e-12 * s(0));
}

TEST_CASE("access channel average power")
{
    // E||h||^2 = N_A (rho 10^{-kappa_L/10} + 10^{-kappa_N/10}) for the unit-norm steering vectors.
    NetworkTopology t = line_topology(8, 8);
    ChannelParams p;
    const double d = distance(t.user_positions[0], t.ap_positions[0]);
    const double expect = 8.0 * (los_probability(d) * std::pow(10.0, -0.1 * path_loss_db(28, d, 2.1)) +
                                 std::pow(10.0, -0.1 * path_loss_db(28, d, 3.64)));
    RandomStream rng(9);
    double acc = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i)
    {
        const ComplexRow h = gen_access_channel(t, p, 0, 0, rng).h;
        acc += std::pow(arma::norm(h), 2);
    }
    CHECK(acc / n == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("los only channel is a single steering vector")
{
    NetworkTopology t = line_topology(16, 16);
    ChannelParams p;
    p.los_only = true;
    p.los_policy = LosPolicy::forced_on;
    RandomStream rng(2);
    const AccessDraw d = gen_access_channel(t, p, 1, 0, rng);
    CHECK(d.los);
    CHECK(d.nlos_aod.empty());
    const ComplexRow a = ula_response(16, d.los_aod, 0.5);
    const cx gain = arma::cdot(a, d.h) / 4.0; // sqrt(N_A) = 4
    CHECK(arma::norm(d.h - 4.0 * gain * a) < 1e-12 * arma::norm(d.h));

    p.los_policy = LosPolicy::forced_off;
    CHECK(arma::norm(gen_access_channel(t, p, 1, 0, rng).h) == 0.0);
}

TEST_CASE("realization layout and determinism")
{
    const NetworkTopology t = line_topology();
    RandomStream a(4), b(4);
    const ChannelRealization r = generate_realization(t, {}, a);
    const ChannelRealization s = generate_realization(t, {}, b);
    REQUIRE(r.access.size() == 2);
    CHECK(r.access[0].n_rows == 2);
    CHECK(r.access[0].n_cols == 16);
    CHECK(r.backhaul[1].n_rows == 16);
    CHECK(r.backhaul[1].n_cols == 16);
    CHECK(arma::approx_equal(r.access[1], s.access[1], "absdiff", 0.0));
    CHECK(arma::approx_equal(r.backhaul[0], s.backhaul[0], "absdiff", 0.0));
}

TEST_CASE("topology sampling and validation")
{
    RandomStream rng(8);
    GeometryBounds b;
    const NetworkTopology t = sample_topology(6, 8, 64, 64, 0.5, b, rng);
    CHECK(t.n_aps() == 6);
    CHECK(t.n_users() == 8);
    Point2 c{0, 0};
    for (const auto &p : t.ap_positions)
    {
        c.x += p.x / 6.0;
        c.y += p.y / 6.0;
        const double d = distance(p, t.cpu_position);
        CHECK(d >= 30.0);
        CHECK(d <= 50.0);
    }
    for (const auto &u : t.user_positions)
    {
        const double d = distance(u, c);
        CHECK(d >= 150.0);
        CHECK(d <= 200.0);
    }

    NetworkTopology bad = line_topology();
    CHECK_NOTHROW(validate(bad, b));
    bad.ap_positions[0] = {10, 0};
    CHECK_THROWS_AS(validate(bad, b), ConfigError);
}

TEST_CASE("topology parsing")
{
    const std::string good = R"({"cpu": [0, 0], "aps": [[40, 0]], "users": [[40, 170]], "n_ap_antennas": 8})";
    const NetworkTopology t = parse_topology(good);
    CHECK(t.n_aps() == 1);
    CHECK(t.n_ap_antennas == 8);
    CHECK(t.user_positions[0].y == 170.0);
    CHECK_THROWS_AS(parse_topology(R"({"cpu": [0, 0], "aps": [], "users": [], "extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_topology("not json"), ConfigError);
}
