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

#ifndef IAB_CHANNEL_HPP
#define IAB_CHANNEL_HPP

#include "iab/numerics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace iab::channel
{
    struct Point2
    {
        double x = 0.0; // m
        double y = 0.0; // m
    };

    double distance(const Point2 &a, const Point2 &b);

    struct DistanceRange
    {
        double min_m;
        double max_m;
    };

    // Deployment distance bounds (defaults: AP-CPU 30..50 m, user-AP 150..200 m).
    struct GeometryBounds
    {
        DistanceRange ap_cpu{30.0, 50.0};
        DistanceRange user_ap{150.0, 200.0};
    };

    // Geometric scenario. All arrays are ULAs with their axis along y, broadside along +x.
    struct NetworkTopology
    {
        std::vector<Point2> ap_positions;
        Point2 cpu_position;
        std::vector<Point2> user_positions;
        std::size_t n_ap_antennas = 64;
        std::size_t n_cpu_antennas = 64;
        double element_spacing_ratio = 0.5; // d_A / lambda

        std::size_t n_aps() const { return ap_positions.size(); }
        std::size_t n_users() const { return user_positions.size(); }
    };

    // Throws ConfigError when any distance or antenna count violates the bounds.
    void validate(const NetworkTopology &topology, const GeometryBounds &bounds);

    // APs are area-uniform on the AP-CPU annulus around the CPU; users are area-uniform on the
    // user-AP annulus around the AP centroid. Individual user-AP distances may leave the range by
    // up to the AP spread around the centroid; validate() is meant for loaded topologies.
    NetworkTopology sample_topology(std::size_t n_aps, std::size_t n_users,
                                    std::size_t n_ap_antennas, std::size_t n_cpu_antennas,
                                    double element_spacing_ratio, const GeometryBounds &bounds,
                                    RandomStream &rng);

    // JSON topology file:
    //   { "cpu": [x, y], "aps": [[x, y], ...], "users": [[x, y], ...],
    //     "n_ap_antennas": 64, "n_cpu_antennas": 64, "element_spacing_ratio": 0.5 }
    NetworkTopology load_topology(const std::string &path);
    NetworkTopology parse_topology(const std::string &json_text);

    enum class LosPolicy
    {
        probabilistic, // Bernoulli(rho(d)) per (user, AP)
        forced_on,
        forced_off
    };

    struct ChannelParams
    {
        double carrier_ghz = 28.0;
        double alpha_los = 2.1;
        double alpha_nlos = 3.64;
        std::size_t n_nlos_paths = 5;
        bool los_only = false; // drop every NLOS path
        LosPolicy los_policy = LosPolicy::probabilistic;

        void validate() const;
    };

    // Normalized ULA response, entry i = exp(j 2 pi spacing i sin(angle)) / sqrt(n).
    ComplexRow ula_response(std::size_t n, double angle, double spacing_ratio);

    // 32.4 + 20 log10(f_c) + 10 alpha log10(d), in dB.
    double path_loss_db(double carrier_ghz, double distance_m, double alpha);

    // UMi line-of-sight probability.
    double los_probability(double distance_m);

    // Angle uniform on [-pi/2, pi/2).
    double draw_angle(RandomStream &rng);

    struct AccessDraw
    {
        ComplexRow h;                   // 1 x N_A
        bool los = false;
        double los_aod = 0.0;           // meaningful only when los is set
        std::vector<double> nlos_aod;
    };

    // One access channel h_{k,m} between AP m and user k.
    AccessDraw gen_access_channel(const NetworkTopology &topology, const ChannelParams &params,
                                  std::size_t user, std::size_t ap, RandomStream &rng);

    // sqrt(N_C N_A) * zeta * a_A(aoa)^H * a_C(aod), an N_A x N_C rank-one matrix.
    ComplexMatrix backhaul_channel_matrix(std::size_t n_ap_antennas, std::size_t n_cpu_antennas,
                                          double aoa, double aod, cx zeta, double spacing_ratio);

    // Departure angle at the CPU array and arrival angle at the AP array, from geometry.
    struct BackhaulAngles
    {
        double aod;
        double aoa;
    };
    BackhaulAngles backhaul_angles(const NetworkTopology &topology, std::size_t ap);

    struct BackhaulDraw
    {
        ComplexMatrix h; // N_A x N_C
        cx zeta;
        double aod;
        double aoa;
    };

    // LOS backhaul channel of AP m; the gain uses the LOS path-loss exponent.
    BackhaulDraw gen_backhaul_channel(const NetworkTopology &topology, const ChannelParams &params,
                                      std::size_t ap, RandomStream &rng);

    struct ChannelRealization
    {
        std::size_t n_users = 0;
        std::size_t n_aps = 0;
        // access[m] is K x N_A; row k is h_{k,m}.
        std::vector<ComplexMatrix> access;
        // backhaul[m] is N_A x N_C.
        std::vector<ComplexMatrix> backhaul;
        std::vector<unsigned char> los_flags;       // k * M + m
        std::vector<double> access_los_aod;         // k * M + m, 0 where no LOS path
        std::vector<std::vector<double>> access_nlos_aod; // k * M + m
        std::vector<double> backhaul_aod;
        std::vector<double> backhaul_aoa;

        ComplexRow access_row(std::size_t user, std::size_t ap) const { return access[ap].row(user); }
        bool los(std::size_t user, std::size_t ap) const { return los_flags[user * n_aps + ap] != 0; }
    };

    // Draw order: all access channels (AP-major, then user), then all backhaul channels.
    ChannelRealization generate_realization(const NetworkTopology &topology, const ChannelParams &params,
                                            RandomStream &rng);
}

#endif
