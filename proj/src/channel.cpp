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

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace iab::channel
{
    namespace
    {
        constexpr double pi = std::numbers::pi;
        constexpr double slack = 1e-9;

        bool in_range(double d, const DistanceRange &r)
        {
            return d >= r.min_m - slack && d <= r.max_m + slack;
        }

        Point2 polar(const Point2 &center, double radius, double theta)
        {
            return {center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)};
        }

        double annulus_radius(RandomStream &rng, double lo, double hi)
        {
            return std::sqrt(rng.uniform(lo * lo, hi * hi));
        }

        // Map asin output onto [-pi/2, pi/2).
        double half_open(double angle)
        {
            if (angle >= pi / 2.0)
                return std::nextafter(pi / 2.0, 0.0);
            return angle;
        }

        Point2 read_point(const nlohmann::json &j, const char *what)
        {
            if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
                throw ConfigError(std::string("topology: ") + what + " must be [x, y]");
            return {j[0].get<double>(), j[1].get<double>()};
        }
    }

    double distance(const Point2 &a, const Point2 &b)
    {
        return std::hypot(a.x - b.x, a.y - b.y);
    }

    void validate(const NetworkTopology &topology, const GeometryBounds &bounds)
    {
        if (topology.n_ap_antennas < 1 || topology.n_cpu_antennas < 1)
            throw ConfigError("topology: antenna counts must be at least 1");
        if (!(topology.element_spacing_ratio > 0.0))
            throw ConfigError("topology: element spacing ratio must be positive");
        if (topology.ap_positions.empty() || topology.user_positions.empty())
            throw ConfigError("topology: needs at least one AP and one user");

        for (std::size_t m = 0; m < topology.n_aps(); ++m)
        {
            double d = distance(topology.ap_positions[m], topology.cpu_position);
            if (!in_range(d, bounds.ap_cpu))
                throw ConfigError("topology: AP " + std::to_string(m) + " is " + std::to_string(d) +
                                  " m from the CPU, outside the configured range");
        }
        for (std::size_t k = 0; k < topology.n_users(); ++k)
            for (std::size_t m = 0; m < topology.n_aps(); ++m)
            {
                double d = distance(topology.user_positions[k], topology.ap_positions[m]);
                if (!in_range(d, bounds.user_ap))
                    throw ConfigError("topology: user " + std::to_string(k) + " is " + std::to_string(d) +
                                      " m from AP " + std::to_string(m) + ", outside the configured range");
            }
    }

    NetworkTopology sample_topology(std::size_t n_aps, std::size_t n_users,
                                    std::size_t n_ap_antennas, std::size_t n_cpu_antennas,
                                    double element_spacing_ratio, const GeometryBounds &bounds,
                                    RandomStream &rng)
    {
        if (n_aps == 0 || n_users == 0)
            throw ConfigError("sample_topology: need at least one AP and one user");

        NetworkTopology t;
        t.n_ap_antennas = n_ap_antennas;
        t.n_cpu_antennas = n_cpu_antennas;
        t.element_spacing_ratio = element_spacing_ratio;
        t.cpu_position = {0.0, 0.0};

        Point2 centroid{0.0, 0.0};
        for (std::size_t m = 0; m < n_aps; ++m)
        {
            double r = annulus_radius(rng, bounds.ap_cpu.min_m, bounds.ap_cpu.max_m);
            double theta = rng.uniform(0.0, 2.0 * pi);
            Point2 p = polar(t.cpu_position, r, theta);
            t.ap_positions.push_back(p);
            centroid.x += p.x / double(n_aps);
            centroid.y += p.y / double(n_aps);
        }

        // Users sit on the user-AP annulus around the AP centroid. Requiring every AP distance inside the
        // range is infeasible once the APs spread wider than the range itself, so it is not enforced here.
        for (std::size_t k = 0; k < n_users; ++k)
        {
            double r = annulus_radius(rng, bounds.user_ap.min_m, bounds.user_ap.max_m);
            t.user_positions.push_back(polar(centroid, r, rng.uniform(0.0, 2.0 * pi)));
        }
        return t;
    }

    NetworkTopology parse_topology(const std::string &json_text)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(json_text);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("topology: ") + e.what());
        }
        if (!j.is_object())
            throw ConfigError("topology: top level must be an object");

        static const char *known[] = {"cpu", "aps", "users", "n_ap_antennas", "n_cpu_antennas",
                                      "element_spacing_ratio"};
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            bool ok = false;
            for (const char *k : known)
                ok = ok || it.key() == k;
            if (!ok)
                throw ConfigError("topology: unknown key '" + it.key() + "'");
        }
        for (const char *required : {"cpu", "aps", "users"})
            if (!j.contains(required))
                throw ConfigError(std::string("topology: missing '") + required + "'");

        NetworkTopology t;
        t.cpu_position = read_point(j["cpu"], "cpu");
        for (const auto &p : j["aps"])
            t.ap_positions.push_back(read_point(p, "aps entry"));
        for (const auto &p : j["users"])
            t.user_positions.push_back(read_point(p, "users entry"));
        try
        {
            t.n_ap_antennas = j.value("n_ap_antennas", std::size_t{64});
            t.n_cpu_antennas = j.value("n_cpu_antennas", std::size_t{64});
            t.element_spacing_ratio = j.value("element_spacing_ratio", 0.5);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("topology: ") + e.what());
        }
        return t;
    }

    NetworkTopology load_topology(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("topology: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_topology(ss.str());
    }

    void ChannelParams::validate() const
    {
        if (!(carrier_ghz > 0.0))
            throw ConfigError("channel: carrier frequency must be positive");
        if (!(alpha_los > 0.0) || !(alpha_nlos > 0.0))
            throw ConfigError("channel: path-loss exponents must be positive");
    }

    ComplexRow ula_response(std::size_t n, double angle, double spacing_ratio)
    {
        if (n == 0)
            throw std::invalid_argument("ula_response: n must be at least 1");
        ComplexRow a(n);
        const double phase_step = 2.0 * pi * spacing_ratio * std::sin(angle);
        const double scale = 1.0 / std::sqrt(double(n));
        for (std::size_t i = 0; i < n; ++i)
            a(i) = std::polar(scale, phase_step * double(i));
        return a;
    }

    double path_loss_db(double carrier_ghz, double distance_m, double alpha)
    {
        if (!(carrier_ghz > 0.0))
            throw std::invalid_argument("path_loss_db: carrier frequency must be positive");
        if (!(distance_m > 0.0))
            throw std::invalid_argument("path_loss_db: distance must be positive");
        return 32.4 + 20.0 * std::log10(carrier_ghz) + 10.0 * alpha * std::log10(distance_m);
    }

    double los_probability(double distance_m)
    {
        if (!(distance_m > 0.0))
            throw std::invalid_argument("los_probability: distance must be positive");
        const double e = std::exp(-distance_m / 39.0);
        return std::min(20.0 / distance_m, 1.0) * (1.0 - e) + e;
    }

    double draw_angle(RandomStream &rng)
    {
        return rng.uniform(-pi / 2.0, pi / 2.0);
    }

    AccessDraw gen_access_channel(const NetworkTopology &topology, const ChannelParams &params,
                                  std::size_t user, std::size_t ap, RandomStream &rng)
    {
        const std::size_t n = topology.n_ap_antennas;
        const double d = distance(topology.user_positions.at(user), topology.ap_positions.at(ap));
        const double spacing = topology.element_spacing_ratio;

        AccessDraw out;
        out.h.zeros(n);

        switch (params.los_policy)
        {
        case LosPolicy::probabilistic:
            out.los = rng.bernoulli(los_probability(d));
            break;
        case LosPolicy::forced_on:
            out.los = true;
            break;
        case LosPolicy::forced_off:
            out.los = false;
            break;
        }

        if (out.los)
        {
            const double var = std::pow(10.0, -0.1 * path_loss_db(params.carrier_ghz, d, params.alpha_los));
            const cx gain = sample_cn(rng, var);
            out.los_aod = draw_angle(rng);
            out.h += std::sqrt(double(n)) * gain * ula_response(n, out.los_aod, spacing);
        }

        const std::size_t paths = params.los_only ? 0 : params.n_nlos_paths;
        if (paths > 0)
        {
            const double var = std::pow(10.0, -0.1 * path_loss_db(params.carrier_ghz, d, params.alpha_nlos));
            const double amp = std::sqrt(double(n) / double(paths));
            for (std::size_t l = 0; l < paths; ++l)
            {
                const cx gain = sample_cn(rng, var);
                const double aod = draw_angle(rng);
                out.nlos_aod.push_back(aod);
                out.h += amp * gain * ula_response(n, aod, spacing);
            }
        }
        return out;
    }

    ComplexMatrix backhaul_channel_matrix(std::size_t n_ap_antennas, std::size_t n_cpu_antennas,
                                          double aoa, double aod, cx zeta, double spacing_ratio)
    {
        const ComplexRow a_ap = ula_response(n_ap_antennas, aoa, spacing_ratio);
        const ComplexRow a_cpu = ula_response(n_cpu_antennas, aod, spacing_ratio);
        const double scale = std::sqrt(double(n_cpu_antennas) * double(n_ap_antennas));
        return (scale * zeta) * (a_ap.t() * a_cpu); // .t() is the conjugate transpose
    }

    BackhaulAngles backhaul_angles(const NetworkTopology &topology, std::size_t ap)
    {
        const Point2 &p = topology.ap_positions.at(ap);
        const double d = distance(p, topology.cpu_position);
        if (!(d > 0.0))
            throw ConfigError("topology: AP co-located with the CPU");
        const double s = (p.y - topology.cpu_position.y) / d;
        const double aod = half_open(std::asin(std::clamp(s, -1.0, 1.0)));
        const double aoa = half_open(std::asin(std::clamp(-s, -1.0, 1.0)));
        return {aod, aoa};
    }

    BackhaulDraw gen_backhaul_channel(const NetworkTopology &topology, const ChannelParams &params,
                                      std::size_t ap, RandomStream &rng)
    {
        const double d = distance(topology.ap_positions.at(ap), topology.cpu_position);
        const double var = std::pow(10.0, -0.1 * path_loss_db(params.carrier_ghz, d, params.alpha_los));
        const BackhaulAngles angles = backhaul_angles(topology, ap);

        BackhaulDraw out;
        out.zeta = sample_cn(rng, var);
        out.aod = angles.aod;
        out.aoa = angles.aoa;
        out.h = backhaul_channel_matrix(topology.n_ap_antennas, topology.n_cpu_antennas, out.aoa, out.aod,
                                        out.zeta, topology.element_spacing_ratio);
        return out;
    }

    ChannelRealization generate_realization(const NetworkTopology &topology, const ChannelParams &params,
                                            RandomStream &rng)
    {
        params.validate();
        const std::size_t m_aps = topology.n_aps();
        const std::size_t k_users = topology.n_users();

        ChannelRealization r;
        r.n_users = k_users;
        r.n_aps = m_aps;
        r.access.assign(m_aps, ComplexMatrix(k_users, topology.n_ap_antennas, arma::fill::zeros));
        r.los_flags.assign(k_users * m_aps, 0);
        r.access_los_aod.assign(k_users * m_aps, 0.0);
        r.access_nlos_aod.assign(k_users * m_aps, {});

        for (std::size_t m = 0; m < m_aps; ++m)
            for (std::size_t k = 0; k < k_users; ++k)
            {
                AccessDraw draw = gen_access_channel(topology, params, k, m, rng);
                r.access[m].row(k) = draw.h;
                r.los_flags[k * m_aps + m] = draw.los ? 1 : 0;
                r.access_los_aod[k * m_aps + m] = draw.los ? draw.los_aod : 0.0;
                r.access_nlos_aod[k * m_aps + m] = std::move(draw.nlos_aod);
            }

        for (std::size_t m = 0; m < m_aps; ++m)
        {
            BackhaulDraw draw = gen_backhaul_channel(topology, params, m, rng);
            r.backhaul.push_back(std::move(draw.h));
            r.backhaul_aod.push_back(draw.aod);
            r.backhaul_aoa.push_back(draw.aoa);
        }
        return r;
    }
}
