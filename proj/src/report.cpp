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

#include "iab/report.hpp"

#include <cmath>
#include <cstdio>

namespace iab::harness
{
    std::string format_real(double v)
    {
        if (std::isnan(v))
            return "nan";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return buf;
    }

    void write_summary_csv(std::ostream &out, const SweepTable &table)
    {
        out << "axis_value,mean_c_a,se_c_a,mean_c_b,se_c_b,mean_eta,mean_end_to_end,se_end_to_end,failures\n";
        for (const auto &r : table.rows)
        {
            out << (r.axis_value ? format_real(*r.axis_value) : std::string()) << ',' << format_real(r.mean_c_a)
                << ',' << format_real(r.se_c_a) << ',' << format_real(r.mean_c_b) << ',' << format_real(r.se_c_b)
                << ',' << format_real(r.mean_eta) << ',' << format_real(r.mean_end_to_end) << ','
                << format_real(r.se_end_to_end) << ',' << r.failures << '\n';
        }
    }

    void write_trials_csv(std::ostream &out, const SweepTable &table, const std::vector<double> &values)
    {
        out << "axis_value,trial,failed,c_a,c_b,eta,end_to_end,t_star,error\n";
        for (std::size_t i = 0; i < table.trials.size(); ++i)
        {
            const std::string axis = i < values.size() && table.axis != SweepAxis::eta_grid ? format_real(values[i])
                                                                                             : std::string();
            for (const auto &t : table.trials[i])
            {
                std::string err = t.error;
                for (char &ch : err)
                    if (ch == ',' || ch == '\n' || ch == '"')
                        ch = ' ';
                out << axis << ',' << t.trial_index << ',' << (t.failed ? 1 : 0) << ',' << format_real(t.c_a) << ','
                    << format_real(t.c_b) << ',' << format_real(t.eta) << ',' << format_real(t.end_to_end) << ','
                    << format_real(t.t_star) << ',' << err << '\n';
            }
        }
    }
}
