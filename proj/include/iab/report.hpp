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

#ifndef IAB_REPORT_HPP
#define IAB_REPORT_HPP

#include "iab/experiment.hpp"

#include <ostream>
#include <string>

namespace iab::harness
{
    // Reals with 9 significant digits; NaN prints as "nan".
    std::string format_real(double v);

    // Header plus one line per row:
    // axis_value,mean_c_a,se_c_a,mean_c_b,se_c_b,mean_eta,mean_end_to_end,se_end_to_end,failures
    void write_summary_csv(std::ostream &out, const SweepTable &table);

    // One line per trial: axis_value,trial,failed,c_a,c_b,eta,end_to_end,t_star,error
    void write_trials_csv(std::ostream &out, const SweepTable &table, const std::vector<double> &values);
}

#endif
