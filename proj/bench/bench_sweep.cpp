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

// Serial reference path against the OpenMP trial loop.

#include "iab/experiment.hpp"

#include <benchmark/benchmark.h>

namespace
{
    iab::harness::ScenarioConfig bench_config()
    {
        iab::harness::ScenarioConfig c;
        c.m_aps = 4;
        c.k_users = 4;
        c.n_a = 32;
        c.n_c = 32;
        c.trials = 8;
        return c;
    }

    void BM_SweepSerial(benchmark::State &state)
    {
        const auto c = bench_config();
        for (auto _ : state)
            benchmark::DoNotOptimize(iab::harness::run_scenario(c, iab::harness::Execution::serial));
    }

    void BM_SweepParallel(benchmark::State &state)
    {
        const auto c = bench_config();
        for (auto _ : state)
            benchmark::DoNotOptimize(iab::harness::run_scenario(c, iab::harness::Execution::parallel));
    }
}

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
