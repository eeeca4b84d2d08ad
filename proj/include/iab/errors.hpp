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

#ifndef IAB_ERRORS_HPP
#define IAB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iab
{
    // Invalid or inconsistent scenario configuration. Maps to CLI exit code 1.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // A numerical routine failed to converge or produced an unusable result.
    class NumericalFailure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Block diagonalization could not find a useful direction for one user:
    // the user's effective channel lies in the span of the other users' channels.
    class DegradedPrecoding : public NumericalFailure
    {
    public:
        DegradedPrecoding(std::size_t user, const std::string &what)
            : NumericalFailure(what), user_(user) {}

        std::size_t user() const noexcept { return user_; }

    private:
        std::size_t user_;
    };

    // Bandwidth split requested with both capacities equal to zero.
    class UndefinedSplit : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };
}

#endif
