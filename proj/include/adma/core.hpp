// SPDX-License-Identifier: Apache-2.0
//
// adma-sim: link-level simulator for mmWave angle-division multiple access
// Copyright (C) 2026 The adma-sim authors
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

#ifndef ADMA_CORE_HPP
#define ADMA_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace adma
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;

    inline constexpr double pi = std::numbers::pi;

    // Random stream used everywhere a draw is needed. All generation is a pure
    // function of the seed this engine was constructed with.
    using Rng = std::mt19937_64;

    // Raised when a Gram matrix is (numerically) singular. Carries the most
    // correlated pair of rows, which is almost always the culprit.
    class SingularGramError : public std::runtime_error
    {
    public:
        SingularGramError(std::size_t first, std::size_t second, double condition)
            : std::runtime_error("singular Gram matrix: users " + std::to_string(first) + " and " +
                                 std::to_string(second) + " are (nearly) collinear, condition estimate " +
                                 std::to_string(condition)),
              first_(first), second_(second), condition_(condition)
        {
        }

        std::size_t first_user() const noexcept { return first_; }
        std::size_t second_user() const noexcept { return second_; }
        double condition() const noexcept { return condition_; }

    private:
        std::size_t first_;
        std::size_t second_;
        double condition_;
    };

    // splitmix64 finaliser
    constexpr std::uint64_t mix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Child seed for an independent stream identified by an ordered tuple of keys.
    constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept
    {
        std::uint64_t h = mix64(master);
        for (std::uint64_t k : keys)
            h = mix64(h ^ mix64(k + 0x632BE59BD9B4E019ULL));
        return h;
    }

    inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace adma

#endif
