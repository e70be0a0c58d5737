// SPDX-License-Identifier: Apache-2.0
//
// fapt - fluid antenna port prediction toolkit
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

#ifndef FAPT_RNG_HPP
#define FAPT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fapt
{
    // Mixes two 64-bit values into a new stream seed. Used to derive independent
    // substreams, e.g. per sample or per parameter, so that results do not depend
    // on generation order or thread count.
    inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
    {
        std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c)
    {
        return mix_seed(mix_seed(a, b), c);
    }

    // SplitMix64 generator. Hand-rolled so that draws are identical across
    // platforms and standard library versions; all stochastic behaviour in the
    // toolkit goes through this class.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : state_(seed) {}

        std::uint64_t next_u64()
        {
            std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            return z ^ (z >> 31);
        }

        // Uniform in [0, 1) with 53 random bits.
        double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

        // Box-Muller; draws two uniforms per call, no cached spare.
        double normal(double mu = 0.0, double sigma = 1.0)
        {
            double u1 = 1.0 - uniform01(); // (0, 1]
            double u2 = uniform01();
            double r = std::sqrt(-2.0 * std::log(u1));
            return mu + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
        }

        double exponential(double mean) { return -mean * std::log(1.0 - uniform01()); }

        // Uniform integer in [0, n). Multiply-shift; bias is below 2^-64 per draw.
        std::uint64_t uniform_int(std::uint64_t n)
        {
            return static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
        }

    private:
        std::uint64_t state_;
    };

} // namespace fapt

#endif
