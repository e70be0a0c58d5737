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

#ifndef FAPT_GRADCHECK_HPP
#define FAPT_GRADCHECK_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fapt/rng.hpp"
#include "fapt/tensor.hpp"

namespace fapt
{
    namespace nn
    {
        // Central-difference check of analytic gradients.
        //
        //   loss_backward: runs forward + backward and returns the loss; parameter
        //                  gradients must have been zeroed by the caller contract
        //                  (this function zeroes them before invoking it).
        //   loss_only:     runs the forward pass alone and returns the loss.
        //
        // Checks up to max_coords_per_param coordinates of every trainable,
        // non-buffer parameter and returns the maximum error
        //   |fd - analytic| / max(|fd|, |analytic|, 1).
        inline double finite_diff_check(const std::function<double()>& loss_backward,
                                        const std::function<double()>& loss_only,
                                        const std::vector<Parameter*>& params, double epsilon,
                                        std::size_t max_coords_per_param, Rng& rng)
        {
            for (Parameter* p : params)
                p->grad.zero();

            double base = loss_backward();
            if (!std::isfinite(base))
                throw std::runtime_error("finite_diff_check: non-finite loss");

            double worst = 0.0;
            for (Parameter* p : params)
            {
                if (!p->trainable || p->is_buffer)
                    continue;
                std::size_t n = p->value.data.size();
                std::size_t to_check = std::min(n, max_coords_per_param);
                for (std::size_t j = 0; j < to_check; ++j)
                {
                    std::size_t i = to_check == n
                                        ? j
                                        : static_cast<std::size_t>(rng.uniform_int(n));
                    double saved = p->value.data[i];

                    p->value.data[i] = saved + epsilon;
                    double lp = loss_only();
                    p->value.data[i] = saved - epsilon;
                    double lm = loss_only();
                    p->value.data[i] = saved;

                    if (!std::isfinite(lp) || !std::isfinite(lm))
                        throw std::runtime_error("finite_diff_check: non-finite loss");

                    double fd = (lp - lm) / (2.0 * epsilon);
                    double an = p->grad.data[i];
                    double err = std::fabs(fd - an) /
                                 std::max({std::fabs(fd), std::fabs(an), 1.0});
                    if (err > worst)
                        worst = err;
                }
            }
            return worst;
        }

    } // namespace nn
} // namespace fapt

#endif
