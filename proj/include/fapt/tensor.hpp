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

#ifndef FAPT_TENSOR_HPP
#define FAPT_TENSOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fapt
{
    // Dense row-major real tensor. All network math runs in double precision;
    // the checkpoint dtype tag controls on-disk precision only.
    struct Tensor
    {
        std::vector<std::int64_t> shape;
        std::vector<double> data;

        Tensor() = default;
        explicit Tensor(std::vector<std::int64_t> s) : shape(std::move(s))
        {
            data.assign(static_cast<std::size_t>(numel_of(shape)), 0.0);
        }

        static std::int64_t numel_of(const std::vector<std::int64_t>& s)
        {
            std::int64_t n = 1;
            for (std::int64_t d : s)
                n *= d;
            return n;
        }

        std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
        std::int64_t dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

        double& operator[](std::size_t i) { return data[i]; }
        double operator[](std::size_t i) const { return data[i]; }

        void zero() { std::fill(data.begin(), data.end(), 0.0); }
    };

    using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using EMap = Eigen::Map<EMat>;
    using ECMap = Eigen::Map<const EMat>;

    // Views a tensor as a rows x cols row-major matrix (over its full storage).
    inline EMap as_mat(Tensor& t, std::int64_t rows, std::int64_t cols)
    {
        return EMap(t.data.data(), rows, cols);
    }
    inline ECMap as_mat(const Tensor& t, std::int64_t rows, std::int64_t cols)
    {
        return ECMap(t.data.data(), rows, cols);
    }

    // A named weight plus its gradient buffer. Buffers (is_buffer) are state
    // carried with the model, e.g. normalization running statistics: serialized
    // and broadcast but never touched by the optimizer.
    struct Parameter
    {
        std::string name;
        Tensor value;
        Tensor grad;
        bool trainable = true;
        bool is_adapter = false;
        bool is_buffer = false;

        Parameter() = default;
        Parameter(std::string n, std::vector<std::int64_t> shape, bool train = true)
            : name(std::move(n)), value(shape), grad(std::move(shape)), trainable(train)
        {
        }
    };

} // namespace fapt

#endif
