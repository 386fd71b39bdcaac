//*****************************************************************************
// Copyright 2026 The haze-restore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//*****************************************************************************

#pragma once

#include <string>

#include "haze/nn/params.hpp"

namespace haze::nn {

struct Conv2dSpec {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 3;
    int stride = 1;
    int padding = 0;
    bool bias = true;
};

/// 2-D convolution over NCHW tensors, lowered to GEMM through row-tiled im2col.
///
/// The layer keeps no activation state: backward() takes the forward input
/// explicitly, so one instance may appear several times in a graph.
template <class T>
class Conv2d {
public:
    Conv2d() = default;
    explicit Conv2d(const Conv2dSpec& spec);

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero bias.
    void init(Rng& rng);

    [[nodiscard]] Shape output_shape(const Shape& in) const;
    [[nodiscard]] BasicTensor<T> forward(const BasicTensor<T>& x) const;

    /// Accumulates weight/bias gradients when `param_grads` is set and returns
    /// dL/dx (an empty tensor if `input_grad` is false).
    BasicTensor<T> backward(const BasicTensor<T>& x, const BasicTensor<T>& gy, bool param_grads,
                            bool input_grad = true);

    void collect(ParameterSet<T>& set, const std::string& prefix);

    [[nodiscard]] const Conv2dSpec& spec() const noexcept { return spec_; }

    Parameter<T> weight;  // (out, in, k, k)
    Parameter<T> bias;    // (out, 1, 1, 1); empty when spec.bias is false

private:
    [[nodiscard]] bool is_pointwise() const noexcept {
        return spec_.kernel == 1 && spec_.stride == 1 && spec_.padding == 0;
    }
    void check_input(const Shape& in) const;
    void forward_shifted(const BasicTensor<T>& x, BasicTensor<T>& y) const;

    Conv2dSpec spec_{};
};

}  // namespace haze::nn
