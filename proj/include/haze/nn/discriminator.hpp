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

// PatchGAN-style discriminator: stride-2 4x4 convolutions followed by a
// stride-1 4x4 projection to a single score channel. Scores are raw
// least-squares GAN outputs.

#include <string>
#include <vector>

#include "haze/nn/batchnorm.hpp"
#include "haze/nn/conv.hpp"
#include "haze/nn/params.hpp"

namespace haze::nn {

struct DiscriminatorConfig {
    int base_channels = 64;
    int num_layers = 4;
    double leaky_slope = 0.2;

    void validate() const;
    bool operator==(const DiscriminatorConfig&) const = default;

    /// Channel width of stride-2 layer `i` (doubles per layer, capped at 8x base).
    [[nodiscard]] int width(int i) const;
};

template <class T>
class PatchDiscriminator {
public:
    struct Cache {
        std::vector<BasicTensor<T>> inputs;  // input of every conv, head last
        std::vector<typename BatchNorm2d<T>::Cache> norms;
        std::vector<BasicTensor<T>> activated;  // leaky relu outputs
    };

    PatchDiscriminator() = default;
    explicit PatchDiscriminator(const DiscriminatorConfig& cfg);

    void init(Rng& rng);

    /// (n, 3, h, w) -> (n, 1, h', w'). Updates BatchNorm running statistics in
    /// training mode.
    BasicTensor<T> forward(const BasicTensor<T>& x, Cache* cache);

    /// Returns dL/dx when `input_grad` is set, else an empty tensor.
    BasicTensor<T> backward(const Cache& cache, const BasicTensor<T>& gy, bool param_grads,
                            bool input_grad = true);

    void set_training(bool on);
    [[nodiscard]] bool training() const noexcept { return training_; }

    [[nodiscard]] Shape output_shape(const Shape& in) const;
    /// Smallest square side that still yields a non-empty score map.
    [[nodiscard]] int min_input_side() const;

    void collect(ParameterSet<T>& set, const std::string& prefix);
    [[nodiscard]] const DiscriminatorConfig& config() const noexcept { return cfg_; }

    std::vector<Conv2d<T>> convs;  // num_layers stride-2 layers, then the head
    std::vector<BatchNorm2d<T>> norms;  // layers 1..num_layers-1

private:
    DiscriminatorConfig cfg_{};
    bool training_ = true;
};

}  // namespace haze::nn
