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

// Feature Fusion Attention network: pixel and channel attention gates inside
// residual blocks, blocks chained into residual groups, and group outputs
// fused before projecting back to RGB with a global residual.

#include <string>
#include <vector>

#include "haze/nn/conv.hpp"
#include "haze/nn/params.hpp"

namespace haze::nn {

struct FFAConfig {
    int num_groups = 3;
    int blocks_per_group = 6;
    int feature_dim = 64;
    int kernel_size = 3;
    int ca_reduction = 8;

    /// Throws ConfigError on non-positive counts, even kernels, or a
    /// reduction that does not divide feature_dim.
    void validate() const;
    bool operator==(const FFAConfig&) const = default;
};

/// Smallest accepted spatial extent for FFA inputs.
inline constexpr int kMinImageSide = 16;

/// Spatial gate: f * sigmoid(conv(relu(conv(f)))) with a single-channel map.
template <class T>
class PixelAttention {
public:
    struct Cache {
        BasicTensor<T> hidden;     // relu output, (n, c/r, h, w)
        BasicTensor<T> attention;  // (n, 1, h, w)
    };

    PixelAttention() = default;
    PixelAttention(int channels, int reduction);

    void init(Rng& rng);
    BasicTensor<T> forward(const BasicTensor<T>& f, Cache* cache) const;
    BasicTensor<T> backward(const BasicTensor<T>& f, const Cache& cache, const BasicTensor<T>& gy,
                            bool param_grads);
    void collect(ParameterSet<T>& set, const std::string& prefix);

    Conv2d<T> reduce;
    Conv2d<T> expand;

private:
    int channels_ = 0;
};

/// Channel gate: f * sigmoid(conv(relu(conv(avgpool(f))))) with one weight per channel.
template <class T>
class ChannelAttention {
public:
    struct Cache {
        BasicTensor<T> pooled;     // (n, c, 1, 1)
        BasicTensor<T> hidden;     // (n, c/r, 1, 1)
        BasicTensor<T> attention;  // (n, c, 1, 1)
    };

    ChannelAttention() = default;
    ChannelAttention(int channels, int reduction);

    void init(Rng& rng);
    BasicTensor<T> forward(const BasicTensor<T>& f, Cache* cache) const;
    BasicTensor<T> backward(const BasicTensor<T>& f, const Cache& cache, const BasicTensor<T>& gy,
                            bool param_grads);
    void collect(ParameterSet<T>& set, const std::string& prefix);

    Conv2d<T> reduce;
    Conv2d<T> expand;

private:
    int channels_ = 0;
};

/// out = f + PA(CA(conv2(relu(conv1(f)))))
template <class T>
class ResidualBlock {
public:
    struct Cache {
        BasicTensor<T> activated;  // relu(conv1(f))
        BasicTensor<T> conv_out;   // conv2(activated)
        typename ChannelAttention<T>::Cache channel;
        BasicTensor<T> channel_out;
        typename PixelAttention<T>::Cache pixel;
    };

    ResidualBlock() = default;
    ResidualBlock(int channels, int kernel, int reduction);

    void init(Rng& rng);
    BasicTensor<T> forward(const BasicTensor<T>& f, Cache* cache) const;
    BasicTensor<T> backward(const BasicTensor<T>& f, const Cache& cache, const BasicTensor<T>& gy,
                            bool param_grads);
    void collect(ParameterSet<T>& set, const std::string& prefix);

    Conv2d<T> conv1;
    Conv2d<T> conv2;
    ChannelAttention<T> channel;
    PixelAttention<T> pixel;
};

/// Blocks in sequence, one trailing convolution, and a skip from the group input.
template <class T>
class ResidualGroup {
public:
    struct Cache {
        std::vector<BasicTensor<T>> block_out;
        std::vector<typename ResidualBlock<T>::Cache> blocks;
    };

    ResidualGroup() = default;
    ResidualGroup(int channels, int kernel, int reduction, int num_blocks);

    void init(Rng& rng);
    BasicTensor<T> forward(const BasicTensor<T>& f, Cache* cache) const;
    BasicTensor<T> backward(const BasicTensor<T>& f, const Cache& cache, const BasicTensor<T>& gy,
                            bool param_grads);
    void collect(ParameterSet<T>& set, const std::string& prefix);

    std::vector<ResidualBlock<T>> blocks;
    Conv2d<T> conv;
};

/// head conv -> groups -> concat + 1x1 fusion -> CA -> PA -> tail conv -> + input
template <class T>
class FFANet {
public:
    struct Cache {
        BasicTensor<T> head_out;
        std::vector<BasicTensor<T>> group_out;
        std::vector<typename ResidualGroup<T>::Cache> groups;
        BasicTensor<T> concat;
        BasicTensor<T> fused;
        typename ChannelAttention<T>::Cache channel;
        BasicTensor<T> channel_out;
        typename PixelAttention<T>::Cache pixel;
        BasicTensor<T> pixel_out;
    };

    FFANet() = default;
    explicit FFANet(const FFAConfig& cfg);

    void init(Rng& rng);

    /// Raw network output (unclamped). Pass a cache to enable backward().
    BasicTensor<T> forward(const BasicTensor<T>& x, Cache* cache) const;

    /// Inference path: forward() clamped to [0, 1].
    [[nodiscard]] BasicTensor<T> restore(const BasicTensor<T>& x) const;

    /// Returns dL/dx when `input_grad` is set, else an empty tensor.
    BasicTensor<T> backward(const BasicTensor<T>& x, const Cache& cache, const BasicTensor<T>& gy,
                            bool param_grads, bool input_grad = false);

    [[nodiscard]] ParameterSet<T> parameters(const std::string& prefix = "");
    void collect(ParameterSet<T>& set, const std::string& prefix);

    [[nodiscard]] const FFAConfig& config() const noexcept { return cfg_; }

    Conv2d<T> head;
    std::vector<ResidualGroup<T>> groups;
    Conv2d<T> fuse;
    ChannelAttention<T> channel;
    PixelAttention<T> pixel;
    Conv2d<T> tail;

private:
    void check_input(const Shape& s) const;
    FFAConfig cfg_{};
};

using FFA = FFANet<float>;

}  // namespace haze::nn
