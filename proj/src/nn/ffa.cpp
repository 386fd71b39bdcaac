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

#include "haze/nn/ffa.hpp"

#include <algorithm>

#include "haze/nn/activations.hpp"
#include "haze/simd/kernels.hpp"

namespace haze::nn {

void FFAConfig::validate() const {
    if (num_groups <= 0 || blocks_per_group <= 0 || feature_dim <= 0 || kernel_size <= 0 ||
        ca_reduction <= 0) {
        throw ConfigError("FFA config values must be positive");
    }
    if (kernel_size % 2 == 0) throw ConfigError("FFA kernel_size must be odd");
    if (feature_dim % ca_reduction != 0) {
        throw ConfigError("FFA feature_dim (" + std::to_string(feature_dim) +
                          ") must be divisible by ca_reduction (" + std::to_string(ca_reduction) + ")");
    }
}

namespace {

Conv2dSpec pointwise(int in, int out) { return Conv2dSpec{in, out, 1, 1, 0, true}; }
Conv2dSpec same(int in, int out, int k) { return Conv2dSpec{in, out, k, 1, k / 2, true}; }

}  // namespace

// ---------------------------------------------------------------- pixel attention

template <class T>
PixelAttention<T>::PixelAttention(int channels, int reduction)
    : reduce(pointwise(channels, channels / reduction)),
      expand(pointwise(channels / reduction, 1)),
      channels_(channels) {}

template <class T>
void PixelAttention<T>::init(Rng& rng) {
    reduce.init(rng);
    expand.init(rng);
}

template <class T>
BasicTensor<T> PixelAttention<T>::forward(const BasicTensor<T>& f, Cache* cache) const {
    if (f.c() != channels_) throw ConfigError("pixel attention channel mismatch: " + f.shape().str());
    BasicTensor<T> hidden = reduce.forward(f);
    relu_inplace(hidden);
    BasicTensor<T> attn = sigmoid(expand.forward(hidden));
    auto y = BasicTensor<T>::uninitialized(f.shape());
    const std::size_t plane = f.shape().plane();
    for (int b = 0; b < f.n(); ++b) {
        const T* s = attn.plane(b, 0);
        for (int ch = 0; ch < f.c(); ++ch) {
            const T* in = f.plane(b, ch);
            T* out = y.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) out[i] = in[i] * s[i];
        }
    }
    if (cache != nullptr) {
        cache->hidden = std::move(hidden);
        cache->attention = std::move(attn);
    }
    return y;
}

template <class T>
BasicTensor<T> PixelAttention<T>::backward(const BasicTensor<T>& f, const Cache& cache,
                                           const BasicTensor<T>& gy, bool param_grads) {
    const std::size_t plane = f.shape().plane();
    auto gf = BasicTensor<T>::uninitialized(f.shape());
    BasicTensor<T> gattn(cache.attention.shape());
    for (int b = 0; b < f.n(); ++b) {
        const T* s = cache.attention.plane(b, 0);
        T* gs = gattn.plane(b, 0);
        for (int ch = 0; ch < f.c(); ++ch) {
            const T* in = f.plane(b, ch);
            const T* g = gy.plane(b, ch);
            T* out = gf.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) {
                out[i] = g[i] * s[i];
                gs[i] += g[i] * in[i];
            }
        }
    }
    BasicTensor<T> gpre = sigmoid_backward(cache.attention, gattn);
    BasicTensor<T> ghidden = expand.backward(cache.hidden, gpre, param_grads);
    BasicTensor<T> gred = relu_backward(cache.hidden, ghidden);
    add_inplace(gf, reduce.backward(f, gred, param_grads));
    return gf;
}

template <class T>
void PixelAttention<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    reduce.collect(set, join_name(prefix, "reduce"));
    expand.collect(set, join_name(prefix, "expand"));
}

// -------------------------------------------------------------- channel attention

template <class T>
ChannelAttention<T>::ChannelAttention(int channels, int reduction)
    : reduce(pointwise(channels, channels / reduction)),
      expand(pointwise(channels / reduction, channels)),
      channels_(channels) {}

template <class T>
void ChannelAttention<T>::init(Rng& rng) {
    reduce.init(rng);
    expand.init(rng);
}

template <class T>
BasicTensor<T> ChannelAttention<T>::forward(const BasicTensor<T>& f, Cache* cache) const {
    if (f.c() != channels_) {
        throw ConfigError("channel attention channel mismatch: " + f.shape().str());
    }
    BasicTensor<T> pooled = global_avg_pool(f);
    BasicTensor<T> hidden = reduce.forward(pooled);
    relu_inplace(hidden);
    BasicTensor<T> attn = sigmoid(expand.forward(hidden));
    auto y = BasicTensor<T>::uninitialized(f.shape());
    const std::size_t plane = f.shape().plane();
    for (int b = 0; b < f.n(); ++b) {
        for (int ch = 0; ch < f.c(); ++ch) {
            const T s = attn.at(b, ch, 0, 0);
            const T* in = f.plane(b, ch);
            T* out = y.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) out[i] = in[i] * s;
        }
    }
    if (cache != nullptr) {
        cache->pooled = std::move(pooled);
        cache->hidden = std::move(hidden);
        cache->attention = std::move(attn);
    }
    return y;
}

template <class T>
BasicTensor<T> ChannelAttention<T>::backward(const BasicTensor<T>& f, const Cache& cache,
                                             const BasicTensor<T>& gy, bool param_grads) {
    const std::size_t plane = f.shape().plane();
    auto gf = BasicTensor<T>::uninitialized(f.shape());
    BasicTensor<T> gattn(cache.attention.shape());
    for (int b = 0; b < f.n(); ++b) {
        for (int ch = 0; ch < f.c(); ++ch) {
            const T s = cache.attention.at(b, ch, 0, 0);
            const T* g = gy.plane(b, ch);
            T* out = gf.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) out[i] = g[i] * s;
            gattn.at(b, ch, 0, 0) = simd::dot(g, f.plane(b, ch), plane);
        }
    }
    BasicTensor<T> gpre = sigmoid_backward(cache.attention, gattn);
    BasicTensor<T> ghidden = expand.backward(cache.hidden, gpre, param_grads);
    BasicTensor<T> gred = relu_backward(cache.hidden, ghidden);
    BasicTensor<T> gpooled = reduce.backward(cache.pooled, gred, param_grads);
    add_inplace(gf, global_avg_pool_backward(gpooled, f.shape()));
    return gf;
}

template <class T>
void ChannelAttention<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    reduce.collect(set, join_name(prefix, "reduce"));
    expand.collect(set, join_name(prefix, "expand"));
}

// ---------------------------------------------------------------- residual block

template <class T>
ResidualBlock<T>::ResidualBlock(int channels, int kernel, int reduction)
    : conv1(same(channels, channels, kernel)),
      conv2(same(channels, channels, kernel)),
      channel(channels, reduction),
      pixel(channels, reduction) {}

template <class T>
void ResidualBlock<T>::init(Rng& rng) {
    conv1.init(rng);
    conv2.init(rng);
    channel.init(rng);
    pixel.init(rng);
}

template <class T>
BasicTensor<T> ResidualBlock<T>::forward(const BasicTensor<T>& f, Cache* cache) const {
    BasicTensor<T> activated = conv1.forward(f);
    relu_inplace(activated);
    BasicTensor<T> conv_out = conv2.forward(activated);
    BasicTensor<T> channel_out =
        channel.forward(conv_out, cache != nullptr ? &cache->channel : nullptr);
    BasicTensor<T> out = pixel.forward(channel_out, cache != nullptr ? &cache->pixel : nullptr);
    add_inplace(out, f);
    if (cache != nullptr) {
        cache->activated = std::move(activated);
        cache->conv_out = std::move(conv_out);
        cache->channel_out = std::move(channel_out);
    }
    return out;
}

template <class T>
BasicTensor<T> ResidualBlock<T>::backward(const BasicTensor<T>& f, const Cache& cache,
                                          const BasicTensor<T>& gy, bool param_grads) {
    BasicTensor<T> g = pixel.backward(cache.channel_out, cache.pixel, gy, param_grads);
    g = channel.backward(cache.conv_out, cache.channel, g, param_grads);
    g = conv2.backward(cache.activated, g, param_grads);
    g = relu_backward(cache.activated, g);
    g = conv1.backward(f, g, param_grads);
    add_inplace(g, gy);
    return g;
}

template <class T>
void ResidualBlock<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    conv1.collect(set, join_name(prefix, "conv1"));
    conv2.collect(set, join_name(prefix, "conv2"));
    channel.collect(set, join_name(prefix, "ca"));
    pixel.collect(set, join_name(prefix, "pa"));
}

// ---------------------------------------------------------------- residual group

template <class T>
ResidualGroup<T>::ResidualGroup(int channels, int kernel, int reduction, int num_blocks)
    : conv(same(channels, channels, kernel)) {
    blocks.reserve(num_blocks);
    for (int i = 0; i < num_blocks; ++i) blocks.emplace_back(channels, kernel, reduction);
}

template <class T>
void ResidualGroup<T>::init(Rng& rng) {
    for (auto& b : blocks) b.init(rng);
    conv.init(rng);
}

template <class T>
BasicTensor<T> ResidualGroup<T>::forward(const BasicTensor<T>& f, Cache* cache) const {
    if (cache != nullptr) {
        cache->block_out.clear();
        cache->blocks.assign(blocks.size(), {});
    }
    BasicTensor<T> h;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        h = blocks[i].forward(i == 0 ? f : h, cache != nullptr ? &cache->blocks[i] : nullptr);
        if (cache != nullptr) cache->block_out.push_back(h);
    }
    BasicTensor<T> out = conv.forward(h);
    add_inplace(out, f);
    return out;
}

template <class T>
BasicTensor<T> ResidualGroup<T>::backward(const BasicTensor<T>& f, const Cache& cache,
                                          const BasicTensor<T>& gy, bool param_grads) {
    BasicTensor<T> g = conv.backward(cache.block_out.back(), gy, param_grads);
    for (std::size_t i = blocks.size(); i-- > 0;) {
        const BasicTensor<T>& in = i == 0 ? f : cache.block_out[i - 1];
        g = blocks[i].backward(in, cache.blocks[i], g, param_grads);
    }
    add_inplace(g, gy);
    return g;
}

template <class T>
void ResidualGroup<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        blocks[i].collect(set, join_name(prefix, "blocks." + std::to_string(i)));
    }
    conv.collect(set, join_name(prefix, "conv"));
}

// ---------------------------------------------------------------- full network

template <class T>
FFANet<T>::FFANet(const FFAConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    const int dim = cfg.feature_dim;
    head = Conv2d<T>(same(3, dim, cfg.kernel_size));
    groups.reserve(cfg.num_groups);
    for (int g = 0; g < cfg.num_groups; ++g) {
        groups.emplace_back(dim, cfg.kernel_size, cfg.ca_reduction, cfg.blocks_per_group);
    }
    fuse = Conv2d<T>(pointwise(dim * cfg.num_groups, dim));
    channel = ChannelAttention<T>(dim, cfg.ca_reduction);
    pixel = PixelAttention<T>(dim, cfg.ca_reduction);
    tail = Conv2d<T>(same(dim, 3, cfg.kernel_size));
}

template <class T>
void FFANet<T>::init(Rng& rng) {
    head.init(rng);
    for (auto& g : groups) g.init(rng);
    fuse.init(rng);
    channel.init(rng);
    pixel.init(rng);
    tail.init(rng);
}

template <class T>
void FFANet<T>::check_input(const Shape& s) const {
    if (s.c != 3) throw InputError("FFA expects 3-channel input, got " + s.str());
    if (s.n < 1) throw InputError("FFA input batch is empty");
    if (s.h < kMinImageSide || s.w < kMinImageSide) {
        throw InputError("FFA input " + s.str() + " below minimum spatial size " +
                         std::to_string(kMinImageSide));
    }
}

template <class T>
BasicTensor<T> FFANet<T>::forward(const BasicTensor<T>& x, Cache* cache) const {
    check_input(x.shape());
    BasicTensor<T> head_out = head.forward(x);

    std::vector<BasicTensor<T>> outs;
    outs.reserve(groups.size());
    if (cache != nullptr) cache->groups.assign(groups.size(), {});
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const BasicTensor<T>& in = g == 0 ? head_out : outs.back();
        outs.push_back(groups[g].forward(in, cache != nullptr ? &cache->groups[g] : nullptr));
    }

    std::vector<const BasicTensor<T>*> parts;
    for (const auto& o : outs) parts.push_back(&o);
    BasicTensor<T> concat = concat_channels<T>(parts);
    BasicTensor<T> fused = fuse.forward(concat);
    BasicTensor<T> channel_out = channel.forward(fused, cache != nullptr ? &cache->channel : nullptr);
    BasicTensor<T> pixel_out = pixel.forward(channel_out, cache != nullptr ? &cache->pixel : nullptr);
    BasicTensor<T> y = tail.forward(pixel_out);
    add_inplace(y, x);

    if (cache != nullptr) {
        cache->head_out = std::move(head_out);
        cache->group_out = std::move(outs);
        cache->concat = std::move(concat);
        cache->fused = std::move(fused);
        cache->channel_out = std::move(channel_out);
        cache->pixel_out = std::move(pixel_out);
    }
    return y;
}

template <class T>
BasicTensor<T> FFANet<T>::restore(const BasicTensor<T>& x) const {
    BasicTensor<T> y = forward(x, nullptr);
    for (auto& v : y.data()) v = std::clamp(v, T(0), T(1));
    return y;
}

template <class T>
BasicTensor<T> FFANet<T>::backward(const BasicTensor<T>& x, const Cache& cache,
                                   const BasicTensor<T>& gy, bool param_grads, bool input_grad) {
    const int dim = cfg_.feature_dim;
    BasicTensor<T> g = tail.backward(cache.pixel_out, gy, param_grads);
    g = pixel.backward(cache.channel_out, cache.pixel, g, param_grads);
    g = channel.backward(cache.fused, cache.channel, g, param_grads);
    BasicTensor<T> gconcat = fuse.backward(cache.concat, g, param_grads);

    BasicTensor<T> carry;
    for (std::size_t i = groups.size(); i-- > 0;) {
        BasicTensor<T> gout = slice_channels(gconcat, static_cast<int>(i) * dim, dim);
        if (!carry.empty()) add_inplace(gout, carry);
        const BasicTensor<T>& in = i == 0 ? cache.head_out : cache.group_out[i - 1];
        carry = groups[i].backward(in, cache.groups[i], gout, param_grads);
    }
    BasicTensor<T> gx = head.backward(x, carry, param_grads, input_grad);
    if (input_grad) add_inplace(gx, gy);
    return gx;
}

template <class T>
void FFANet<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    head.collect(set, join_name(prefix, "head"));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        groups[g].collect(set, join_name(prefix, "groups." + std::to_string(g)));
    }
    fuse.collect(set, join_name(prefix, "fuse"));
    channel.collect(set, join_name(prefix, "ca"));
    pixel.collect(set, join_name(prefix, "pa"));
    tail.collect(set, join_name(prefix, "tail"));
}

template <class T>
ParameterSet<T> FFANet<T>::parameters(const std::string& prefix) {
    ParameterSet<T> set;
    collect(set, prefix);
    return set;
}

template class PixelAttention<float>;
template class PixelAttention<double>;
template class ChannelAttention<float>;
template class ChannelAttention<double>;
template class ResidualBlock<float>;
template class ResidualBlock<double>;
template class ResidualGroup<float>;
template class ResidualGroup<double>;
template class FFANet<float>;
template class FFANet<double>;

}  // namespace haze::nn
