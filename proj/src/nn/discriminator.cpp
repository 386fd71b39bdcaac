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

#include "haze/nn/discriminator.hpp"

#include <algorithm>

#include "haze/nn/activations.hpp"

namespace haze::nn {

void DiscriminatorConfig::validate() const {
    if (base_channels <= 0) throw ConfigError("discriminator base_channels must be positive");
    if (num_layers < 2) throw ConfigError("discriminator num_layers must be at least 2");
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
        throw ConfigError("discriminator leaky_slope must lie in (0, 1)");
    }
}

int DiscriminatorConfig::width(int i) const { return base_channels * (1 << std::min(i, 3)); }

template <class T>
PatchDiscriminator<T>::PatchDiscriminator(const DiscriminatorConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    int in = 3;
    for (int i = 0; i < cfg_.num_layers; ++i) {
        const int out = cfg_.width(i);
        convs.emplace_back(Conv2dSpec{in, out, 4, 2, 1, true});
        if (i > 0) norms.emplace_back(out);
        in = out;
    }
    convs.emplace_back(Conv2dSpec{in, 1, 4, 1, 1, true});
}

template <class T>
void PatchDiscriminator<T>::init(Rng& rng) {
    for (auto& c : convs) c.init(rng);
}

template <class T>
Shape PatchDiscriminator<T>::output_shape(const Shape& in) const {
    Shape s = in;
    for (const auto& c : convs) {
        if (s.h <= 0 || s.w <= 0) break;
        s = c.output_shape(s);
    }
    return s;
}

template <class T>
int PatchDiscriminator<T>::min_input_side() const {
    int side = 1;
    while (true) {
        const Shape s = output_shape(Shape{1, 3, side, side});
        if (s.h >= 1 && s.w >= 1) return side;
        ++side;
    }
}

template <class T>
void PatchDiscriminator<T>::set_training(bool on) {
    training_ = on;
    for (auto& n : norms) n.training = on;
}

template <class T>
BasicTensor<T> PatchDiscriminator<T>::forward(const BasicTensor<T>& x, Cache* cache) {
    if (x.c() != 3) throw InputError("discriminator expects 3 channels, got " + x.shape().str());
    const Shape out = output_shape(x.shape());
    if (out.h < 1 || out.w < 1) {
        throw InputError("discriminator input " + x.shape().str() + " is smaller than the minimum side " +
                         std::to_string(min_input_side()));
    }
    const T slope = static_cast<T>(cfg_.leaky_slope);
    if (cache != nullptr) {
        cache->inputs.clear();
        cache->norms.assign(norms.size(), {});
        cache->activated.clear();
    }
    BasicTensor<T> h = x;
    for (int i = 0; i < cfg_.num_layers; ++i) {
        BasicTensor<T> y = convs[i].forward(h);
        if (cache != nullptr) cache->inputs.push_back(std::move(h));
        if (i > 0) {
            y = norms[i - 1].forward(y, cache != nullptr ? &cache->norms[i - 1] : nullptr);
        }
        h = leaky_relu(y, slope);
        if (cache != nullptr) cache->activated.push_back(h);
    }
    BasicTensor<T> scores = convs.back().forward(h);
    if (cache != nullptr) cache->inputs.push_back(std::move(h));
    return scores;
}

template <class T>
BasicTensor<T> PatchDiscriminator<T>::backward(const Cache& cache, const BasicTensor<T>& gy,
                                               bool param_grads, bool input_grad) {
    const T slope = static_cast<T>(cfg_.leaky_slope);
    const int layers = cfg_.num_layers;
    BasicTensor<T> g = convs.back().backward(cache.inputs[layers], gy, param_grads);
    for (int i = layers - 1; i >= 0; --i) {
        g = leaky_relu_backward(cache.activated[i], g, slope);
        if (i > 0) g = norms[i - 1].backward(cache.norms[i - 1], g, param_grads);
        const bool need_input = i > 0 || input_grad;
        g = convs[i].backward(cache.inputs[i], g, param_grads, need_input);
    }
    return g;
}

template <class T>
void PatchDiscriminator<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    for (int i = 0; i < cfg_.num_layers; ++i) {
        const std::string layer = join_name(prefix, "layers." + std::to_string(i));
        convs[i].collect(set, join_name(layer, "conv"));
        if (i > 0) norms[i - 1].collect(set, join_name(layer, "norm"));
    }
    convs.back().collect(set, join_name(prefix, "head"));
}

template class PatchDiscriminator<float>;
template class PatchDiscriminator<double>;

}  // namespace haze::nn
