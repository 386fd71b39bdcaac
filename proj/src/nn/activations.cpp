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

#include "haze/nn/activations.hpp"

#include <cmath>

#include "haze/simd/kernels.hpp"

namespace haze::nn {

template <class T>
BasicTensor<T> relu(const BasicTensor<T>& x) {
    auto y = BasicTensor<T>::uninitialized(x.shape());
    const T* in = x.ptr();
    T* out = y.ptr();
    for (std::size_t i = 0; i < x.numel(); ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
    return y;
}

template <class T>
void relu_inplace(BasicTensor<T>& x) {
    for (auto& v : x.data()) v = v > T(0) ? v : T(0);
}

template <class T>
BasicTensor<T> relu_backward(const BasicTensor<T>& out, const BasicTensor<T>& gy) {
    require_same_shape(out.shape(), gy.shape(), "relu_backward");
    auto gx = BasicTensor<T>::uninitialized(out.shape());
    const T* o = out.ptr();
    const T* g = gy.ptr();
    T* d = gx.ptr();
    for (std::size_t i = 0; i < out.numel(); ++i) d[i] = o[i] > T(0) ? g[i] : T(0);
    return gx;
}

template <class T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& x, T slope) {
    auto y = BasicTensor<T>::uninitialized(x.shape());
    const T* in = x.ptr();
    T* out = y.ptr();
    for (std::size_t i = 0; i < x.numel(); ++i) out[i] = in[i] > T(0) ? in[i] : slope * in[i];
    return y;
}

template <class T>
BasicTensor<T> leaky_relu_backward(const BasicTensor<T>& out, const BasicTensor<T>& gy, T slope) {
    require_same_shape(out.shape(), gy.shape(), "leaky_relu_backward");
    auto gx = BasicTensor<T>::uninitialized(out.shape());
    const T* o = out.ptr();
    const T* g = gy.ptr();
    T* d = gx.ptr();
    for (std::size_t i = 0; i < out.numel(); ++i) d[i] = o[i] > T(0) ? g[i] : slope * g[i];
    return gx;
}

template <class T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x) {
    auto y = BasicTensor<T>::uninitialized(x.shape());
    const T* in = x.ptr();
    T* out = y.ptr();
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const T v = in[i];
        // Split by sign so exp never overflows.
        if (v >= T(0)) {
            out[i] = T(1) / (T(1) + std::exp(-v));
        } else {
            const T e = std::exp(v);
            out[i] = e / (T(1) + e);
        }
    }
    return y;
}

template <class T>
BasicTensor<T> sigmoid_backward(const BasicTensor<T>& out, const BasicTensor<T>& gy) {
    require_same_shape(out.shape(), gy.shape(), "sigmoid_backward");
    auto gx = BasicTensor<T>::uninitialized(out.shape());
    const T* s = out.ptr();
    const T* g = gy.ptr();
    T* d = gx.ptr();
    for (std::size_t i = 0; i < out.numel(); ++i) d[i] = g[i] * s[i] * (T(1) - s[i]);
    return gx;
}

template <class T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& x) {
    BasicTensor<T> y(Shape{x.n(), x.c(), 1, 1});
    const std::size_t plane = x.shape().plane();
    const T inv = T(1) / static_cast<T>(plane);
    for (int b = 0; b < x.n(); ++b) {
        for (int ch = 0; ch < x.c(); ++ch) y.at(b, ch, 0, 0) = simd::sum(x.plane(b, ch), plane) * inv;
    }
    return y;
}

template <class T>
BasicTensor<T> global_avg_pool_backward(const BasicTensor<T>& gy, const Shape& input) {
    auto gx = BasicTensor<T>::uninitialized(input);
    const std::size_t plane = input.plane();
    const T inv = T(1) / static_cast<T>(plane);
    for (int b = 0; b < input.n; ++b) {
        for (int ch = 0; ch < input.c; ++ch) {
            const T g = gy.at(b, ch, 0, 0) * inv;
            T* dst = gx.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) dst[i] = g;
        }
    }
    return gx;
}

#define HAZE_INSTANTIATE(T)                                                                     \
    template BasicTensor<T> relu<T>(const BasicTensor<T>&);                                     \
    template void relu_inplace<T>(BasicTensor<T>&);                                             \
    template BasicTensor<T> relu_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&);     \
    template BasicTensor<T> leaky_relu<T>(const BasicTensor<T>&, T);                            \
    template BasicTensor<T> leaky_relu_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&, \
                                                   T);                                          \
    template BasicTensor<T> sigmoid<T>(const BasicTensor<T>&);                                  \
    template BasicTensor<T> sigmoid_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&);  \
    template BasicTensor<T> global_avg_pool<T>(const BasicTensor<T>&);                          \
    template BasicTensor<T> global_avg_pool_backward<T>(const BasicTensor<T>&, const Shape&);

HAZE_INSTANTIATE(float)
HAZE_INSTANTIATE(double)
#undef HAZE_INSTANTIATE

}  // namespace haze::nn
