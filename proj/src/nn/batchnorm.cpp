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

#include "haze/nn/batchnorm.hpp"

#include <cmath>

namespace haze::nn {

template <class T>
BatchNorm2d<T>::BatchNorm2d(int channels, T eps, T momentum)
    : gamma(Shape{channels, 1, 1, 1}),
      beta(Shape{channels, 1, 1, 1}),
      running_mean(Shape{channels, 1, 1, 1}, T(0)),
      running_var(Shape{channels, 1, 1, 1}, T(1)),
      channels_(channels),
      eps_(eps),
      momentum_(momentum) {
    gamma.value.fill(T(1));
}

template <class T>
BasicTensor<T> BatchNorm2d<T>::forward(const BasicTensor<T>& x, Cache* cache) {
    if (x.c() != channels_) throw ConfigError("batchnorm channel mismatch: " + x.shape().str());
    const std::size_t plane = x.shape().plane();
    const std::size_t count = plane * static_cast<std::size_t>(x.n());
    BasicTensor<T> y(x.shape());
    BasicTensor<T> xhat(x.shape());
    std::vector<T> inv_std(channels_);

    for (int ch = 0; ch < channels_; ++ch) {
        T mean;
        T var;
        if (training) {
            double s = 0.0;
            for (int b = 0; b < x.n(); ++b) {
                const T* p = x.plane(b, ch);
                for (std::size_t i = 0; i < plane; ++i) s += p[i];
            }
            const double m = s / static_cast<double>(count);
            double sq = 0.0;
            for (int b = 0; b < x.n(); ++b) {
                const T* p = x.plane(b, ch);
                for (std::size_t i = 0; i < plane; ++i) {
                    const double d = p[i] - m;
                    sq += d * d;
                }
            }
            mean = static_cast<T>(m);
            var = static_cast<T>(sq / static_cast<double>(count));
            const double unbiased = count > 1 ? sq / static_cast<double>(count - 1) : 0.0;
            T& rm = running_mean.ptr()[ch];
            T& rv = running_var.ptr()[ch];
            rm = (T(1) - momentum_) * rm + momentum_ * mean;
            rv = (T(1) - momentum_) * rv + momentum_ * static_cast<T>(unbiased);
        } else {
            mean = running_mean.ptr()[ch];
            var = running_var.ptr()[ch];
        }
        const T istd = T(1) / std::sqrt(var + eps_);
        inv_std[ch] = istd;
        const T g = gamma.value.ptr()[ch];
        const T bt = beta.value.ptr()[ch];
        for (int b = 0; b < x.n(); ++b) {
            const T* p = x.plane(b, ch);
            T* xh = xhat.plane(b, ch);
            T* out = y.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) {
                xh[i] = (p[i] - mean) * istd;
                out[i] = g * xh[i] + bt;
            }
        }
    }
    if (cache != nullptr) {
        cache->normalized = std::move(xhat);
        cache->inv_std = std::move(inv_std);
        cache->training = training;
    }
    return y;
}

template <class T>
BasicTensor<T> BatchNorm2d<T>::backward(const Cache& cache, const BasicTensor<T>& gy,
                                        bool param_grads) {
    const BasicTensor<T>& xhat = cache.normalized;
    require_same_shape(xhat.shape(), gy.shape(), "batchnorm backward");
    const std::size_t plane = gy.shape().plane();
    const double count = static_cast<double>(plane) * gy.n();
    BasicTensor<T> gx(gy.shape());

    for (int ch = 0; ch < channels_; ++ch) {
        double sum_g = 0.0;
        double sum_gx = 0.0;
        for (int b = 0; b < gy.n(); ++b) {
            const T* g = gy.plane(b, ch);
            const T* xh = xhat.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) {
                sum_g += g[i];
                sum_gx += static_cast<double>(g[i]) * xh[i];
            }
        }
        if (param_grads) {
            gamma.grad.ptr()[ch] += static_cast<T>(sum_gx);
            beta.grad.ptr()[ch] += static_cast<T>(sum_g);
        }
        const T scale = gamma.value.ptr()[ch] * cache.inv_std[ch];
        const T mean_g = static_cast<T>(sum_g / count);
        const T mean_gx = static_cast<T>(sum_gx / count);
        for (int b = 0; b < gy.n(); ++b) {
            const T* g = gy.plane(b, ch);
            const T* xh = xhat.plane(b, ch);
            T* out = gx.plane(b, ch);
            if (cache.training) {
                for (std::size_t i = 0; i < plane; ++i) out[i] = scale * (g[i] - mean_g - xh[i] * mean_gx);
            } else {
                for (std::size_t i = 0; i < plane; ++i) out[i] = scale * g[i];
            }
        }
    }
    return gx;
}

template <class T>
void BatchNorm2d<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    set.add(join_name(prefix, "gamma"), gamma);
    set.add(join_name(prefix, "beta"), beta);
    set.add_buffer(join_name(prefix, "running_mean"), running_mean);
    set.add_buffer(join_name(prefix, "running_var"), running_var);
}

template class BatchNorm2d<float>;
template class BatchNorm2d<double>;

}  // namespace haze::nn
