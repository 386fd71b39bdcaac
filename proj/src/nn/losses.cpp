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

#include "haze/nn/losses.hpp"

#include <cmath>

namespace haze::nn {

template <class T>
LossGrad<T> l1_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target, double weight) {
    require_same_shape(pred.shape(), target.shape(), "l1 loss");
    LossGrad<T> out;
    out.grad = BasicTensor<T>::uninitialized(pred.shape());
    const std::size_t n = pred.numel();
    if (n == 0) {
        out.grad = BasicTensor<T>(pred.shape());
        return out;
    }
    const T step = static_cast<T>(weight / static_cast<double>(n));
    const T* p = pred.ptr();
    const T* t = target.ptr();
    T* g = out.grad.ptr();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const T d = p[i] - t[i];
        acc += std::abs(static_cast<double>(d));
        g[i] = d > 0 ? step : (d < 0 ? -step : T(0));
    }
    out.value = weight * acc / static_cast<double>(n);
    return out;
}

template <class T>
LossGrad<T> mse_to_constant(const BasicTensor<T>& pred, double target, double weight) {
    LossGrad<T> out;
    out.grad = BasicTensor<T>::uninitialized(pred.shape());
    const std::size_t n = pred.numel();
    if (n == 0) {
        out.grad = BasicTensor<T>(pred.shape());
        return out;
    }
    const double scale = 2.0 * weight / static_cast<double>(n);
    const T* p = pred.ptr();
    T* g = out.grad.ptr();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(p[i]) - target;
        acc += d * d;
        g[i] = static_cast<T>(scale * d);
    }
    out.value = weight * acc / static_cast<double>(n);
    return out;
}

template <class T>
double mean_abs_error(const BasicTensor<T>& a, const BasicTensor<T>& b) {
    require_same_shape(a.shape(), b.shape(), "mean absolute error");
    if (a.numel() == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        acc += std::abs(static_cast<double>(a.ptr()[i]) - static_cast<double>(b.ptr()[i]));
    }
    return acc / static_cast<double>(a.numel());
}

template LossGrad<float> l1_loss(const Tensor&, const Tensor&, double);
template LossGrad<double> l1_loss(const TensorD&, const TensorD&, double);
template LossGrad<float> mse_to_constant(const Tensor&, double, double);
template LossGrad<double> mse_to_constant(const TensorD&, double, double);
template double mean_abs_error(const Tensor&, const Tensor&);
template double mean_abs_error(const TensorD&, const TensorD&);

}  // namespace haze::nn
