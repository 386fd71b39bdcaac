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

#include "haze/tensor.hpp"

namespace haze::nn {

/// Scalar loss value with its gradient w.r.t. the prediction.
template <class T>
struct LossGrad {
    double value = 0.0;
    BasicTensor<T> grad;
};

/// weight * mean |pred - target|. The subgradient at zero difference is zero.
template <class T>
LossGrad<T> l1_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target, double weight = 1.0);

/// weight * mean (pred - target)^2 against a constant target map.
template <class T>
LossGrad<T> mse_to_constant(const BasicTensor<T>& pred, double target, double weight = 1.0);

/// Value-only variants for evaluation.
template <class T>
double mean_abs_error(const BasicTensor<T>& a, const BasicTensor<T>& b);

}  // namespace haze::nn
