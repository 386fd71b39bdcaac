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

template <class T>
BasicTensor<T> relu(const BasicTensor<T>& x);
template <class T>
void relu_inplace(BasicTensor<T>& x);
/// Gradient through relu given its output.
template <class T>
BasicTensor<T> relu_backward(const BasicTensor<T>& out, const BasicTensor<T>& gy);

template <class T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& x, T slope);
/// Gradient through leaky relu given its output (sign matches the input for slope > 0).
template <class T>
BasicTensor<T> leaky_relu_backward(const BasicTensor<T>& out, const BasicTensor<T>& gy, T slope);

template <class T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x);
/// Gradient through sigmoid given its output s: gy * s * (1 - s).
template <class T>
BasicTensor<T> sigmoid_backward(const BasicTensor<T>& out, const BasicTensor<T>& gy);

/// Mean over (h, w): (n, c, h, w) -> (n, c, 1, 1).
template <class T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& x);
/// Spread (n, c, 1, 1) gradients evenly over an (n, c, h, w) input.
template <class T>
BasicTensor<T> global_avg_pool_backward(const BasicTensor<T>& gy, const Shape& input);

}  // namespace haze::nn
