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
#include <vector>

#include "haze/nn/params.hpp"

namespace haze::nn {

/// Per-channel batch normalization over (n, h, w).
///
/// Training mode normalizes with batch statistics and updates the running
/// estimates (momentum 0.1, unbiased variance); eval mode uses the running
/// estimates only.
template <class T>
class BatchNorm2d {
public:
    struct Cache {
        BasicTensor<T> normalized;  // x_hat
        std::vector<T> inv_std;
        bool training = true;
    };

    BatchNorm2d() = default;
    explicit BatchNorm2d(int channels, T eps = T(1e-5), T momentum = T(0.1));

    BasicTensor<T> forward(const BasicTensor<T>& x, Cache* cache);
    BasicTensor<T> backward(const Cache& cache, const BasicTensor<T>& gy, bool param_grads);

    void collect(ParameterSet<T>& set, const std::string& prefix);

    bool training = true;
    Parameter<T> gamma;
    Parameter<T> beta;
    BasicTensor<T> running_mean;
    BasicTensor<T> running_var;

private:
    int channels_ = 0;
    T eps_ = T(1e-5);
    T momentum_ = T(0.1);
};

}  // namespace haze::nn
