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

#include "haze/optim/adam.hpp"

#include <cmath>

namespace haze::optim {

void AdamConfig::validate() const {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(eps > 0.0)) throw ConfigError("Adam eps must be positive");
}

Adam::Adam(nn::ParameterSet<float> params, const AdamConfig& cfg)
    : params_(std::move(params)), cfg_(cfg) {
    cfg_.validate();
    m_.reserve(params_.params.size());
    v_.reserve(params_.params.size());
    for (const auto& p : params_.params) {
        m_.emplace_back(p.param->value.shape());
        v_.emplace_back(p.param->value.shape());
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const float b1 = static_cast<float>(cfg_.beta1);
    const float b2 = static_cast<float>(cfg_.beta2);
    const float step = static_cast<float>(cfg_.lr / bc1);
    const float inv_bc2 = static_cast<float>(1.0 / bc2);
    const float eps = static_cast<float>(cfg_.eps);
    for (std::size_t i = 0; i < params_.params.size(); ++i) {
        auto& p = *params_.params[i].param;
        float* w = p.value.ptr();
        const float* g = p.grad.ptr();
        float* m = m_[i].ptr();
        float* v = v_[i].ptr();
        const std::size_t n = p.value.numel();
        for (std::size_t j = 0; j < n; ++j) {
            m[j] = b1 * m[j] + (1.0f - b1) * g[j];
            v[j] = b2 * v[j] + (1.0f - b2) * g[j] * g[j];
            w[j] -= step * m[j] / (std::sqrt(v[j] * inv_bc2) + eps);
        }
    }
}

}  // namespace haze::optim
