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

#include <cstdint>
#include <string>
#include <vector>

#include "haze/nn/params.hpp"

namespace haze::optim {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

/// Adam with bias correction over a fixed parameter set.
///
/// Moment buffers follow the order of the parameter set, so a set collected
/// from the same module tree always lines up with saved state.
class Adam {
public:
    Adam(nn::ParameterSet<float> params, const AdamConfig& cfg);

    void zero_grad() { params_.zero_grad(); }
    void step();

    [[nodiscard]] std::int64_t steps() const noexcept { return t_; }
    void set_steps(std::int64_t t) noexcept { t_ = t; }
    [[nodiscard]] const AdamConfig& config() const noexcept { return cfg_; }
    void set_lr(double lr) noexcept { cfg_.lr = lr; }

    [[nodiscard]] nn::ParameterSet<float>& parameters() noexcept { return params_; }
    [[nodiscard]] std::vector<Tensor>& first_moments() noexcept { return m_; }
    [[nodiscard]] std::vector<Tensor>& second_moments() noexcept { return v_; }

private:
    nn::ParameterSet<float> params_;
    AdamConfig cfg_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::int64_t t_ = 0;
};

}  // namespace haze::optim
