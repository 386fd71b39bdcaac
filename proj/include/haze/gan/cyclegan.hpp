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

// Two FFA generators (hazy -> clean, clean -> hazy), one patch discriminator
// per domain, and the least-squares GAN + cycle-consistency objective.

#include <cstdint>
#include <string>

#include "haze/nn/discriminator.hpp"
#include "haze/nn/ffa.hpp"

namespace haze::gan {

enum class GanLossMode { least_squares };

struct LossConfig {
    double lambda_cycle = 10.0;
    GanLossMode gan_loss_mode = GanLossMode::least_squares;

    void validate() const;
    bool operator==(const LossConfig&) const = default;
};

struct CycleGAN {
    nn::FFA g_xy;  // hazy -> clean
    nn::FFA g_yx;  // clean -> hazy
    nn::PatchDiscriminator<float> d_x;  // hazy domain
    nn::PatchDiscriminator<float> d_y;  // clean domain

    CycleGAN(const nn::FFAConfig& ffa, const nn::DiscriminatorConfig& disc);

    /// Fresh initialization of all four networks from one seed.
    void init(std::uint64_t seed);

    [[nodiscard]] nn::ParameterSet<float> generator_parameters();
    [[nodiscard]] nn::ParameterSet<float> discriminator_parameters();
    /// Every parameter and buffer under the g_xy./g_yx./d_x./d_y. prefixes.
    [[nodiscard]] nn::ParameterSet<float> all_parameters();
};

struct GeneratorLosses {
    double adv_xy = 0.0;
    double adv_yx = 0.0;
    double cyc_forward = 0.0;
    double cyc_backward = 0.0;
    double supervised = 0.0;  // paired L1 term, zero when no pair is given
    double total = 0.0;
};

struct DiscriminatorLosses {
    double d_x = 0.0;
    double d_y = 0.0;
    [[nodiscard]] double total() const noexcept { return d_x + d_y; }
};

/// Optional paired sample for the supervised fine-tuning term.
struct SupervisedPair {
    const Tensor* hazy = nullptr;
    const Tensor* clean = nullptr;
    double weight = 5.0;
};

struct GeneratorStep {
    GeneratorLosses losses;
    Tensor fake_clean;  // g_xy(hazy)
    Tensor fake_hazy;   // g_yx(clean)
};

/// Least-squares GAN loss: mean (scores - target)^2, target 1 for real, 0 for fake.
double gan_loss(const Tensor& scores, bool target_is_real);

/// lambda_cycle * mean |original - reconstructed|.
double cycle_consistency_loss(const Tensor& original, const Tensor& reconstructed,
                              const LossConfig& cfg);

/// Generator objective. With `backward` set, gradients accumulate into both
/// generators only; discriminator parameters act as constants.
GeneratorStep generator_step(CycleGAN& state, const Tensor& hazy, const Tensor& clean,
                             const LossConfig& cfg, bool backward,
                             const SupervisedPair& pair = {});

/// Value-only generator objective.
GeneratorLosses generator_step_losses(CycleGAN& state, const Tensor& hazy, const Tensor& clean,
                                      const LossConfig& cfg);

/// Per discriminator 0.5 * (gan(D(real), real) + gan(D(fake), fake)). The
/// fakes are plain tensors, so nothing flows back into the generators. With
/// `backward` set, gradients accumulate into the discriminators only.
DiscriminatorLosses discriminator_step(CycleGAN& state, const Tensor& hazy, const Tensor& clean,
                                       const Tensor& fake_hazy, const Tensor& fake_clean,
                                       bool backward);

}  // namespace haze::gan
