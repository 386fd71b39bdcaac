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
#include <optional>
#include <string>
#include <string_view>

#include "haze/data/dataset.hpp"
#include "haze/gan/cyclegan.hpp"
#include "haze/nn/discriminator.hpp"
#include "haze/nn/ffa.hpp"
#include "json.hpp"

namespace haze::train {

enum class Phase { ffa_pretrain, cyclegan, finetune };

std::string_view phase_name(Phase p);
std::optional<Phase> parse_phase(std::string_view s);

/// Fine-tuning pair counts with published reference numbers.
inline constexpr int kVariantCounts[] = {25, 20, 10, 5, 0};
bool is_standard_variant(int k);

/// Published reference numbers per fine-tuning count (not reproduced here).
struct ReportedMetrics {
    int k;
    double ssim;
    double psnr_db;
};
inline constexpr ReportedMetrics kReportedVariants[] = {
    {25, 0.9084, 19.16}, {20, 0.8976, 18.93}, {10, 0.8760, 18.47}, {5, 0.8652, 18.25}, {0, 0.8544, 18.02},
};
/// Published learning-rate sweep for the supervised phase.
struct ReportedLearningRate {
    double lr;
    double ssim;
    double psnr_db;
};
inline constexpr ReportedLearningRate kReportedLearningRates[] = {
    {0.0001, 0.85, 28.5}, {0.001, 0.90, 30.0}, {0.01, 0.87, 29.0},
};
/// Manifest JSON listing kReportedVariants under source "paper-reported".
nlohmann::json reported_manifest();
std::string variant_name(int k);  // "k25"

struct TrainConfig {
    Phase phase = Phase::ffa_pretrain;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int epochs = 50;
    int batch_size = 1;
    int grad_accum_steps = 1;
    int k_paired = 0;
    std::uint64_t seed = 0;
    std::string checkpoint_dir = "checkpoints";
    std::int64_t max_steps = 0;     // total optimizer steps cap; 0 disables
    int checkpoint_every_epochs = 10;  // 0 writes only the final checkpoint
    std::int64_t sample_every = 0;  // steps between sample dumps; 0 disables
    double supervised_weight = 5.0;
    bool write_files = true;        // checkpoints, samples, history CSV
    bool epoch_metrics = true;      // PSNR/SSIM on train/validation each epoch

    /// Phase defaults: FFA lr 1e-3, betas (0.9, 0.999); GAN phases lr 2e-4, betas (0.5, 0.999).
    static TrainConfig defaults_for(Phase p);
    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const nn::FFAConfig& c);
nlohmann::json to_json(const nn::DiscriminatorConfig& c);
nlohmann::json to_json(const gan::LossConfig& c);
nlohmann::json to_json(const data::AugmentationConfig& c);

TrainConfig train_config_from_json(const nlohmann::json& j);
nn::FFAConfig ffa_config_from_json(const nlohmann::json& j);
nn::DiscriminatorConfig disc_config_from_json(const nlohmann::json& j);
gan::LossConfig loss_config_from_json(const nlohmann::json& j);
data::AugmentationConfig aug_config_from_json(const nlohmann::json& j);

}  // namespace haze::train
