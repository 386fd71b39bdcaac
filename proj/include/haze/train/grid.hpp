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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "haze/train/checkpoint.hpp"

namespace haze::train {

struct GridOptions {
    std::filesystem::path data_root;
    std::filesystem::path out_dir;
    /// GAN checkpoint to fine-tune from. When unset, pretraining and
    /// unpaired GAN training run first with the configs below.
    std::optional<std::filesystem::path> base_checkpoint;
    TrainConfig pretrain = TrainConfig::defaults_for(Phase::ffa_pretrain);
    TrainConfig gan = TrainConfig::defaults_for(Phase::cyclegan);
    TrainConfig finetune = TrainConfig::defaults_for(Phase::finetune);
    nn::FFAConfig ffa;
    nn::DiscriminatorConfig disc;
    gan::LossConfig loss;
    data::AugmentationConfig aug;
    std::vector<int> ks{25, 20, 10, 5, 0};
};

struct GridRow {
    int k = 0;
    std::optional<double> ssim;
    std::optional<double> psnr_db;
    std::filesystem::path checkpoint;
    std::string error;  // empty on success
};

struct GridResult {
    std::vector<GridRow> rows;
    [[nodiscard]] bool ok() const;
};

/// Fine-tunes and evaluates every K, continuing past failed cells. Writes
/// grid.md, grid.csv, variants.json and the variant checkpoints to out_dir.
GridResult run_grid(const GridOptions& opt);

/// Markdown table with columns "Number of Images | SSIM | PSNR (dB)".
std::string format_grid_table(const std::vector<GridRow>& rows);

struct LearningRateRow {
    double lr = 0.0;
    std::optional<double> ssim;
    std::optional<double> psnr_db;
    std::string error;
};

/// Supervised pretraining at each learning rate, evaluated on the test split
/// (or the paired set when absent). Writes lr_grid.md and lr_grid.csv.
std::vector<LearningRateRow> run_lr_grid(const GridOptions& opt, const std::vector<double>& lrs);
std::string format_lr_table(const std::vector<LearningRateRow>& rows);

}  // namespace haze::train
