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

// Three-phase training: supervised FFA pretraining, unpaired CycleGAN
// training, and K-shot paired fine-tuning.
//
// One optimizer step consumes batch_size * grad_accum_steps samples. Sample
// order and augmentation are pure functions of (seed, global sample index),
// so a run resumed from a checkpoint replays exactly the same stream.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "haze/data/dataset.hpp"
#include "haze/gan/cyclegan.hpp"
#include "haze/optim/adam.hpp"
#include "haze/train/checkpoint.hpp"

namespace haze::train {

/// Clamped [0, 1] output of `net` on a [0, 1] batch, normalizing around the
/// network when the checkpoint was trained on normalized inputs.
Tensor run_generator(const nn::FFA& net, const Tensor& x, const data::AugmentationConfig& aug);

class FFATrainer {
public:
    FFATrainer(const TrainConfig& cfg, const nn::FFAConfig& ffa, const data::AugmentationConfig& aug,
               const data::PairedDataset& train, const data::PairedDataset* val = nullptr);

    /// Load weights, optimizer state, step counter and history.
    void resume(const Checkpoint& ckpt);

    /// Train until epochs * steps_per_epoch() or max_steps, whichever is first.
    void run();
    /// Single optimizer step; returns the mean L1 over its samples.
    double train_step();

    [[nodiscard]] Checkpoint checkpoint();

    [[nodiscard]] std::int64_t step() const noexcept { return step_; }
    [[nodiscard]] std::int64_t steps_per_epoch() const noexcept { return steps_per_epoch_; }
    [[nodiscard]] std::int64_t planned_steps() const;

    /// Mean L1 over the training set without random augmentation.
    [[nodiscard]] double dataset_loss() const;

    [[nodiscard]] nn::FFA& model() noexcept { return net_; }
    [[nodiscard]] const std::vector<HistoryRow>& history() const noexcept { return history_; }
    [[nodiscard]] const std::vector<double>& step_losses() const noexcept { return step_losses_; }

private:
    void end_epoch(std::int64_t epoch, double mean_loss);
    void save(std::int64_t epoch);

    TrainConfig cfg_;
    data::AugmentationConfig aug_;
    const data::PairedDataset& train_;
    const data::PairedDataset* val_;
    nn::FFA net_;
    std::unique_ptr<optim::Adam> opt_;
    std::int64_t step_ = 0;
    std::int64_t steps_per_epoch_ = 1;
    std::vector<HistoryRow> history_;
    std::vector<double> step_losses_;
    double epoch_loss_sum_ = 0.0;
};

struct GanData {
    const data::UnpairedDataset* hazy = nullptr;
    const data::UnpairedDataset* clean = nullptr;
    const data::PairedDataset* paired = nullptr;  // K fine-tuning pairs (may be empty)
    const data::PairedDataset* val = nullptr;
};

struct GanStepLosses {
    gan::GeneratorLosses generator;
    gan::DiscriminatorLosses discriminator;
};

class GanTrainer {
public:
    /// `init` is an FFA checkpoint (phase cyclegan: initializes g_xy) or a
    /// GAN checkpoint (phase finetune: initializes all four networks). A null
    /// `init` starts every network from the seed.
    GanTrainer(const TrainConfig& cfg, const Checkpoint* init, const nn::FFAConfig& ffa,
               const nn::DiscriminatorConfig& disc, const gan::LossConfig& loss,
               const data::AugmentationConfig& aug, const GanData& data);

    void resume(const Checkpoint& ckpt);
    void run();
    GanStepLosses train_step();

    [[nodiscard]] Checkpoint checkpoint();

    [[nodiscard]] std::int64_t step() const noexcept { return step_; }
    [[nodiscard]] std::int64_t steps_per_epoch() const noexcept { return steps_per_epoch_; }
    [[nodiscard]] std::int64_t planned_steps() const;
    [[nodiscard]] std::string variant() const;

    [[nodiscard]] gan::CycleGAN& state() noexcept { return *state_; }
    [[nodiscard]] const std::vector<HistoryRow>& history() const noexcept { return history_; }
    [[nodiscard]] const std::vector<GanStepLosses>& step_losses() const noexcept { return step_losses_; }

private:
    void end_epoch(std::int64_t epoch);
    void save(std::int64_t epoch);
    void dump_samples(const Tensor& hazy, const Tensor& clean, const gan::GeneratorStep& g);

    TrainConfig cfg_;
    nn::FFAConfig ffa_;
    nn::DiscriminatorConfig disc_;
    gan::LossConfig loss_;
    data::AugmentationConfig aug_;
    data::AugmentationConfig model_aug_;  // normalization the generator expects
    GanData data_;
    std::unique_ptr<gan::CycleGAN> state_;
    std::unique_ptr<optim::Adam> opt_g_;
    std::unique_ptr<optim::Adam> opt_d_;
    std::int64_t step_ = 0;
    std::int64_t steps_per_epoch_ = 1;
    std::vector<HistoryRow> history_;
    std::vector<GanStepLosses> step_losses_;
    GanStepLosses epoch_sum_;  // running sums since the last epoch boundary
};

/// Operation-level wrappers; each returns the final checkpoint.
Checkpoint train_ffa(const TrainConfig& cfg, const nn::FFAConfig& ffa, const data::AugmentationConfig& aug,
                     const data::PairedDataset& train, const data::PairedDataset* val = nullptr);
Checkpoint train_cyclegan(const TrainConfig& cfg, const Checkpoint& ffa_init, const nn::DiscriminatorConfig& disc,
                          const gan::LossConfig& loss, const data::AugmentationConfig& aug, const GanData& data);
/// Throws ConfigError when k is not one of kVariantCounts and `allow_any_k` is false.
Checkpoint finetune(const TrainConfig& cfg, const Checkpoint& gan_init, int k, const gan::LossConfig& loss,
                    const data::AugmentationConfig& aug, const GanData& data, bool allow_any_k = false);

}  // namespace haze::train
