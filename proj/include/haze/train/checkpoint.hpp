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

// Single-file checkpoint: 8-byte magic, little-endian u64 header length, a
// JSON header (configs, counters, metric history, tensor index), then raw
// little-endian float32 tensor data in index order.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "haze/nn/ffa.hpp"
#include "haze/nn/params.hpp"
#include "haze/train/config.hpp"

namespace haze::train {

inline constexpr char kCheckpointMagic[8] = {'H', 'Z', 'C', 'K', 'P', 'T', '0', '1'};
inline constexpr int kCheckpointVersion = 1;

struct HistoryRow {
    std::int64_t epoch = 0;
    std::int64_t step = 0;
    std::map<std::string, double> values;
    bool operator==(const HistoryRow&) const = default;
};

struct NamedTensor {
    std::string name;
    Tensor value;
};

struct Checkpoint {
    int version = kCheckpointVersion;
    Phase phase = Phase::ffa_pretrain;
    std::string variant = "base";
    std::int64_t epoch = 0;
    std::int64_t step = 0;
    TrainConfig train;
    nn::FFAConfig ffa;
    nn::DiscriminatorConfig disc;
    gan::LossConfig loss;
    data::AugmentationConfig aug;
    std::map<std::string, std::int64_t> counters;
    std::map<std::string, double> scalars;  // partial epoch statistics etc.
    std::vector<HistoryRow> history;
    std::vector<NamedTensor> tensors;

    [[nodiscard]] const Tensor* find(const std::string& name) const;

    /// Copy every parameter and buffer of `set` under its own name.
    void capture(const nn::ParameterSet<float>& set);
    /// Copy tensors back into `set`; throws CheckpointError on missing names
    /// or shape mismatches.
    void restore_into(nn::ParameterSet<float>& set) const;

    /// Prefix of the hazy -> clean generator ("ffa" or "g_xy").
    [[nodiscard]] std::string generator_prefix() const;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws CheckpointError naming the file on any format problem.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// "{phase}_{variant}_{epoch}.ckpt"
std::string checkpoint_filename(Phase phase, const std::string& variant, std::int64_t epoch);

/// Hazy -> clean generator stored in a checkpoint.
nn::FFA load_generator(const Checkpoint& ckpt);

/// Writes history rows as CSV (epoch, step, then the sorted union of value keys).
void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRow>& rows);

}  // namespace haze::train
