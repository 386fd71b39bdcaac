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

#include "haze/metrics/metrics.hpp"
#include "haze/train/checkpoint.hpp"

namespace haze::train {

struct EvalOptions {
    std::string variant;
    /// Resize inputs (and references) before inference; native size when unset.
    std::optional<int> resize_height;
    std::optional<int> resize_width;
    /// Restored PNGs are written here when non-empty.
    std::filesystem::path output_dir;
};

/// Runs the generator over every image in `hazy_dir`. Rows without a clean
/// counterpart (same stem in `clean_dir`) carry no metrics; unreadable
/// inputs are skipped with a warning.
std::vector<metrics::MetricReport> evaluate(const nn::FFA& net, const data::AugmentationConfig& model_aug,
                                            const std::filesystem::path& hazy_dir,
                                            const std::optional<std::filesystem::path>& clean_dir,
                                            const EvalOptions& opt);

std::vector<metrics::MetricReport> evaluate(const Checkpoint& ckpt, const std::filesystem::path& hazy_dir,
                                            const std::optional<std::filesystem::path>& clean_dir,
                                            const EvalOptions& opt);

/// Writes <stem>.csv and <stem>.json next to each other.
void write_report(const std::filesystem::path& stem, const std::vector<metrics::MetricReport>& rows);

}  // namespace haze::train
