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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "haze/random.hpp"
#include "haze/tensor.hpp"

namespace haze::data {

struct AugmentationConfig {
    int resize_height = 256;
    int resize_width = 256;
    std::optional<int> random_crop;  // square crop side, used only when the source is larger
    double hflip_prob = 0.5;
    double rotation_degrees = 10.0;
    bool normalize = false;
    std::array<float, 3> mean{0.64f, 0.60f, 0.58f};
    std::array<float, 3> std{0.14f, 0.15f, 0.152f};

    void validate() const;
    /// Resize only: no crop, flip, rotation or normalization.
    [[nodiscard]] AugmentationConfig geometry_only() const;
    bool operator==(const AugmentationConfig&) const = default;
};

/// Per-channel (x - mean) / std, in place.
void normalize(Tensor& t, const AugmentationConfig& cfg);
/// Inverse of normalize(), in place.
void denormalize(Tensor& t, const AugmentationConfig& cfg);

/// Random geometric parameters shared by both members of a pair.
struct AugmentDraw {
    bool crop = false;
    int crop_x = 0;
    int crop_y = 0;
    bool flip = false;
    double angle = 0.0;
};

AugmentDraw draw_augmentation(int src_h, int src_w, const AugmentationConfig& cfg, Rng& rng);

/// Apply crop/resize, flip, rotation (and normalization if enabled) to one
/// (1, 3, h, w) image.
Tensor apply_augmentation(const Tensor& img, const AugmentDraw& d, const AugmentationConfig& cfg);

/// Sorted list of supported image files directly inside `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

struct PairedDatasetSpec {
    std::filesystem::path hazy_dir;
    std::filesystem::path clean_dir;
    std::optional<int> limit;  // K of fine-tuning
};

struct UnpairedDatasetSpec {
    std::filesystem::path image_dir;
    std::optional<int> sample_count;
};

struct Pair {
    std::string id;
    Tensor hazy;
    Tensor clean;
};

/// Hazy/clean images paired by filename stem, decoded once at construction.
class PairedDataset {
public:
    PairedDataset() = default;
    explicit PairedDataset(const PairedDatasetSpec& spec);

    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    /// Files that could not be decoded and were skipped.
    [[nodiscard]] const std::vector<std::string>& skipped() const noexcept { return skipped_; }

    /// Augmented pair; identical geometry for both members.
    [[nodiscard]] Pair get(std::size_t i, const AugmentationConfig& aug, std::uint64_t sample_seed) const;

    [[nodiscard]] const Tensor& raw_hazy(std::size_t i) const { return hazy_.at(i); }
    [[nodiscard]] const Tensor& raw_clean(std::size_t i) const { return clean_.at(i); }

private:
    std::vector<std::string> ids_;
    std::vector<Tensor> hazy_;
    std::vector<Tensor> clean_;
    std::vector<std::string> skipped_;
};

/// Seeded subset of one directory, sampled without replacement.
class UnpairedDataset {
public:
    UnpairedDataset() = default;
    UnpairedDataset(const UnpairedDatasetSpec& spec, std::uint64_t seed);

    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    [[nodiscard]] const std::vector<std::string>& skipped() const noexcept { return skipped_; }

    [[nodiscard]] Tensor get(std::size_t i, const AugmentationConfig& aug, std::uint64_t sample_seed) const;
    [[nodiscard]] const Tensor& raw(std::size_t i) const { return images_.at(i); }

private:
    std::vector<std::string> ids_;
    std::vector<Tensor> images_;
    std::vector<std::string> skipped_;
};

/// The operation-level loaders: every item augmented with a seed derived
/// from (seed, item index).
std::vector<std::pair<Tensor, Tensor>> load_paired(const PairedDatasetSpec& spec,
                                                   const AugmentationConfig& aug, std::uint64_t seed);
std::vector<Tensor> load_unpaired(const UnpairedDatasetSpec& spec, const AugmentationConfig& aug,
                                  std::uint64_t seed);

/// Dataset index for global draw `g` of an endless shuffled stream over n
/// items: each consecutive block of n draws is a fresh permutation.
std::size_t stream_index(std::size_t n, std::uint64_t seed, std::uint64_t stream, std::uint64_t g);

/// Standard layout under a dataset root.
struct DatasetLayout {
    std::filesystem::path root;

    [[nodiscard]] std::filesystem::path paired_hazy() const { return root / "paired" / "hazy"; }
    [[nodiscard]] std::filesystem::path paired_clean() const { return root / "paired" / "clean"; }
    [[nodiscard]] std::filesystem::path unpaired_hazy() const { return root / "unpaired_hazy"; }
    [[nodiscard]] std::filesystem::path unpaired_clean() const { return root / "unpaired_clean"; }
    [[nodiscard]] std::filesystem::path test_hazy() const { return root / "test" / "hazy"; }
    [[nodiscard]] std::filesystem::path test_clean() const { return root / "test" / "clean"; }
};

}  // namespace haze::data
