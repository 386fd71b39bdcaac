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
#include <filesystem>
#include <optional>
#include <string_view>

#include "haze/tensor.hpp"

namespace haze::data {

enum class Degradation { haze, rain, snow };

std::optional<Degradation> parse_degradation(std::string_view name);
std::string_view degradation_name(Degradation d);

inline constexpr float kAirlight = 0.9f;

/// Seeded synthetic degradation of a [0, 1] image batch, clipped to [0, 1].
///  haze: clean * t + A * (1 - t), t = 1 - 0.8 * severity, A = 0.9
///  rain: additive slanted streaks, brightness proportional to severity
///  snow: additive soft blobs, brightness proportional to severity
Tensor synthesize_degradation(const Tensor& clean, Degradation kind, double severity, std::uint64_t seed);

/// Procedural clean scene: sky gradient, ground plane, and random shapes.
Tensor procedural_scene(int height, int width, std::uint64_t seed);

struct ToyDatasetOptions {
    int paired = 30;
    int unpaired = 12;
    int test = 6;
    int size = 64;
    Degradation kind = Degradation::haze;
    double severity_min = 0.4;
    double severity_max = 0.8;
    std::uint64_t seed = 0;
};

/// Writes paired/{hazy,clean}, unpaired_hazy, unpaired_clean and
/// test/{hazy,clean} PNG folders under `root`.
void write_toy_dataset(const std::filesystem::path& root, const ToyDatasetOptions& opt);

}  // namespace haze::data
