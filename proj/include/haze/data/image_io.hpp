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
#include <span>
#include <string>
#include <vector>

#include "haze/tensor.hpp"

namespace cv {
class Mat;
}

namespace haze::data {

/// True for the accepted container formats (.png, .jpg, .jpeg; any case).
bool is_supported_image(const std::filesystem::path& p);

/// 8-bit RGB image -> (1, 3, h, w) tensor in [0, 1]. Throws InputError.
Tensor read_image(const std::filesystem::path& p);
/// Decode PNG/JPEG bytes. Throws InputError on anything else.
Tensor decode_image(std::span<const std::uint8_t> bytes);

/// Image `index` of a (n, 3, h, w) tensor, clamped to [0, 1] and rounded to 8 bits.
void write_png(const std::filesystem::path& p, const Tensor& t, int index = 0);
std::vector<std::uint8_t> encode_png(const Tensor& t, int index = 0);

/// Conversions between 8-bit RGB cv::Mat (CV_8UC3) and tensors.
Tensor mat_to_tensor(const cv::Mat& rgb8);
cv::Mat tensor_to_mat(const Tensor& t, int index = 0);

/// Bilinear (area when shrinking) resize of every image in the batch.
Tensor resize(const Tensor& t, int height, int width);

}  // namespace haze::data
