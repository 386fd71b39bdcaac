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

// Helpers shared by the unit tests and the acceptance runner: seeded tensor
// fills, independent oracles, finite differences and scratch directories.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "haze/gan/cyclegan.hpp"
#include "haze/random.hpp"
#include "haze/tensor.hpp"
#include "haze/train/checkpoint.hpp"

namespace haze::testing {

template <class T>
BasicTensor<T> random_tensor(Shape s, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    BasicTensor<T> t(s);
    Rng rng(seed);
    for (T& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag);
    ~ScratchDir();
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

/// Norm-wise relative error ||a - b|| / max(||a||, ||b||, floor); 0 when
/// the denominator vanishes.
double relative_error(const TensorD& a, const TensorD& b, double floor = 0.0);

/// Central differences of `loss` with respect to every element of `x`.
TensorD numeric_gradient(TensorD& x, const std::function<double()>& loss, double eps = 1e-3);

/// Direct 7-loop convolution in double (zero padding), independent of the
/// im2col/GEMM path.
TensorD conv2d_oracle(const TensorD& x, const TensorD& weight, const TensorD* bias, int stride, int padding);

/// Plain loop PSNR in double.
double psnr_oracle(const TensorD& a, const TensorD& b, double range = 1.0);

/// SSIM by direct 2-D windowed sums over an 11x11 Gaussian (sigma 1.5),
/// valid positions only, channel values summed then averaged.
double ssim_oracle(const TensorD& a, const TensorD& b, double range = 1.0);

/// Checkpoint of a CycleGAN with every learnable value zero, so the
/// generators are identity maps.
train::Checkpoint zero_gan_checkpoint(train::Phase phase, const std::string& variant, const nn::FFAConfig& ffa,
                                      const nn::DiscriminatorConfig& disc, int image_side);

/// Small configurations used across the tests.
nn::FFAConfig tiny_ffa();
nn::DiscriminatorConfig tiny_disc();

}  // namespace haze::testing
