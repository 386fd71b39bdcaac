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

// Full-reference image quality metrics, evaluated in double precision.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "haze/tensor.hpp"

namespace haze::metrics {

/// Value returned by psnr() when the two images are identical.
inline constexpr double kPsnrCap = 100.0;

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// 10 log10(range^2 / MSE) over every element; kPsnrCap when MSE is zero.
template <class T>
double psnr(const BasicTensor<T>& pred, const BasicTensor<T>& ref, double data_range = 1.0);

/// Mean local SSIM over all "valid" 11x11 Gaussian windows (sigma 1.5),
/// averaged over channels, then positions, then batch.
template <class T>
double ssim(const BasicTensor<T>& pred, const BasicTensor<T>& ref, double data_range = 1.0);

/// Normalized 11-tap Gaussian used by ssim().
std::vector<double> gaussian_window_1d(int size = kSsimWindow, double sigma = kSsimSigma);

struct MetricReport {
    std::string image_id;
    std::string variant;
    std::optional<double> psnr_db;  // absent when no reference was available
    std::optional<double> ssim;
};

struct MetricSummary {
    std::size_t count = 0;  // rows that carry metrics
    double mean_psnr_db = 0.0;
    double mean_ssim = 0.0;
};

MetricSummary summarize(const std::vector<MetricReport>& rows);

/// CSV with header image_id,variant,psnr_db,ssim; missing metrics are empty cells.
void write_csv(std::ostream& os, const std::vector<MetricReport>& rows);
/// JSON object {"rows": [...], "mean": {...}}.
std::string to_json(const std::vector<MetricReport>& rows);

}  // namespace haze::metrics
