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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "haze/metrics/metrics.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace {

using namespace haze;
using haze::testing::random_tensor;

class SeededPairs : public ::testing::TestWithParam<int> {};

TEST_P(SeededPairs, PsnrMatchesLoopOracle) {
    const auto a = random_tensor<double>(Shape{1, 3, 32, 32}, 1000 + GetParam(), 0.0, 1.0);
    const auto b = random_tensor<double>(Shape{1, 3, 32, 32}, 2000 + GetParam(), 0.0, 1.0);
    EXPECT_NEAR(metrics::psnr(a, b), haze::testing::psnr_oracle(a, b), 1e-9);
}

TEST_P(SeededPairs, SsimMatchesWindowOracle) {
    const auto a = random_tensor<double>(Shape{1, 3, 32, 32}, 1000 + GetParam(), 0.0, 1.0);
    const auto b = random_tensor<double>(Shape{1, 3, 32, 32}, 2000 + GetParam(), 0.0, 1.0);
    EXPECT_NEAR(metrics::ssim(a, b), haze::testing::ssim_oracle(a, b), 1e-6);
}

TEST_P(SeededPairs, CorrelatedPairsMatchOracles) {
    // Random pairs have SSIM near zero; a noisy copy exercises the high end.
    const auto a = random_tensor<double>(Shape{1, 3, 32, 32}, 3000 + GetParam(), 0.0, 1.0);
    auto b = a;
    const auto noise = random_tensor<double>(a.shape(), 4000 + GetParam(), -0.05, 0.05);
    for (std::size_t i = 0; i < b.numel(); ++i) b.data()[i] += noise.data()[i];
    EXPECT_NEAR(metrics::psnr(a, b), haze::testing::psnr_oracle(a, b), 1e-9);
    EXPECT_NEAR(metrics::ssim(a, b), haze::testing::ssim_oracle(a, b), 1e-6);
    EXPECT_GT(metrics::ssim(a, b), 0.9);
}

INSTANTIATE_TEST_SUITE_P(Twenty, SeededPairs, ::testing::Range(0, 20));

TEST(Metrics, IdenticalInputs) {
    const auto x = random_tensor<float>(Shape{2, 3, 16, 16}, 5, 0.0, 1.0);
    EXPECT_EQ(metrics::psnr(x, x), metrics::kPsnrCap);
    EXPECT_EQ(metrics::psnr(x, x), 100.0);
    EXPECT_EQ(metrics::ssim(x, x), 1.0);
}

TEST(Metrics, PsnrClosedForm) {
    const TensorD a(Shape{1, 1, 4, 4}, 0.5);
    const TensorD b(Shape{1, 1, 4, 4}, 0.6);
    EXPECT_NEAR(metrics::psnr(a, b), 20.0, 1e-9);
    EXPECT_NEAR(metrics::psnr(a, b, 255.0), 10.0 * std::log10(255.0 * 255.0 / 0.01), 1e-9);
    // Tiny but nonzero error stays under the cap.
    TensorD c = a;
    c.data()[0] += 1e-12;
    EXPECT_EQ(metrics::psnr(a, c), 100.0);
}

TEST(Metrics, SsimIsSymmetricAndBounded) {
    const auto a = random_tensor<double>(Shape{2, 3, 20, 24}, 6, 0.0, 1.0);
    const auto b = random_tensor<double>(Shape{2, 3, 20, 24}, 7, 0.0, 1.0);
    EXPECT_EQ(metrics::ssim(a, b), metrics::ssim(b, a));
    EXPECT_LE(metrics::ssim(a, b), 1.0);
    EXPECT_GE(metrics::ssim(a, b), -1.0);
    EXPECT_NEAR(metrics::ssim(a, b), haze::testing::ssim_oracle(a, b), 1e-6);
}

TEST(Metrics, FloatAndDoubleAgree) {
    const auto a = random_tensor<float>(Shape{1, 3, 32, 32}, 8, 0.0, 1.0);
    const auto b = random_tensor<float>(Shape{1, 3, 32, 32}, 9, 0.0, 1.0);
    EXPECT_NEAR(metrics::psnr(a, b), metrics::psnr(a.cast<double>(), b.cast<double>()), 1e-9);
    EXPECT_NEAR(metrics::ssim(a, b), metrics::ssim(a.cast<double>(), b.cast<double>()), 1e-9);
}

TEST(Metrics, GaussianWindow) {
    const auto g = metrics::gaussian_window_1d();
    ASSERT_EQ(g.size(), 11u);
    EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 1.0, 1e-15);
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(g[i], g[10 - i]);
    EXPECT_NEAR(g[5] / g[4], std::exp(1.0 / (2 * 1.5 * 1.5)), 1e-12);
}

TEST(Metrics, RejectsBadInputs) {
    const Tensor a(Shape{1, 3, 16, 16});
    const Tensor b(Shape{1, 3, 16, 15});
    EXPECT_THROW(metrics::psnr(a, b), InputError);
    EXPECT_THROW(metrics::ssim(a, b), InputError);
    const Tensor small(Shape{1, 3, 8, 8});
    EXPECT_THROW(metrics::ssim(small, small), InputError);
}

std::vector<metrics::MetricReport> sample_rows() {
    return {
        {"a", "k25", 20.0, 0.8},
        {"b", "k25", 30.5, 0.9},
        {"c", "k25", std::nullopt, std::nullopt},
        {"d", "k25", 25.25, 0.7},
    };
}

TEST(MetricReport, SummaryAveragesRowsWithMetrics) {
    const auto s = metrics::summarize(sample_rows());
    EXPECT_EQ(s.count, 3u);
    EXPECT_NEAR(s.mean_psnr_db, (20.0 + 30.5 + 25.25) / 3.0, 1e-9);
    EXPECT_NEAR(s.mean_ssim, (0.8 + 0.9 + 0.7) / 3.0, 1e-9);
}

TEST(MetricReport, CsvAndJson) {
    std::ostringstream os;
    metrics::write_csv(os, sample_rows());
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "image_id,variant,psnr_db,ssim");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        if (line.starts_with("c,")) EXPECT_EQ(line, "c,k25,,");
    }
    EXPECT_EQ(rows, 4);

    const auto j = nlohmann::json::parse(metrics::to_json(sample_rows()));
    ASSERT_EQ(j["rows"].size(), 4u);
    EXPECT_TRUE(j["rows"][2]["psnr_db"].is_null());
    EXPECT_EQ(j["mean"]["count"], 3);
    EXPECT_NEAR(j["mean"]["ssim"].get<double>(), 0.8, 1e-12);
}

}  // namespace
