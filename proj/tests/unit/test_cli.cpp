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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "haze/cli/cli.hpp"
#include "haze/data/degrade.hpp"
#include "haze/data/image_io.hpp"
#include "haze/metrics/metrics.hpp"
#include "test_support.hpp"

namespace {

using namespace haze;
using haze::testing::ScratchDir;
namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
};

Outcome run_cli(const std::vector<std::string>& args) {
    ::testing::internal::CaptureStdout();
    const int code = cli::run(args);
    return {code, ::testing::internal::GetCapturedStdout()};
}

/// Value printed on a "key: value" line.
std::optional<double> printed(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    for (std::string line; std::getline(in, line);) {
        if (line.rfind(key + ": ", 0) == 0) return std::stod(line.substr(key.size() + 2));
    }
    return std::nullopt;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        ::setenv("HAZE_RESTORE_HOME", (dir_ / "home").c_str(), 1);
        fs::create_directories(dir_ / "home");
        Tensor img = haze::testing::random_tensor<float>(Shape{1, 3, 24, 40}, 3, 0.0, 1.0);
        for (float& v : img.data()) v = std::round(v * 255.0f) / 255.0f;
        data::write_png(input(), img);
        identity_ = dir_ / "identity.ckpt";
        train::save_checkpoint(identity_, haze::testing::zero_gan_checkpoint(
                                              train::Phase::finetune, "k25", haze::testing::tiny_ffa(),
                                              haze::testing::tiny_disc(), 32));
    }
    void TearDown() override { ::unsetenv("HAZE_RESTORE_HOME"); }

    [[nodiscard]] fs::path input() const { return dir_ / "in.png"; }
    [[nodiscard]] std::string toy() {
        const fs::path root = dir_ / "toy";
        if (!fs::exists(root)) {
            EXPECT_EQ(run_cli({"synthesize", "--out", root.string(), "--paired", "30", "--unpaired", "6", "--test", "3",
                               "--size", "32", "--seed", "2"})
                          .code,
                      0);
        }
        return root.string();
    }

    ScratchDir dir_{"cli"};
    fs::path identity_;
};

TEST_F(CliTest, HelpExitsZero) {
    EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
    EXPECT_EQ(run_cli({"restore", "--help"}).code, cli::kOk);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli({}).code, cli::kBadInput);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kBadInput);
    EXPECT_EQ(run_cli({"restore"}).code, cli::kBadInput);
    EXPECT_EQ(run_cli({"restore", "--input", input().string(), "--device", "cuda"}).code, cli::kBadInput);
    EXPECT_EQ(run_cli({"pretrain", "--profile", "huge"}).code, cli::kBadInput);
}

TEST_F(CliTest, RestoreKeepsDimensionsAndScoresReference) {
    const fs::path out = dir_ / "out.png";
    const auto r = run_cli({"restore", "--input", input().string(), "--checkpoint", identity_.string(), "--out",
                            out.string(), "--reference", input().string()});
    ASSERT_EQ(r.code, cli::kOk) << r.out;
    const Tensor written = data::read_image(out);
    EXPECT_EQ(written.shape(), (Shape{1, 3, 24, 40}));
    EXPECT_EQ(written, data::read_image(input()));
    EXPECT_EQ(printed(r.out, "ssim"), 1.0);
    EXPECT_EQ(printed(r.out, "psnr_db"), 100.0);

    const auto resized = run_cli({"restore", "--input", input().string(), "--checkpoint", identity_.string(), "--out",
                                  (dir_ / "small.png").string(), "--image-size", "16"});
    ASSERT_EQ(resized.code, cli::kOk);
    EXPECT_EQ(data::read_image(dir_ / "small.png").shape(), (Shape{1, 3, 24, 40}));
    EXPECT_FALSE(printed(resized.out, "ssim").has_value());
}

TEST_F(CliTest, RestoreFindsNewestCheckpointInHome) {
    fs::copy_file(identity_, dir_ / "home" / "finetune_k25_3.ckpt");
    { std::ofstream(dir_ / "home" / "finetune_k25_1.ckpt") << "stale"; }
    const auto r = run_cli({"restore", "--input", input().string()});
    EXPECT_EQ(r.code, cli::kOk);
    EXPECT_TRUE(fs::exists(dir_ / "in_restored.png"));
    // No checkpoint for K=10 anywhere.
    EXPECT_EQ(run_cli({"restore", "--input", input().string(), "--k-paired", "10"}).code, cli::kBadCheckpoint);
}

TEST_F(CliTest, RestoreExitCodes) {
    { std::ofstream(dir_ / "bad.png") << "not an image"; }
    { std::ofstream(dir_ / "bad.ckpt") << "HZCKPT01 truncated"; }
    EXPECT_EQ(run_cli({"restore", "--input", (dir_ / "bad.png").string(), "--checkpoint", identity_.string()}).code,
              cli::kBadInput);
    EXPECT_EQ(run_cli({"restore", "--input", (dir_ / "missing.png").string(), "--checkpoint", identity_.string()}).code,
              cli::kBadInput);
    ::testing::internal::CaptureStderr();
    const int code = cli::run({"restore", "--input", input().string(), "--checkpoint", (dir_ / "bad.ckpt").string()});
    const std::string err = ::testing::internal::GetCapturedStderr();
    EXPECT_EQ(code, cli::kBadCheckpoint);
    EXPECT_NE(err.find("bad.ckpt"), std::string::npos) << err;
}

TEST_F(CliTest, ConfigFileLosesToCommandLine) {
    const std::string root = toy();
    const fs::path cfg = dir_ / "run.ini";
    std::ofstream(cfg) << "lr=0.5\nseed=9\nmax-steps=3\n";
    const fs::path out = dir_ / "pre";
    const auto r = run_cli({"pretrain", "--config", cfg.string(), "--lr", "0.002", "--profile", "smoke", "--data-root",
                            root, "--out", out.string()});
    ASSERT_EQ(r.code, cli::kOk) << r.out;
    const auto c = train::load_checkpoint(out / "ffa_pretrain_base_0.ckpt");
    EXPECT_DOUBLE_EQ(c.train.lr, 0.002);
    EXPECT_EQ(c.train.seed, 9u);
    EXPECT_EQ(c.step, 3);
    EXPECT_EQ(c.ffa.feature_dim, 8);
}

TEST_F(CliTest, FullPipelineAndEvaluate) {
    const std::string root = toy();
    const std::string out = (dir_ / "pipe").string();
    const std::vector<std::string> common{"--profile", "smoke", "--data-root", root, "--out", out, "--max-steps", "2"};
    auto with = [&](std::vector<std::string> v) {
        v.insert(v.end(), common.begin(), common.end());
        return run_cli(v);
    };
    ASSERT_EQ(with({"pretrain"}).code, cli::kOk);
    ASSERT_EQ(with({"train-gan", "--checkpoint", out + "/ffa_pretrain_base_0.ckpt"}).code, cli::kOk);
    ASSERT_EQ(with({"finetune", "--checkpoint", out + "/cyclegan_gan_0.ckpt", "--k-paired", "5"}).code, cli::kOk);
    EXPECT_TRUE(fs::exists(out + "/finetune_k5_0.ckpt"));
    // Fine-tuning needs a GAN checkpoint.
    EXPECT_EQ(with({"finetune", "--checkpoint", out + "/ffa_pretrain_base_0.ckpt", "--k-paired", "5"}).code,
              cli::kBadCheckpoint);

    const auto e = with({"evaluate", "--checkpoint", out + "/finetune_k5_0.ckpt"});
    ASSERT_EQ(e.code, cli::kOk) << e.out;
    EXPECT_EQ(printed(e.out, "images"), 3.0);
    EXPECT_TRUE(printed(e.out, "mean_ssim").has_value());
    EXPECT_TRUE(fs::exists(out + "/eval_k5.csv"));
    EXPECT_TRUE(fs::exists(out + "/eval_k5.json"));
}

TEST_F(CliTest, GridPrintsFiveRows) {
    const std::string root = toy();
    const std::string out = (dir_ / "grid").string();
    const auto r = run_cli({"grid", "--profile", "smoke", "--data-root", root, "--out", out, "--max-steps", "2"});
    ASSERT_EQ(r.code, cli::kOk) << r.out;
    EXPECT_NE(r.out.find("| Number of Images | SSIM | PSNR (dB) |"), std::string::npos) << r.out;
    for (int k : {25, 20, 10, 5, 0}) {
        EXPECT_NE(r.out.find("| " + std::to_string(k) + " | "), std::string::npos) << k;
        EXPECT_TRUE(fs::exists(out + "/finetune_k" + std::to_string(k) + "_0.ckpt")) << k;
    }
}

TEST_F(CliTest, SynthesizeSingleImage) {
    const fs::path out = dir_ / "hazy.png";
    ASSERT_EQ(run_cli({"synthesize", "--input", input().string(), "--out", out.string(), "--severity", "0.6"}).code,
              cli::kOk);
    const Tensor clean = data::read_image(input());
    const Tensor hazy = data::read_image(out);
    EXPECT_EQ(hazy.shape(), clean.shape());
    EXPECT_LT(metrics::psnr(hazy, clean), 30.0);
    EXPECT_EQ(run_cli({"synthesize", "--input", input().string(), "--out", out.string(), "--kind", "fog"}).code,
              cli::kBadCheckpoint);
    EXPECT_EQ(run_cli({"synthesize", "--input", input().string(), "--out", out.string(), "--severity", "2"}).code,
              cli::kBadInput);
}

}  // namespace
