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

#include <algorithm>
#include <fstream>
#include <set>

#include "haze/data/dataset.hpp"
#include "haze/data/degrade.hpp"
#include "haze/data/image_io.hpp"
#include "haze/metrics/metrics.hpp"
#include "test_support.hpp"

namespace {

using namespace haze;
using haze::testing::random_tensor;
using haze::testing::ScratchDir;
namespace fs = std::filesystem;

/// Random image already on the 8-bit grid, so PNG round trips are exact.
Tensor quantized_image(int h, int w, std::uint64_t seed) {
    Tensor t = random_tensor<float>(Shape{1, 3, h, w}, seed, 0.0, 1.0);
    for (float& v : t.data()) v = std::round(v * 255.0f) / 255.0f;
    return t;
}

void write_pairs(const fs::path& root, int count, int side) {
    fs::create_directories(root / "hazy");
    fs::create_directories(root / "clean");
    for (int i = 0; i < count; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "%03d.png", i);
        data::write_png(root / "hazy" / name, quantized_image(side, side, 100 + i));
        data::write_png(root / "clean" / name, quantized_image(side, side, 500 + i));
    }
}

// ---------------------------------------------------------------- image io

TEST(ImageIo, PngRoundTripIsExact) {
    ScratchDir dir("io");
    const Tensor img = quantized_image(9, 13, 1);
    data::write_png(dir / "a.png", img);
    const Tensor back = data::read_image(dir / "a.png");
    ASSERT_EQ(back.shape(), img.shape());
    EXPECT_LE(max_abs_diff(back, img), 1e-7);
    const auto bytes = data::encode_png(img);
    EXPECT_EQ(data::decode_image(bytes), back);
}

TEST(ImageIo, RejectsUnsupportedContent) {
    ScratchDir dir("io");
    { std::ofstream(dir / "fake.png") << "definitely not an image"; }
    EXPECT_THROW(data::read_image(dir / "fake.png"), InputError);
    EXPECT_THROW(data::read_image(dir / "missing.png"), InputError);
    const std::uint8_t gif[] = {'G', 'I', 'F', '8', '9', 'a', 0, 0};
    EXPECT_THROW(data::decode_image(gif), InputError);
    EXPECT_TRUE(data::is_supported_image("x.PNG"));
    EXPECT_TRUE(data::is_supported_image("x.jpeg"));
    EXPECT_TRUE(data::is_supported_image("x.JPG"));
    EXPECT_FALSE(data::is_supported_image("x.bmp"));
    EXPECT_FALSE(data::is_supported_image("png"));
}

TEST(ImageIo, ValuesInUnitRangeAndResize) {
    const Tensor img = quantized_image(20, 30, 2);
    const Tensor small = data::resize(img, 10, 15);
    EXPECT_EQ(small.shape(), (Shape{1, 3, 10, 15}));
    const Tensor big = data::resize(img, 40, 45);
    EXPECT_EQ(big.shape(), (Shape{1, 3, 40, 45}));
    for (float v : big.data()) {
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
    }
    const Tensor flat(Shape{1, 3, 8, 8}, 0.25f);
    EXPECT_LE(max_abs_diff(data::resize(flat, 5, 7), Tensor(Shape{1, 3, 5, 7}, 0.25f)), 1e-6);
}

// ---------------------------------------------------------------- augmentation

data::AugmentationConfig full_aug() {
    data::AugmentationConfig a;
    a.resize_height = a.resize_width = 32;
    a.random_crop = 40;
    a.hflip_prob = 0.5;
    a.rotation_degrees = 10.0;
    return a;
}

TEST(Augmentation, IdenticalPairStaysIdentical) {
    const Tensor img = quantized_image(48, 48, 3);
    data::AugmentationConfig aug = full_aug();
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        Rng rng(seed);
        const auto d = data::draw_augmentation(48, 48, aug, rng);
        EXPECT_EQ(data::apply_augmentation(img, d, aug), data::apply_augmentation(img, d, aug));
    }
}

TEST(Augmentation, DrawsCoverCropFlipAndRotation) {
    const auto aug = full_aug();
    int flips = 0;
    int crops = 0;
    double max_angle = 0.0;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        Rng rng(seed);
        const auto d = data::draw_augmentation(48, 48, aug, rng);
        flips += d.flip;
        crops += d.crop;
        EXPECT_LE(d.crop_x, 8);
        EXPECT_LE(d.crop_y, 8);
        EXPECT_LE(std::fabs(d.angle), 10.0);
        max_angle = std::max(max_angle, std::fabs(d.angle));
    }
    EXPECT_GT(flips, 10);
    EXPECT_LT(flips, 54);
    EXPECT_EQ(crops, 64);
    EXPECT_GT(max_angle, 5.0);
    // No crop when the source is not larger than the crop side.
    Rng rng(1);
    EXPECT_FALSE(data::draw_augmentation(32, 32, aug, rng).crop);
}

TEST(Augmentation, GeometryOnlyIsPlainResize) {
    const Tensor img = quantized_image(48, 40, 4);
    const auto aug = full_aug().geometry_only();
    Rng rng(9);
    const auto d = data::draw_augmentation(48, 40, aug, rng);
    EXPECT_EQ(data::apply_augmentation(img, d, aug), data::resize(img, 32, 32));
}

TEST(Augmentation, NormalizeRoundTrip) {
    data::AugmentationConfig aug;
    const Tensor x = random_tensor<float>(Shape{2, 3, 8, 8}, 5, 0.0, 1.0);
    Tensor y = x;
    data::normalize(y, aug);
    EXPECT_GT(max_abs_diff(x, y), 0.1);
    EXPECT_NEAR(y.at(0, 1, 2, 3), (x.at(0, 1, 2, 3) - aug.mean[1]) / aug.std[1], 1e-6);
    data::denormalize(y, aug);
    EXPECT_LE(max_abs_diff(x, y), 1e-6);
}

TEST(Augmentation, ValidatesConfig) {
    data::AugmentationConfig a;
    a.hflip_prob = 1.5;
    EXPECT_THROW(a.validate(), ConfigError);
    a = {};
    a.resize_width = 0;
    EXPECT_THROW(a.validate(), ConfigError);
    a = {};
    a.std[0] = 0.0f;
    EXPECT_THROW(a.validate(), ConfigError);
}

// ---------------------------------------------------------------- paired data

TEST(PairedData, PairsByStemAndHonorsLimit) {
    ScratchDir dir("paired");
    write_pairs(dir.path(), 30, 16);
    const data::PairedDataset all(data::PairedDatasetSpec{dir / "hazy", dir / "clean", std::nullopt});
    EXPECT_EQ(all.size(), 30u);
    EXPECT_EQ(all.ids().front(), "000");
    EXPECT_EQ(all.raw_clean(7), data::read_image(dir.path() / "clean" / "007.png"));
    const data::PairedDataset k25(data::PairedDatasetSpec{dir / "hazy", dir / "clean", 25});
    EXPECT_EQ(k25.size(), 25u);
    const data::PairedDataset k0(data::PairedDatasetSpec{dir / "missing", dir / "missing", 0});
    EXPECT_TRUE(k0.empty());
    EXPECT_TRUE(data::load_paired(data::PairedDatasetSpec{dir / "nope", dir / "nope", 0}, {}, 1).empty());
}

TEST(PairedData, OrphanNamesTheFile) {
    ScratchDir dir("orphan");
    write_pairs(dir.path(), 3, 16);
    fs::remove(dir.path() / "clean" / "001.png");
    try {
        data::PairedDataset ds(data::PairedDatasetSpec{dir / "hazy", dir / "clean", std::nullopt});
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("001.png"), std::string::npos) << e.what();
    }
}

TEST(PairedData, UnreadableImagesAreSkippedAndRecorded) {
    ScratchDir dir("unreadable");
    write_pairs(dir.path(), 4, 16);
    { std::ofstream(dir.path() / "hazy" / "002.png") << "broken"; }
    const data::PairedDataset ds(data::PairedDatasetSpec{dir / "hazy", dir / "clean", std::nullopt});
    EXPECT_EQ(ds.size(), 3u);
    ASSERT_EQ(ds.skipped().size(), 1u);
    EXPECT_NE(ds.skipped()[0].find("002.png"), std::string::npos);
}

TEST(PairedData, EmptyDirectoryIsAnError) {
    ScratchDir dir("empty");
    fs::create_directories(dir.path() / "hazy");
    fs::create_directories(dir.path() / "clean");
    EXPECT_THROW(data::PairedDataset(data::PairedDatasetSpec{dir / "hazy", dir / "clean", std::nullopt}),
                 InputError);
}

TEST(PairedData, SeededAugmentationIsDeterministicAndShared) {
    ScratchDir dir("aug");
    write_pairs(dir.path(), 4, 48);
    const auto aug = full_aug();
    const data::PairedDatasetSpec spec{dir / "hazy", dir / "clean", std::nullopt};
    const auto a = data::load_paired(spec, aug, 7);
    const auto b = data::load_paired(spec, aug, 7);
    ASSERT_EQ(a.size(), 4u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].first, b[i].first);
        EXPECT_EQ(a[i].second, b[i].second);
        EXPECT_EQ(a[i].first.shape(), (Shape{1, 3, 32, 32}));
    }
    const auto c = data::load_paired(spec, aug, 8);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff |= !(a[i].first == c[i].first);
    EXPECT_TRUE(any_diff);

    // Same geometry on both members: with hazy == clean content the outputs match.
    ScratchDir same("same");
    fs::create_directories(same.path() / "hazy");
    fs::create_directories(same.path() / "clean");
    const Tensor img = quantized_image(48, 48, 77);
    data::write_png(same.path() / "hazy" / "x.png", img);
    data::write_png(same.path() / "clean" / "x.png", img);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto p = data::load_paired(data::PairedDatasetSpec{same / "hazy", same / "clean", std::nullopt}, aug, seed);
        EXPECT_EQ(max_abs_diff(p[0].first, p[0].second), 0.0);
    }
}

// ---------------------------------------------------------------- unpaired data

TEST(UnpairedData, SeededSubsetAndClamp) {
    ScratchDir dir("unpaired");
    fs::create_directories(dir.path());
    for (int i = 0; i < 10; ++i) data::write_png(dir.path() / (std::to_string(i) + ".png"), quantized_image(16, 16, i));
    const data::UnpairedDataset a(data::UnpairedDatasetSpec{dir.path(), 4}, 1);
    const data::UnpairedDataset b(data::UnpairedDatasetSpec{dir.path(), 4}, 1);
    EXPECT_EQ(a.size(), 4u);
    EXPECT_EQ(a.ids(), b.ids());
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const data::UnpairedDataset s(data::UnpairedDatasetSpec{dir.path(), 4}, seed);
        seen.insert(s.ids().begin(), s.ids().end());
    }
    EXPECT_GT(seen.size(), 4u);
    const data::UnpairedDataset all(data::UnpairedDatasetSpec{dir.path(), 50}, 1);
    EXPECT_EQ(all.size(), 10u);
    for (const auto& t : data::load_unpaired(data::UnpairedDatasetSpec{dir.path(), 3}, full_aug(), 2)) {
        for (float v : t.data()) {
            ASSERT_GE(v, 0.0f);
            ASSERT_LE(v, 1.0f);
        }
    }
    ScratchDir empty("unpaired_empty");
    EXPECT_THROW(data::UnpairedDataset(data::UnpairedDatasetSpec{empty.path(), std::nullopt}, 0), InputError);
}

TEST(StreamIndex, EveryCycleIsAPermutation) {
    const std::size_t n = 7;
    for (std::uint64_t cycle = 0; cycle < 4; ++cycle) {
        std::set<std::size_t> seen;
        for (std::uint64_t pos = 0; pos < n; ++pos) seen.insert(data::stream_index(n, 3, 11, cycle * n + pos));
        EXPECT_EQ(seen.size(), n);
    }
    EXPECT_EQ(data::stream_index(n, 3, 11, 12), data::stream_index(n, 3, 11, 12));
    EXPECT_THROW(data::stream_index(0, 3, 11, 0), InputError);
}

// ---------------------------------------------------------------- degradation

TEST(Degradation, HazeClosedForm) {
    const Tensor black(Shape{1, 3, 8, 8}, 0.0f);
    const Tensor out = data::synthesize_degradation(black, data::Degradation::haze, 1.0, 0);
    for (float v : out.data()) EXPECT_NEAR(v, 0.72f, 1e-6f);
    const Tensor img = quantized_image(16, 16, 5);
    const Tensor half = data::synthesize_degradation(img, data::Degradation::haze, 0.5, 0);
    for (std::size_t i = 0; i < img.numel(); ++i) {
        EXPECT_NEAR(half.data()[i], img.data()[i] * 0.6f + 0.9f * 0.4f, 1e-6f);
    }
}

TEST(Degradation, VanishingSeverityIsIdentity) {
    const Tensor img = quantized_image(32, 32, 6);
    for (auto kind : {data::Degradation::haze, data::Degradation::rain, data::Degradation::snow}) {
        EXPECT_LE(max_abs_diff(data::synthesize_degradation(img, kind, 0.0, 3), img), 1e-6)
            << data::degradation_name(kind);
        EXPECT_LE(max_abs_diff(data::synthesize_degradation(img, kind, 1e-7, 3), img), 1e-6)
            << data::degradation_name(kind);
    }
}

TEST(Degradation, SeededMasksAndClipping) {
    const Tensor img = data::procedural_scene(48, 48, 1);
    for (auto kind : {data::Degradation::rain, data::Degradation::snow}) {
        const Tensor a = data::synthesize_degradation(img, kind, 0.7, 10);
        const Tensor b = data::synthesize_degradation(img, kind, 0.7, 10);
        const Tensor c = data::synthesize_degradation(img, kind, 0.7, 11);
        EXPECT_EQ(a, b);
        EXPECT_FALSE(a == c);
        for (float v : a.data()) {
            ASSERT_GE(v, 0.0f);
            ASSERT_LE(v, 1.0f);
        }
    }
    EXPECT_THROW(data::synthesize_degradation(img, data::Degradation::haze, 1.5, 0), InputError);
}

TEST(Degradation, PsnrFallsWithSeverity) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Tensor clean = data::procedural_scene(64, 64, seed);
        for (auto kind : {data::Degradation::haze, data::Degradation::rain, data::Degradation::snow}) {
            double prev = 1e9;
            for (double s : {0.2, 0.5, 0.8}) {
                const double p = metrics::psnr(data::synthesize_degradation(clean, kind, s, seed), clean);
                EXPECT_LT(p, prev) << data::degradation_name(kind) << " seed " << seed << " severity " << s;
                prev = p;
            }
        }
    }
}

TEST(Degradation, NamesRoundTrip) {
    for (auto kind : {data::Degradation::haze, data::Degradation::rain, data::Degradation::snow}) {
        EXPECT_EQ(data::parse_degradation(data::degradation_name(kind)), kind);
    }
    EXPECT_FALSE(data::parse_degradation("fog").has_value());
}

TEST(ToyDataset, WritesStandardLayout) {
    ScratchDir dir("toy");
    data::ToyDatasetOptions opt;
    opt.paired = 5;
    opt.unpaired = 3;
    opt.test = 2;
    opt.size = 24;
    opt.seed = 4;
    data::write_toy_dataset(dir.path(), opt);
    const data::DatasetLayout layout{dir.path()};
    EXPECT_EQ(data::list_images(layout.paired_hazy()).size(), 5u);
    EXPECT_EQ(data::list_images(layout.paired_clean()).size(), 5u);
    EXPECT_EQ(data::list_images(layout.unpaired_hazy()).size(), 3u);
    EXPECT_EQ(data::list_images(layout.unpaired_clean()).size(), 3u);
    EXPECT_EQ(data::list_images(layout.test_hazy()).size(), 2u);
    const data::PairedDataset ds(data::PairedDatasetSpec{layout.paired_hazy(), layout.paired_clean(), std::nullopt});
    EXPECT_EQ(ds.raw_hazy(0).shape(), (Shape{1, 3, 24, 24}));
    // Degraded inputs are worse than a perfect restoration.
    EXPECT_LT(metrics::psnr(ds.raw_hazy(0), ds.raw_clean(0)), 40.0);

    ScratchDir again("toy2");
    data::write_toy_dataset(again.path(), opt);
    EXPECT_EQ(data::read_image(layout.paired_hazy() / "0000.png"),
              data::read_image(again.path() / "paired" / "hazy" / "0000.png"));
}

}  // namespace
