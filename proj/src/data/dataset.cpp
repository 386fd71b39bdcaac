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

#include "haze/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>
#include <spdlog/spdlog.h>

#include "haze/data/image_io.hpp"

namespace haze::data {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kAugmentStream = 0x61756731;

Tensor crop(const Tensor& t, int y0, int x0, int h, int w) {
    Tensor out = Tensor::uninitialized(Shape{t.n(), t.c(), h, w});
    for (int b = 0; b < t.n(); ++b) {
        for (int c = 0; c < t.c(); ++c) {
            for (int y = 0; y < h; ++y) {
                const float* src = t.plane(b, c) + static_cast<std::size_t>(y0 + y) * t.w() + x0;
                std::copy(src, src + w, out.plane(b, c) + static_cast<std::size_t>(y) * w);
            }
        }
    }
    return out;
}

void hflip(Tensor& t) {
    for (int b = 0; b < t.n(); ++b) {
        for (int c = 0; c < t.c(); ++c) {
            for (int y = 0; y < t.h(); ++y) {
                float* row = t.plane(b, c) + static_cast<std::size_t>(y) * t.w();
                std::reverse(row, row + t.w());
            }
        }
    }
}

void rotate(Tensor& t, double degrees) {
    const cv::Point2f center(static_cast<float>(t.w() - 1) / 2.0f, static_cast<float>(t.h() - 1) / 2.0f);
    const cv::Mat m = cv::getRotationMatrix2D(center, degrees, 1.0);
    std::vector<float> tmp(t.shape().plane());
    for (int b = 0; b < t.n(); ++b) {
        for (int c = 0; c < t.c(); ++c) {
            std::copy(t.plane(b, c), t.plane(b, c) + tmp.size(), tmp.begin());
            const cv::Mat src(t.h(), t.w(), CV_32F, tmp.data());
            cv::Mat dst(t.h(), t.w(), CV_32F, t.plane(b, c));
            cv::warpAffine(src, dst, m, dst.size(), cv::INTER_LINEAR, cv::BORDER_REFLECT_101);
        }
    }
}

Tensor decode_or_record(const fs::path& p, std::vector<std::string>& skipped, bool& ok) {
    try {
        ok = true;
        return read_image(p);
    } catch (const InputError& e) {
        spdlog::warn("skipping unreadable image: {}", e.what());
        skipped.push_back(p.string());
        ok = false;
        return {};
    }
}

}  // namespace

void AugmentationConfig::validate() const {
    if (resize_height <= 0 || resize_width <= 0) throw ConfigError("resize extent must be positive");
    if (random_crop && *random_crop <= 0) throw ConfigError("random_crop must be positive");
    if (hflip_prob < 0.0 || hflip_prob > 1.0) throw ConfigError("hflip_prob must lie in [0, 1]");
    if (rotation_degrees < 0.0) throw ConfigError("rotation_degrees must be non-negative");
    for (float s : std) {
        if (!(s > 0.0f)) throw ConfigError("normalization std components must be positive");
    }
}

AugmentationConfig AugmentationConfig::geometry_only() const {
    AugmentationConfig c = *this;
    c.random_crop.reset();
    c.hflip_prob = 0.0;
    c.rotation_degrees = 0.0;
    c.normalize = false;
    return c;
}

void normalize(Tensor& t, const AugmentationConfig& cfg) {
    if (t.c() != 3) throw InputError("normalize expects 3 channels");
    for (int b = 0; b < t.n(); ++b) {
        for (int c = 0; c < 3; ++c) {
            float* p = t.plane(b, c);
            for (std::size_t i = 0; i < t.shape().plane(); ++i) p[i] = (p[i] - cfg.mean[c]) / cfg.std[c];
        }
    }
}

void denormalize(Tensor& t, const AugmentationConfig& cfg) {
    if (t.c() != 3) throw InputError("denormalize expects 3 channels");
    for (int b = 0; b < t.n(); ++b) {
        for (int c = 0; c < 3; ++c) {
            float* p = t.plane(b, c);
            for (std::size_t i = 0; i < t.shape().plane(); ++i) p[i] = p[i] * cfg.std[c] + cfg.mean[c];
        }
    }
}

AugmentDraw draw_augmentation(int src_h, int src_w, const AugmentationConfig& cfg, Rng& rng) {
    AugmentDraw d;
    // Fixed draw order keeps the stream stable whichever options are active.
    const double u_x = rng.uniform();
    const double u_y = rng.uniform();
    const double u_flip = rng.uniform();
    const double u_rot = rng.uniform();
    if (cfg.random_crop) {
        const int side = *cfg.random_crop;
        if (src_h >= side && src_w >= side && (src_h > side || src_w > side)) {
            d.crop = true;
            d.crop_x = static_cast<int>(u_x * (src_w - side + 1));
            d.crop_y = static_cast<int>(u_y * (src_h - side + 1));
        }
    }
    d.flip = u_flip < cfg.hflip_prob;
    d.angle = cfg.rotation_degrees > 0.0 ? (2.0 * u_rot - 1.0) * cfg.rotation_degrees : 0.0;
    return d;
}

Tensor apply_augmentation(const Tensor& img, const AugmentDraw& d, const AugmentationConfig& cfg) {
    Tensor t = img;
    if (d.crop) t = crop(t, d.crop_y, d.crop_x, *cfg.random_crop, *cfg.random_crop);
    t = resize(t, cfg.resize_height, cfg.resize_width);
    if (d.flip) hflip(t);
    if (d.angle != 0.0) rotate(t, d.angle);
    for (float& v : t.data()) v = std::clamp(v, 0.0f, 1.0f);
    if (cfg.normalize) normalize(t, cfg);
    return t;
}

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && is_supported_image(e.path())) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

PairedDataset::PairedDataset(const PairedDatasetSpec& spec) {
    if (spec.limit && *spec.limit < 0) throw ConfigError("paired limit must be non-negative");
    if (spec.limit && *spec.limit == 0) return;
    const auto hazy = list_images(spec.hazy_dir);
    if (hazy.empty()) throw InputError("no images in " + spec.hazy_dir.string());
    std::map<std::string, fs::path> clean;
    for (const auto& p : list_images(spec.clean_dir)) clean.emplace(p.stem().string(), p);

    const std::size_t want = spec.limit ? static_cast<std::size_t>(*spec.limit) : hazy.size();
    for (const auto& hp : hazy) {
        if (ids_.size() >= want) break;
        const std::string stem = hp.stem().string();
        const auto it = clean.find(stem);
        if (it == clean.end()) {
            throw InputError("hazy image " + hp.string() + " has no clean counterpart named '" + stem +
                             ".*' in " + spec.clean_dir.string());
        }
        bool ok_h = false;
        bool ok_c = false;
        Tensor h = decode_or_record(hp, skipped_, ok_h);
        Tensor c = ok_h ? decode_or_record(it->second, skipped_, ok_c) : Tensor{};
        if (!ok_h || !ok_c) continue;
        if (c.shape() != h.shape()) c = resize(c, h.h(), h.w());
        ids_.push_back(stem);
        hazy_.push_back(std::move(h));
        clean_.push_back(std::move(c));
    }
    if (spec.limit && ids_.size() < want) {
        spdlog::warn("requested {} pairs but only {} are available in {}", want, ids_.size(),
                     spec.hazy_dir.string());
    }
}

Pair PairedDataset::get(std::size_t i, const AugmentationConfig& aug, std::uint64_t sample_seed) const {
    const Tensor& h = hazy_.at(i);
    Rng rng(sample_seed);
    const AugmentDraw d = draw_augmentation(h.h(), h.w(), aug, rng);
    return Pair{ids_[i], apply_augmentation(h, d, aug), apply_augmentation(clean_[i], d, aug)};
}

UnpairedDataset::UnpairedDataset(const UnpairedDatasetSpec& spec, std::uint64_t seed) {
    auto files = list_images(spec.image_dir);
    if (files.empty()) throw InputError("no images in " + spec.image_dir.string());
    if (spec.sample_count) {
        if (*spec.sample_count <= 0) throw ConfigError("sample_count must be positive");
        const auto want = static_cast<std::size_t>(*spec.sample_count);
        if (want > files.size()) {
            spdlog::warn("sample_count {} exceeds the {} images in {}; using all", want, files.size(),
                         spec.image_dir.string());
        } else {
            Rng rng(derive_seed(seed, 0x756e70));
            const auto perm = rng.permutation(files.size());
            std::vector<fs::path> picked;
            for (std::size_t k = 0; k < want; ++k) picked.push_back(files[perm[k]]);
            std::sort(picked.begin(), picked.end());
            files = std::move(picked);
        }
    }
    for (const auto& p : files) {
        bool ok = false;
        Tensor t = decode_or_record(p, skipped_, ok);
        if (!ok) continue;
        ids_.push_back(p.stem().string());
        images_.push_back(std::move(t));
    }
    if (ids_.empty()) throw InputError("no readable images in " + spec.image_dir.string());
}

Tensor UnpairedDataset::get(std::size_t i, const AugmentationConfig& aug, std::uint64_t sample_seed) const {
    const Tensor& t = images_.at(i);
    Rng rng(sample_seed);
    return apply_augmentation(t, draw_augmentation(t.h(), t.w(), aug, rng), aug);
}

std::vector<std::pair<Tensor, Tensor>> load_paired(const PairedDatasetSpec& spec,
                                                   const AugmentationConfig& aug, std::uint64_t seed) {
    aug.validate();
    const PairedDataset ds(spec);
    std::vector<std::pair<Tensor, Tensor>> out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        Pair p = ds.get(i, aug, derive_seed(seed, kAugmentStream, i));
        out.emplace_back(std::move(p.hazy), std::move(p.clean));
    }
    return out;
}

std::vector<Tensor> load_unpaired(const UnpairedDatasetSpec& spec, const AugmentationConfig& aug,
                                  std::uint64_t seed) {
    aug.validate();
    const UnpairedDataset ds(spec, seed);
    std::vector<Tensor> out;
    for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(ds.get(i, aug, derive_seed(seed, kAugmentStream, i)));
    return out;
}

std::size_t stream_index(std::size_t n, std::uint64_t seed, std::uint64_t stream, std::uint64_t g) {
    if (n == 0) throw InputError("cannot draw from an empty dataset");
    const std::uint64_t cycle = g / n;
    const std::uint64_t pos = g % n;
    Rng rng(derive_seed(seed, stream, cycle));
    return rng.permutation(n)[pos];
}

}  // namespace haze::data
