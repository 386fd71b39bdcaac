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

#include "haze/data/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "haze/data/dataset.hpp"
#include "haze/data/image_io.hpp"
#include "haze/random.hpp"

namespace haze::data {

std::optional<Degradation> parse_degradation(std::string_view name) {
    if (name == "haze") return Degradation::haze;
    if (name == "rain") return Degradation::rain;
    if (name == "snow") return Degradation::snow;
    return std::nullopt;
}

std::string_view degradation_name(Degradation d) {
    switch (d) {
        case Degradation::haze: return "haze";
        case Degradation::rain: return "rain";
        case Degradation::snow: return "snow";
    }
    return "?";
}

namespace {

// Draws streaks or blobs into a single-channel additive mask.
void rain_mask(std::vector<float>& mask, int h, int w, double severity, Rng& rng) {
    const int count = static_cast<int>(std::lround(severity * h * w / 60.0));
    const double slant = rng.uniform(-0.3, 0.3);
    const float level = static_cast<float>(0.8 * severity);
    for (int s = 0; s < count; ++s) {
        const double x0 = rng.uniform(0.0, w);
        const double y0 = rng.uniform(0.0, h);
        const int len = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(2, h / 8))));
        const float a = level * static_cast<float>(rng.uniform(0.5, 1.0));
        for (int t = 0; t < len; ++t) {
            const int y = static_cast<int>(y0) + t;
            const int x = static_cast<int>(std::lround(x0 + slant * t));
            if (y < 0 || y >= h || x < 0 || x >= w) continue;
            float& m = mask[static_cast<std::size_t>(y) * w + x];
            m = std::max(m, a);
        }
    }
}

void snow_mask(std::vector<float>& mask, int h, int w, double severity, Rng& rng) {
    const int count = static_cast<int>(std::lround(severity * h * w / 80.0));
    const float level = static_cast<float>(0.9 * severity);
    for (int s = 0; s < count; ++s) {
        const double cx = rng.uniform(0.0, w);
        const double cy = rng.uniform(0.0, h);
        const double r = rng.uniform(0.6, 2.0);
        const float a = level * static_cast<float>(rng.uniform(0.6, 1.0));
        const int x0 = std::max(0, static_cast<int>(cx - 2 * r));
        const int x1 = std::min(w - 1, static_cast<int>(cx + 2 * r));
        const int y0 = std::max(0, static_cast<int>(cy - 2 * r));
        const int y1 = std::min(h - 1, static_cast<int>(cy + 2 * r));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                const float v = a * static_cast<float>(std::exp(-d2 / (2 * r * r)));
                float& m = mask[static_cast<std::size_t>(y) * w + x];
                m = std::max(m, v);
            }
        }
    }
}

}  // namespace

Tensor synthesize_degradation(const Tensor& clean, Degradation kind, double severity, std::uint64_t seed) {
    if (!(severity >= 0.0 && severity <= 1.0)) throw InputError("severity must lie in [0, 1]");
    Tensor out = clean;
    if (kind == Degradation::haze) {
        const float t = static_cast<float>(1.0 - 0.8 * severity);
        const float air = kAirlight * (1.0f - t);
        for (float& v : out.data()) v = std::clamp(v * t + air, 0.0f, 1.0f);
        return out;
    }
    const int h = clean.h();
    const int w = clean.w();
    std::vector<float> mask(clean.shape().plane());
    for (int b = 0; b < clean.n(); ++b) {
        std::fill(mask.begin(), mask.end(), 0.0f);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kind) + 1, static_cast<std::uint64_t>(b)));
        if (kind == Degradation::rain) {
            rain_mask(mask, h, w, severity, rng);
        } else {
            snow_mask(mask, h, w, severity, rng);
        }
        for (int c = 0; c < clean.c(); ++c) {
            float* p = out.plane(b, c);
            for (std::size_t i = 0; i < mask.size(); ++i) p[i] = std::clamp(p[i] + mask[i], 0.0f, 1.0f);
        }
    }
    return out;
}

Tensor procedural_scene(int height, int width, std::uint64_t seed) {
    if (height <= 0 || width <= 0) throw InputError("scene extent must be positive");
    Rng rng(seed);
    Tensor t(Shape{1, 3, height, width});
    float sky_top[3];
    float sky_bottom[3];
    float ground[3];
    for (int c = 0; c < 3; ++c) {
        sky_top[c] = static_cast<float>(rng.uniform(0.2, 0.6));
        sky_bottom[c] = static_cast<float>(rng.uniform(0.5, 0.9));
        ground[c] = static_cast<float>(rng.uniform(0.05, 0.5));
    }
    const int horizon = static_cast<int>(height * rng.uniform(0.35, 0.65));
    const double freq = rng.uniform(0.1, 0.6);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < 3; ++c) {
                float v;
                if (y < horizon) {
                    const float a = static_cast<float>(y) / static_cast<float>(std::max(1, horizon));
                    v = sky_top[c] * (1 - a) + sky_bottom[c] * a;
                } else {
                    v = ground[c] + 0.08f * static_cast<float>(std::sin(freq * x + 0.7 * y));
                }
                t.at(0, c, y, x) = v;
            }
        }
    }
    const int shapes = 3 + static_cast<int>(rng.below(5));
    for (int s = 0; s < shapes; ++s) {
        float color[3];
        for (float& c : color) c = static_cast<float>(rng.uniform(0.0, 1.0));
        const bool disc = rng.bernoulli(0.5);
        const double cx = rng.uniform(0.0, width);
        const double cy = rng.uniform(0.0, height);
        const double rx = rng.uniform(0.05, 0.25) * width;
        const double ry = rng.uniform(0.05, 0.25) * height;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double dx = (x - cx) / rx;
                const double dy = (y - cy) / ry;
                const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
                if (!inside) continue;
                for (int c = 0; c < 3; ++c) t.at(0, c, y, x) = color[c];
            }
        }
    }
    for (float& v : t.data()) v = std::clamp(v, 0.0f, 1.0f);
    return t;
}

void write_toy_dataset(const std::filesystem::path& root, const ToyDatasetOptions& opt) {
    if (opt.size < 16) throw ConfigError("toy dataset images must be at least 16 pixels");
    if (!(opt.severity_min > 0.0 && opt.severity_min <= opt.severity_max && opt.severity_max <= 1.0)) {
        throw ConfigError("severity range must satisfy 0 < min <= max <= 1");
    }
    const DatasetLayout layout{root};
    auto name = [](int i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%04d.png", i);
        return std::string(buf);
    };
    std::uint64_t scene = 0;
    auto make = [&](std::uint64_t stream, int i, Tensor* clean, Tensor* hazy) {
        const Tensor c = procedural_scene(opt.size, opt.size, derive_seed(opt.seed, stream, scene++));
        Rng rng(derive_seed(opt.seed, stream + 100, static_cast<std::uint64_t>(i)));
        const double sev = rng.uniform(opt.severity_min, opt.severity_max);
        if (clean != nullptr) *clean = c;
        if (hazy != nullptr) *hazy = synthesize_degradation(c, opt.kind, sev, rng.next_u64());
    };
    Tensor c;
    Tensor h;
    for (int i = 0; i < opt.paired; ++i) {
        make(1, i, &c, &h);
        write_png(layout.paired_clean() / name(i), c);
        write_png(layout.paired_hazy() / name(i), h);
    }
    for (int i = 0; i < opt.test; ++i) {
        make(2, i, &c, &h);
        write_png(layout.test_clean() / name(i), c);
        write_png(layout.test_hazy() / name(i), h);
    }
    // Unpaired domains come from disjoint scenes.
    for (int i = 0; i < opt.unpaired; ++i) {
        make(3, i, nullptr, &h);
        write_png(layout.unpaired_hazy() / name(i), h);
        make(4, i, &c, nullptr);
        write_png(layout.unpaired_clean() / name(i), c);
    }
}

}  // namespace haze::data
