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

#include "haze/train/evaluate.hpp"

#include <fstream>
#include <map>

#include <spdlog/spdlog.h>

#include "haze/data/image_io.hpp"
#include "haze/train/trainer.hpp"

namespace haze::train {

namespace fs = std::filesystem;

std::vector<metrics::MetricReport> evaluate(const nn::FFA& net, const data::AugmentationConfig& model_aug,
                                            const fs::path& hazy_dir, const std::optional<fs::path>& clean_dir,
                                            const EvalOptions& opt) {
    std::map<std::string, fs::path> refs;
    if (clean_dir && fs::is_directory(*clean_dir)) {
        for (const auto& p : data::list_images(*clean_dir)) refs.emplace(p.stem().string(), p);
    }
    auto fit = [&](const Tensor& t) {
        const int h = opt.resize_height.value_or(t.h());
        const int w = opt.resize_width.value_or(t.w());
        return data::resize(t, h, w);
    };
    std::vector<metrics::MetricReport> rows;
    for (const auto& hp : data::list_images(hazy_dir)) {
        Tensor hazy;
        try {
            hazy = fit(data::read_image(hp));
        } catch (const InputError& e) {
            spdlog::warn("skipping {}", e.what());
            continue;
        }
        const Tensor out = run_generator(net, hazy, model_aug);
        metrics::MetricReport row{hp.stem().string(), opt.variant, std::nullopt, std::nullopt};
        if (const auto it = refs.find(row.image_id); it != refs.end()) {
            try {
                const Tensor ref = data::resize(data::read_image(it->second), out.h(), out.w());
                row.psnr_db = metrics::psnr(out, ref);
                row.ssim = metrics::ssim(out, ref);
            } catch (const InputError& e) {
                spdlog::warn("reference unusable, metrics omitted: {}", e.what());
            }
        }
        if (!opt.output_dir.empty()) data::write_png(opt.output_dir / (row.image_id + ".png"), out);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<metrics::MetricReport> evaluate(const Checkpoint& ckpt, const fs::path& hazy_dir,
                                            const std::optional<fs::path>& clean_dir, const EvalOptions& opt) {
    const nn::FFA net = load_generator(ckpt);
    EvalOptions o = opt;
    if (o.variant.empty()) o.variant = ckpt.variant;
    return evaluate(net, ckpt.aug, hazy_dir, clean_dir, o);
}

void write_report(const fs::path& stem, const std::vector<metrics::MetricReport>& rows) {
    if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
    std::ofstream csv(fs::path(stem.string() + ".csv"));
    metrics::write_csv(csv, rows);
    std::ofstream js(fs::path(stem.string() + ".json"));
    js << metrics::to_json(rows) << '\n';
    if (!csv || !js) throw Error("cannot write report " + stem.string());
}

}  // namespace haze::train
