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

#include "haze/train/grid.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "haze/train/evaluate.hpp"
#include "haze/train/trainer.hpp"

namespace haze::train {

namespace fs = std::filesystem;

namespace {

struct EvalSplit {
    fs::path hazy;
    fs::path clean;
};

EvalSplit eval_split(const data::DatasetLayout& layout) {
    if (fs::is_directory(layout.test_hazy())) return {layout.test_hazy(), layout.test_clean()};
    return {layout.paired_hazy(), layout.paired_clean()};
}

metrics::MetricSummary score(const Checkpoint& ckpt, const EvalSplit& split, const data::AugmentationConfig& aug) {
    EvalOptions eo;
    eo.resize_height = aug.resize_height;
    eo.resize_width = aug.resize_width;
    return metrics::summarize(evaluate(ckpt, split.hazy, split.clean, eo));
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

Checkpoint final_checkpoint(GanTrainer& t, const TrainConfig& cfg) {
    t.run();
    Checkpoint c = t.checkpoint();
    if (cfg.write_files) {
        // Reload what run() wrote, proving the artifact is loadable.
        const fs::path p = fs::path(cfg.checkpoint_dir) / checkpoint_filename(c.phase, c.variant, c.epoch);
        return load_checkpoint(p);
    }
    return c;
}

}  // namespace

bool GridResult::ok() const {
    for (const auto& r : rows) {
        if (!r.error.empty()) return false;
    }
    return true;
}

GridResult run_grid(const GridOptions& opt) {
    const data::DatasetLayout layout{opt.data_root};
    const EvalSplit split = eval_split(layout);
    fs::create_directories(opt.out_dir);

    data::AugmentationConfig gan_aug = opt.aug;
    gan_aug.normalize = false;
    const data::UnpairedDataset hazy(data::UnpairedDatasetSpec{layout.unpaired_hazy(), std::nullopt}, opt.gan.seed);
    const data::UnpairedDataset clean(data::UnpairedDatasetSpec{layout.unpaired_clean(), std::nullopt}, opt.gan.seed);

    Checkpoint base;
    if (opt.base_checkpoint) {
        base = load_checkpoint(*opt.base_checkpoint);
    } else {
        const data::PairedDataset paired(data::PairedDatasetSpec{layout.paired_hazy(), layout.paired_clean(), std::nullopt});
        TrainConfig pre = opt.pretrain;
        pre.checkpoint_dir = (opt.out_dir / "pretrain").string();
        spdlog::info("grid: supervised pretraining on {} pairs", paired.size());
        const Checkpoint ffa = train_ffa(pre, opt.ffa, opt.aug, paired);
        TrainConfig g = opt.gan;
        g.checkpoint_dir = (opt.out_dir / "gan").string();
        spdlog::info("grid: unpaired GAN training");
        GanTrainer t(g, &ffa, ffa.ffa, opt.disc, opt.loss, gan_aug, GanData{&hazy, &clean, nullptr, nullptr});
        base = final_checkpoint(t, g);
    }
    if (base.phase == Phase::ffa_pretrain) throw CheckpointError("grid needs a GAN checkpoint to fine-tune");

    GridResult result;
    for (int k : opt.ks) {
        GridRow row;
        row.k = k;
        try {
            spdlog::info("grid: fine-tuning K={}", k);
            std::optional<data::PairedDataset> pairs;
            if (k > 0) {
                pairs.emplace(data::PairedDatasetSpec{layout.paired_hazy(), layout.paired_clean(), k});
            }
            TrainConfig ft = opt.finetune;
            ft.phase = Phase::finetune;
            ft.k_paired = k;
            ft.checkpoint_dir = opt.out_dir.string();
            GanTrainer t(ft, &base, base.ffa, base.disc, opt.loss, gan_aug,
                         GanData{&hazy, &clean, pairs ? &*pairs : nullptr, nullptr});
            const Checkpoint c = final_checkpoint(t, ft);
            row.checkpoint = fs::path(ft.checkpoint_dir) / checkpoint_filename(c.phase, c.variant, c.epoch);
            const auto s = score(c, split, opt.aug);
            if (s.count > 0) {
                row.ssim = s.mean_ssim;
                row.psnr_db = s.mean_psnr_db;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
            spdlog::error("grid cell K={} failed: {}", k, e.what());
        }
        result.rows.push_back(std::move(row));
    }

    std::ofstream md(opt.out_dir / "grid.md");
    md << format_grid_table(result.rows);
    std::ofstream csv(opt.out_dir / "grid.csv");
    csv << "k,ssim,psnr_db,checkpoint,error\n";
    for (const auto& r : result.rows) {
        csv << r.k << ',' << (r.ssim ? fixed(*r.ssim, 6) : "") << ',' << (r.psnr_db ? fixed(*r.psnr_db, 4) : "") << ','
            << r.checkpoint.string() << ',' << '"' << r.error << '"' << '\n';
    }
    std::ofstream manifest(opt.out_dir / "variants.json");
    manifest << reported_manifest().dump(2) << '\n';
    return result;
}

std::string format_grid_table(const std::vector<GridRow>& rows) {
    std::ostringstream os;
    os << "| Number of Images | SSIM | PSNR (dB) |\n";
    os << "|---|---|---|\n";
    for (const auto& r : rows) {
        os << "| " << r.k << " | " << (r.ssim ? fixed(*r.ssim, 4) : "failed") << " | "
           << (r.psnr_db ? fixed(*r.psnr_db, 2) : "failed") << " |\n";
    }
    return os.str();
}

std::vector<LearningRateRow> run_lr_grid(const GridOptions& opt, const std::vector<double>& lrs) {
    const data::DatasetLayout layout{opt.data_root};
    const EvalSplit split = eval_split(layout);
    fs::create_directories(opt.out_dir);
    const data::PairedDataset paired(data::PairedDatasetSpec{layout.paired_hazy(), layout.paired_clean(), std::nullopt});
    std::vector<LearningRateRow> rows;
    for (double lr : lrs) {
        LearningRateRow row;
        row.lr = lr;
        try {
            TrainConfig pre = opt.pretrain;
            pre.lr = lr;
            pre.checkpoint_dir = (opt.out_dir / ("lr_" + fixed(lr, 6))).string();
            const Checkpoint c = train_ffa(pre, opt.ffa, opt.aug, paired);
            const auto s = score(c, split, opt.aug);
            if (s.count > 0) {
                row.ssim = s.mean_ssim;
                row.psnr_db = s.mean_psnr_db;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
            spdlog::error("lr grid cell {} failed: {}", lr, e.what());
        }
        rows.push_back(std::move(row));
    }
    std::ofstream md(opt.out_dir / "lr_grid.md");
    md << format_lr_table(rows);
    std::ofstream csv(opt.out_dir / "lr_grid.csv");
    csv << "learning_rate,ssim,psnr_db,error\n";
    for (const auto& r : rows) {
        csv << r.lr << ',' << (r.ssim ? fixed(*r.ssim, 6) : "") << ',' << (r.psnr_db ? fixed(*r.psnr_db, 4) : "") << ",\""
            << r.error << "\"\n";
    }
    return rows;
}

std::string format_lr_table(const std::vector<LearningRateRow>& rows) {
    std::ostringstream os;
    os << "| Learning Rate | SSIM | PSNR (dB) |\n";
    os << "|---|---|---|\n";
    for (const auto& r : rows) {
        std::ostringstream lr;
        lr << r.lr;
        os << "| " << lr.str() << " | " << (r.ssim ? fixed(*r.ssim, 2) : "failed") << " | "
           << (r.psnr_db ? fixed(*r.psnr_db, 1) : "failed") << " |\n";
    }
    return os.str();
}

}  // namespace haze::train
