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

#include "haze/cli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "haze/data/degrade.hpp"
#include "haze/data/image_io.hpp"
#include "haze/metrics/metrics.hpp"
#include "haze/train/evaluate.hpp"
#include "haze/train/grid.hpp"
#include "haze/train/trainer.hpp"

namespace haze::cli {

namespace fs = std::filesystem;
using train::Phase;
using train::TrainConfig;

namespace {

struct Options {
    std::string data_root = "data";
    std::optional<std::string> checkpoint;
    std::optional<int> k_paired;
    std::optional<double> lr;
    std::optional<int> epochs;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
    std::string device = "cpu";
    std::string profile = "default";

    std::optional<int> batch_size;
    std::optional<int> grad_accum;
    std::optional<std::int64_t> max_steps;
    std::optional<int> checkpoint_every;
    std::optional<std::int64_t> sample_every;
    std::optional<int> image_size;
    std::optional<int> unpaired_count;
    std::optional<double> supervised_weight;
    std::optional<double> lambda_cycle;
    std::optional<double> hflip;
    std::optional<double> rotation;
    std::optional<bool> normalize;
    bool no_epoch_metrics = false;

    std::optional<int> groups;
    std::optional<int> blocks;
    std::optional<int> features;
    std::optional<int> disc_base;
    std::optional<int> disc_layers;

    // grid
    std::vector<int> ks{std::begin(train::kVariantCounts), std::end(train::kVariantCounts)};
    std::vector<double> lr_grid;
    // evaluate / restore / synthesize
    std::optional<std::string> input;
    std::optional<std::string> reference;
    std::optional<std::string> hazy_dir;
    std::optional<std::string> clean_dir;
    bool save_images = false;
    std::string kind = "haze";
    double severity = 0.5;
    double severity_min = 0.4;
    double severity_max = 0.8;
    int toy_paired = 30;
    int toy_unpaired = 12;
    int toy_test = 6;
    int toy_size = 64;
};

/// Values the smoke profile substitutes for unset flags: a tiny network on
/// 32x32 images, sized to finish the full grid in minutes on one core.
void apply_profile(Options& o) {
    if (o.profile != "smoke") return;
    auto fill = [](auto& field, auto value) {
        if (!field) field = value;
    };
    fill(o.image_size, 32);
    fill(o.groups, 1);
    fill(o.blocks, 1);
    fill(o.features, 8);
    fill(o.disc_base, 8);
    fill(o.disc_layers, 3);
    fill(o.epochs, 2);
    fill(o.max_steps, std::int64_t{40});
    fill(o.checkpoint_every, 0);
    fill(o.hflip, 0.0);
    fill(o.rotation, 0.0);
}

fs::path home_dir() {
    const char* v = std::getenv("HAZE_RESTORE_HOME");
    return v != nullptr && *v != '\0' ? fs::path(v) : fs::path("checkpoints");
}

fs::path out_dir(const Options& o) { return o.out ? fs::path(*o.out) : home_dir(); }

/// Newest "{prefix}{epoch}.ckpt" in dir.
std::optional<fs::path> latest_checkpoint(const fs::path& dir, const std::string& prefix) {
    std::optional<fs::path> best;
    long long best_epoch = -1;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
        const std::string name = e.path().filename().string();
        if (!name.starts_with(prefix) || !name.ends_with(".ckpt")) continue;
        const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 5);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
        const long long epoch = std::stoll(digits);
        if (epoch > best_epoch) {
            best_epoch = epoch;
            best = e.path();
        }
    }
    return best;
}

fs::path require_checkpoint(const Options& o, const std::string& fallback_prefix) {
    if (o.checkpoint) return *o.checkpoint;
    if (auto p = latest_checkpoint(home_dir(), fallback_prefix)) {
        spdlog::info("using {}", p->string());
        return *p;
    }
    throw ConfigError("--checkpoint is required (no " + fallback_prefix + "*.ckpt in " + home_dir().string() + ")");
}

TrainConfig train_config(const Options& o, Phase phase) {
    TrainConfig c = TrainConfig::defaults_for(phase);
    if (o.lr) c.lr = *o.lr;
    if (o.epochs) c.epochs = *o.epochs;
    if (o.batch_size) c.batch_size = *o.batch_size;
    if (o.grad_accum) c.grad_accum_steps = *o.grad_accum;
    if (o.max_steps) c.max_steps = *o.max_steps;
    if (o.checkpoint_every) c.checkpoint_every_epochs = *o.checkpoint_every;
    if (o.sample_every) c.sample_every = *o.sample_every;
    if (o.supervised_weight) c.supervised_weight = *o.supervised_weight;
    if (phase == Phase::finetune && o.k_paired) c.k_paired = *o.k_paired;
    c.seed = o.seed;
    c.checkpoint_dir = out_dir(o).string();
    c.epoch_metrics = !o.no_epoch_metrics;
    return c;
}

nn::FFAConfig ffa_config(const Options& o) {
    nn::FFAConfig c;
    if (o.groups) c.num_groups = *o.groups;
    if (o.blocks) c.blocks_per_group = *o.blocks;
    if (o.features) {
        c.feature_dim = *o.features;
        c.ca_reduction = std::min(c.ca_reduction, c.feature_dim);
    }
    return c;
}

nn::DiscriminatorConfig disc_config(const Options& o) {
    nn::DiscriminatorConfig c;
    if (o.disc_base) c.base_channels = *o.disc_base;
    if (o.disc_layers) c.num_layers = *o.disc_layers;
    return c;
}

gan::LossConfig loss_config(const Options& o) {
    gan::LossConfig c;
    if (o.lambda_cycle) c.lambda_cycle = *o.lambda_cycle;
    return c;
}

data::AugmentationConfig aug_config(const Options& o, bool normalize_default) {
    data::AugmentationConfig a;
    if (o.image_size) a.resize_height = a.resize_width = *o.image_size;
    a.random_crop = a.resize_height;  // only applies to larger sources
    if (o.hflip) a.hflip_prob = *o.hflip;
    if (o.rotation) a.rotation_degrees = *o.rotation;
    a.normalize = o.normalize.value_or(normalize_default);
    return a;
}

std::optional<data::PairedDataset> validation_split(const data::DatasetLayout& layout) {
    if (!fs::is_directory(layout.test_hazy()) || !fs::is_directory(layout.test_clean())) return std::nullopt;
    return data::PairedDataset(data::PairedDatasetSpec{layout.test_hazy(), layout.test_clean(), std::nullopt});
}

void print_checkpoint(const train::Checkpoint& c) {
    std::cout << "checkpoint: "
              << (fs::path(c.train.checkpoint_dir) / train::checkpoint_filename(c.phase, c.variant, c.epoch)).string()
              << "\n";
    if (!c.history.empty()) {
        for (const auto& [k, v] : c.history.back().values) std::cout << "  " << k << ": " << v << "\n";
    }
}

// ------------------------------------------------------------------ commands

int cmd_pretrain(const Options& o) {
    const data::DatasetLayout layout{o.data_root};
    const data::PairedDataset paired(data::PairedDatasetSpec{layout.paired_hazy(), layout.paired_clean(), std::nullopt});
    const auto val = validation_split(layout);
    const auto ckpt = train::train_ffa(train_config(o, Phase::ffa_pretrain), ffa_config(o), aug_config(o, false),
                                       paired, val ? &*val : nullptr);
    print_checkpoint(ckpt);
    return kOk;
}

struct UnpairedPools {
    data::UnpairedDataset hazy;
    data::UnpairedDataset clean;
};

UnpairedPools unpaired(const Options& o) {
    const data::DatasetLayout layout{o.data_root};
    return {data::UnpairedDataset(data::UnpairedDatasetSpec{layout.unpaired_hazy(), o.unpaired_count}, o.seed),
            data::UnpairedDataset(data::UnpairedDatasetSpec{layout.unpaired_clean(), o.unpaired_count}, o.seed)};
}

int cmd_train_gan(const Options& o) {
    const auto init = train::load_checkpoint(require_checkpoint(o, "ffa_pretrain_base_"));
    const auto pools = unpaired(o);
    const auto val = validation_split(data::DatasetLayout{o.data_root});
    const auto ckpt = train::train_cyclegan(train_config(o, Phase::cyclegan), init, disc_config(o), loss_config(o),
                                            aug_config(o, false),
                                            train::GanData{&pools.hazy, &pools.clean, nullptr, val ? &*val : nullptr});
    print_checkpoint(ckpt);
    return kOk;
}

int cmd_finetune(const Options& o) {
    if (!o.k_paired) throw ConfigError("--k-paired is required for finetune");
    const int k = *o.k_paired;
    if (!train::is_standard_variant(k)) {
        spdlog::warn("K={} is outside the standard set 25, 20, 10, 5, 0", k);
    }
    const auto init = train::load_checkpoint(require_checkpoint(o, "cyclegan_gan_"));
    const data::DatasetLayout layout{o.data_root};
    const auto pools = unpaired(o);
    std::optional<data::PairedDataset> pairs;
    if (k > 0) pairs.emplace(data::PairedDatasetSpec{layout.paired_hazy(), layout.paired_clean(), k});
    const auto val = validation_split(layout);
    const auto ckpt = train::finetune(
        train_config(o, Phase::finetune), init, k, loss_config(o), aug_config(o, false),
        train::GanData{&pools.hazy, &pools.clean, pairs ? &*pairs : nullptr, val ? &*val : nullptr}, true);
    print_checkpoint(ckpt);
    return kOk;
}

int cmd_grid(const Options& o) {
    train::GridOptions g;
    g.data_root = o.data_root;
    g.out_dir = out_dir(o);
    if (o.checkpoint) g.base_checkpoint = *o.checkpoint;
    g.pretrain = train_config(o, Phase::ffa_pretrain);
    g.gan = train_config(o, Phase::cyclegan);
    g.finetune = train_config(o, Phase::finetune);
    g.ffa = ffa_config(o);
    g.disc = disc_config(o);
    g.loss = loss_config(o);
    g.aug = aug_config(o, false);
    g.ks = o.ks;
    if (!o.lr_grid.empty()) {
        const auto rows = train::run_lr_grid(g, o.lr_grid);
        std::cout << train::format_lr_table(rows);
        const bool ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.error.empty(); });
        return ok ? kOk : kFailure;
    }
    const auto result = train::run_grid(g);
    std::cout << train::format_grid_table(result.rows);
    for (const auto& r : result.rows) {
        if (!r.error.empty()) std::cerr << "K=" << r.k << " failed: " << r.error << "\n";
    }
    return result.ok() ? kOk : kFailure;
}

int cmd_evaluate(const Options& o) {
    fs::path ckpt_path;
    if (!o.checkpoint && o.k_paired) {
        const auto p = latest_checkpoint(home_dir(), "finetune_" + train::variant_name(*o.k_paired) + "_");
        if (!p) throw ConfigError("no checkpoint for K=" + std::to_string(*o.k_paired) + " in " + home_dir().string());
        ckpt_path = *p;
    } else {
        ckpt_path = require_checkpoint(o, "finetune_k25_");
    }
    const auto ckpt = train::load_checkpoint(ckpt_path);
    const data::DatasetLayout layout{o.data_root};
    fs::path hazy = o.hazy_dir ? fs::path(*o.hazy_dir) : layout.test_hazy();
    std::optional<fs::path> clean;
    if (o.clean_dir) {
        clean = *o.clean_dir;
    } else if (!o.hazy_dir) {
        clean = layout.test_clean();
    }
    if (!o.hazy_dir && !fs::is_directory(hazy)) {
        hazy = layout.paired_hazy();
        clean = layout.paired_clean();
    }
    train::EvalOptions eo;
    eo.variant = ckpt.variant;
    if (o.image_size) eo.resize_height = eo.resize_width = *o.image_size;
    const fs::path out = out_dir(o);
    if (o.save_images) eo.output_dir = out / ("restored_" + ckpt.variant);
    const auto rows = train::evaluate(ckpt, hazy, clean, eo);
    fs::create_directories(out);
    const fs::path stem = out / ("eval_" + ckpt.variant);
    train::write_report(stem, rows);
    const auto s = metrics::summarize(rows);
    std::cout << "images: " << rows.size() << "\n";
    if (s.count > 0) {
        std::cout << "mean_ssim: " << s.mean_ssim << "\nmean_psnr_db: " << s.mean_psnr_db << "\n";
    } else {
        std::cout << "no references found; metrics omitted\n";
    }
    std::cout << "report: " << stem.string() << ".csv\n";
    return kOk;
}

int cmd_restore(const Options& o) {
    if (!o.input) throw ConfigError("--input is required for restore");
    const fs::path output =
        o.out ? fs::path(*o.out) : fs::path(fs::path(*o.input).replace_extension("").string() + "_restored.png");
    const Tensor x = data::read_image(*o.input);
    std::optional<Tensor> ref;
    if (o.reference) ref = data::read_image(*o.reference);

    fs::path ckpt_path;
    if (!o.checkpoint && o.k_paired) {
        const auto p = latest_checkpoint(home_dir(), "finetune_" + train::variant_name(*o.k_paired) + "_");
        if (!p) throw ConfigError("no checkpoint for K=" + std::to_string(*o.k_paired) + " in " + home_dir().string());
        ckpt_path = *p;
    } else {
        ckpt_path = require_checkpoint(o, "finetune_k25_");
    }
    const auto ckpt = train::load_checkpoint(ckpt_path);
    const nn::FFA net = train::load_generator(ckpt);

    Tensor y;
    if (o.image_size) {
        y = train::run_generator(net, data::resize(x, *o.image_size, *o.image_size), ckpt.aug);
        y = data::resize(y, x.h(), x.w());
    } else {
        y = train::run_generator(net, x, ckpt.aug);
    }
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    data::write_png(output, y);
    std::cout << "restored: " << output.string() << "\n";
    if (ref) {
        const Tensor r = ref->h() == x.h() && ref->w() == x.w() ? *ref : data::resize(*ref, x.h(), x.w());
        // Score what was written: the 8-bit PNG.
        const Tensor written = data::read_image(output);
        std::cout << "ssim: " << metrics::ssim(written, r) << "\n";
        std::cout << "psnr_db: " << metrics::psnr(written, r) << "\n";
    }
    return kOk;
}

int cmd_synthesize(const Options& o) {
    const auto kind = data::parse_degradation(o.kind);
    if (!kind) throw ConfigError("unknown degradation '" + o.kind + "' (haze, rain, snow)");
    if (o.input) {
        if (!o.out) throw ConfigError("--out is required with --input");
        const Tensor clean = data::read_image(*o.input);
        data::write_png(*o.out, data::synthesize_degradation(clean, *kind, o.severity, o.seed));
        std::cout << "wrote " << *o.out << "\n";
        return kOk;
    }
    data::ToyDatasetOptions t;
    t.paired = o.toy_paired;
    t.unpaired = o.toy_unpaired;
    t.test = o.toy_test;
    t.size = o.toy_size;
    t.kind = *kind;
    t.severity_min = o.severity_min;
    t.severity_max = o.severity_max;
    t.seed = o.seed;
    const fs::path root = o.out ? fs::path(*o.out) : fs::path(o.data_root);
    data::write_toy_dataset(root, t);
    std::cout << "toy dataset: " << root.string() << "\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Image restoration: FFA pretraining, CycleGAN training, K-shot fine-tuning, evaluation"};
    app.name("hazerestore");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

    Options o;
    app.add_option("--data-root", o.data_root, "Dataset root (paired/, unpaired_hazy/, unpaired_clean/, test/)")
        ->capture_default_str();
    app.add_option("--checkpoint", o.checkpoint,
                   "Input checkpoint (default: newest matching file in $HAZE_RESTORE_HOME)");
    app.add_option("--k-paired", o.k_paired, "Number of paired fine-tuning images");
    app.add_option("--lr", o.lr, "Learning rate (default 0.001 pretrain, 0.0002 GAN phases)");
    app.add_option("--epochs", o.epochs, "Training epochs (default 50)");
    app.add_option("--seed", o.seed, "Seed for initialization, sampling and augmentation")->capture_default_str();
    app.add_option("--out", o.out,
                   "Output location: checkpoint/report directory, or file for restore (default $HAZE_RESTORE_HOME "
                   "or ./checkpoints)");
    app.add_option("--device", o.device, "Compute device")->check(CLI::IsMember({"cpu"}))->capture_default_str();
    app.add_option("--profile", o.profile, "Preset for unset flags: default or smoke (tiny model, 32x32)")
        ->check(CLI::IsMember({"default", "smoke"}))
        ->capture_default_str();
    app.add_option("--batch-size", o.batch_size, "Samples per forward pass (default 1)");
    app.add_option("--grad-accum", o.grad_accum, "Gradient accumulation steps (default 1)");
    app.add_option("--max-steps", o.max_steps, "Cap on optimizer steps per phase (default: none)");
    app.add_option("--checkpoint-every", o.checkpoint_every, "Epochs between checkpoints; 0 = final only (default 10)");
    app.add_option("--sample-every", o.sample_every, "Steps between GAN sample grids; 0 = off (default 0)");
    app.add_option("--image-size", o.image_size, "Square resize side (default 256; restore: native size)");
    app.add_option("--unpaired-count", o.unpaired_count, "Images sampled from each unpaired folder (default: all)");
    app.add_option("--supervised-weight", o.supervised_weight, "Fine-tuning L1 weight (default 5)");
    app.add_option("--lambda-cycle", o.lambda_cycle, "Cycle-consistency weight (default 10)");
    app.add_option("--hflip", o.hflip, "Horizontal flip probability (default 0.5)");
    app.add_option("--rotation", o.rotation, "Max rotation in degrees (default 10)");
    app.add_option("--normalize", o.normalize, "Normalize inputs during pretraining (default false)");
    app.add_flag("--no-epoch-metrics", o.no_epoch_metrics, "Skip per-epoch SSIM/PSNR logging");
    app.add_option("--groups", o.groups, "FFA groups (default 3)");
    app.add_option("--blocks", o.blocks, "FFA blocks per group (default 6)");
    app.add_option("--features", o.features, "FFA feature channels (default 64)");
    app.add_option("--disc-base", o.disc_base, "Discriminator base width (default 64)");
    app.add_option("--disc-layers", o.disc_layers, "Discriminator stride-2 layers (default 4)");
    app.add_option("--verbosity", [](const CLI::results_t& r) {
        spdlog::set_level(spdlog::level::from_str(r.front()));
        return true;
    }, "Log level: trace, debug, info, warn, error, off")->default_str("info");

    auto* pretrain = app.add_subcommand("pretrain", "Supervised FFA pretraining on paired data");
    auto* gan = app.add_subcommand("train-gan", "Unpaired CycleGAN training from an FFA checkpoint");
    auto* ft = app.add_subcommand("finetune", "K-shot paired fine-tuning from a GAN checkpoint");
    auto* grid = app.add_subcommand("grid", "Fine-tune and evaluate every K; writes grid.md/grid.csv");
    grid->add_option("--ks", o.ks, "Fine-tuning counts")->delimiter(',')->capture_default_str();
    grid->add_option("--lr-grid", o.lr_grid, "Run a pretraining learning-rate sweep instead, e.g. 0.0001,0.001,0.01")
        ->delimiter(',');
    auto* eval = app.add_subcommand("evaluate", "PSNR/SSIM of a checkpoint over a test split");
    eval->add_option("--hazy-dir", o.hazy_dir, "Degraded images (default: <data-root>/test/hazy)");
    eval->add_option("--clean-dir", o.clean_dir, "References matched by filename stem");
    eval->add_flag("--save-images", o.save_images, "Also write restored PNGs");
    auto* restore = app.add_subcommand("restore", "Restore one image");
    restore->add_option("--input", o.input, "Degraded image (PNG or JPEG)")->required();
    restore->add_option("--reference", o.reference, "Clean reference; prints SSIM and PSNR");
    auto* synth = app.add_subcommand("synthesize", "Write a synthetic toy dataset, or degrade one image");
    synth->add_option("--input", o.input, "Clean image to degrade (writes --out)");
    synth->add_option("--kind", o.kind, "haze, rain or snow")->capture_default_str();
    synth->add_option("--severity", o.severity, "Severity in (0, 1] for --input")->capture_default_str();
    synth->add_option("--severity-min", o.severity_min, "Toy dataset severity range")->capture_default_str();
    synth->add_option("--severity-max", o.severity_max)->capture_default_str();
    synth->add_option("--paired", o.toy_paired, "Toy paired images")->capture_default_str();
    synth->add_option("--unpaired", o.toy_unpaired, "Toy unpaired images per domain")->capture_default_str();
    synth->add_option("--test", o.toy_test, "Toy test pairs")->capture_default_str();
    synth->add_option("--size", o.toy_size, "Toy image side")->capture_default_str();
    for (auto* s : {pretrain, gan, ft, grid, eval, restore, synth}) s->configurable();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }
    apply_profile(o);

    try {
        if (*pretrain) return cmd_pretrain(o);
        if (*gan) return cmd_train_gan(o);
        if (*ft) return cmd_finetune(o);
        if (*grid) return cmd_grid(o);
        if (*eval) return cmd_evaluate(o);
        if (*restore) return cmd_restore(o);
        if (*synth) return cmd_synthesize(o);
    } catch (const CheckpointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadCheckpoint;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadCheckpoint;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace haze::cli
