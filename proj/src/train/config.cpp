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

#include "haze/train/config.hpp"

#include <algorithm>
#include <cmath>

namespace haze::train {

using nlohmann::json;

std::string_view phase_name(Phase p) {
    switch (p) {
        case Phase::ffa_pretrain: return "ffa_pretrain";
        case Phase::cyclegan: return "cyclegan";
        case Phase::finetune: return "finetune";
    }
    return "?";
}

std::optional<Phase> parse_phase(std::string_view s) {
    if (s == "ffa_pretrain") return Phase::ffa_pretrain;
    if (s == "cyclegan") return Phase::cyclegan;
    if (s == "finetune") return Phase::finetune;
    return std::nullopt;
}

bool is_standard_variant(int k) {
    return std::find(std::begin(kVariantCounts), std::end(kVariantCounts), k) != std::end(kVariantCounts);
}

json reported_manifest() {
    json rows = json::array();
    for (const auto& r : kReportedVariants) {
        rows.push_back(json{{"k", r.k}, {"ssim_reported", r.ssim}, {"psnr_reported", r.psnr_db}});
    }
    return json{{"source", "paper-reported"}, {"variants", std::move(rows)}};
}

std::string variant_name(int k) { return "k" + std::to_string(k); }

TrainConfig TrainConfig::defaults_for(Phase p) {
    TrainConfig c;
    c.phase = p;
    if (p != Phase::ffa_pretrain) {
        c.lr = 2e-4;
        c.beta1 = 0.5;
    }
    return c;
}

void TrainConfig::validate() const {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (grad_accum_steps < 1) throw ConfigError("grad_accum_steps must be at least 1");
    if (k_paired < 0) throw ConfigError("k_paired must be non-negative");
    if (phase != Phase::finetune && k_paired != 0) throw ConfigError("k_paired applies to finetune only");
    if (max_steps < 0) throw ConfigError("max_steps must be non-negative");
    if (supervised_weight < 0.0) throw ConfigError("supervised_weight must be non-negative");
}

json to_json(const TrainConfig& c) {
    return json{{"phase", phase_name(c.phase)},
                {"lr", c.lr},
                {"beta1", c.beta1},
                {"beta2", c.beta2},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"grad_accum_steps", c.grad_accum_steps},
                {"k_paired", c.k_paired},
                {"seed", c.seed},
                {"checkpoint_dir", c.checkpoint_dir},
                {"max_steps", c.max_steps},
                {"checkpoint_every_epochs", c.checkpoint_every_epochs},
                {"sample_every", c.sample_every},
                {"supervised_weight", c.supervised_weight},
                {"write_files", c.write_files},
                {"epoch_metrics", c.epoch_metrics}};
}

json to_json(const nn::FFAConfig& c) {
    return json{{"num_groups", c.num_groups},
                {"blocks_per_group", c.blocks_per_group},
                {"feature_dim", c.feature_dim},
                {"kernel_size", c.kernel_size},
                {"ca_reduction", c.ca_reduction}};
}

json to_json(const nn::DiscriminatorConfig& c) {
    return json{{"base_channels", c.base_channels}, {"num_layers", c.num_layers}, {"leaky_slope", c.leaky_slope}};
}

json to_json(const gan::LossConfig& c) {
    return json{{"lambda_cycle", c.lambda_cycle}, {"gan_loss_mode", "least_squares"}};
}

json to_json(const data::AugmentationConfig& c) {
    json j{{"resize_height", c.resize_height},
           {"resize_width", c.resize_width},
           {"hflip_prob", c.hflip_prob},
           {"rotation_degrees", c.rotation_degrees},
           {"normalize", c.normalize},
           {"mean", c.mean},
           {"std", c.std}};
    j["random_crop"] = c.random_crop ? json(*c.random_crop) : json(nullptr);
    return j;
}

namespace {

template <class V>
void read(const json& j, const char* key, V& out) {
    const auto it = j.find(key);
    if (it != j.end() && !it->is_null()) out = it->get<V>();
}

}  // namespace

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    std::string phase = std::string(phase_name(c.phase));
    read(j, "phase", phase);
    const auto p = parse_phase(phase);
    if (!p) throw ConfigError("unknown phase '" + phase + "'");
    c.phase = *p;
    read(j, "lr", c.lr);
    read(j, "beta1", c.beta1);
    read(j, "beta2", c.beta2);
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "grad_accum_steps", c.grad_accum_steps);
    read(j, "k_paired", c.k_paired);
    read(j, "seed", c.seed);
    read(j, "checkpoint_dir", c.checkpoint_dir);
    read(j, "max_steps", c.max_steps);
    read(j, "checkpoint_every_epochs", c.checkpoint_every_epochs);
    read(j, "sample_every", c.sample_every);
    read(j, "supervised_weight", c.supervised_weight);
    read(j, "write_files", c.write_files);
    read(j, "epoch_metrics", c.epoch_metrics);
    return c;
}

nn::FFAConfig ffa_config_from_json(const json& j) {
    nn::FFAConfig c;
    read(j, "num_groups", c.num_groups);
    read(j, "blocks_per_group", c.blocks_per_group);
    read(j, "feature_dim", c.feature_dim);
    read(j, "kernel_size", c.kernel_size);
    read(j, "ca_reduction", c.ca_reduction);
    return c;
}

nn::DiscriminatorConfig disc_config_from_json(const json& j) {
    nn::DiscriminatorConfig c;
    read(j, "base_channels", c.base_channels);
    read(j, "num_layers", c.num_layers);
    read(j, "leaky_slope", c.leaky_slope);
    return c;
}

gan::LossConfig loss_config_from_json(const json& j) {
    gan::LossConfig c;
    read(j, "lambda_cycle", c.lambda_cycle);
    std::string mode = "least_squares";
    read(j, "gan_loss_mode", mode);
    if (mode != "least_squares") throw ConfigError("unsupported gan_loss_mode '" + mode + "'");
    return c;
}

data::AugmentationConfig aug_config_from_json(const json& j) {
    data::AugmentationConfig c;
    read(j, "resize_height", c.resize_height);
    read(j, "resize_width", c.resize_width);
    read(j, "hflip_prob", c.hflip_prob);
    read(j, "rotation_degrees", c.rotation_degrees);
    read(j, "normalize", c.normalize);
    read(j, "mean", c.mean);
    read(j, "std", c.std);
    if (const auto it = j.find("random_crop"); it != j.end() && !it->is_null()) c.random_crop = it->get<int>();
    return c;
}

}  // namespace haze::train
