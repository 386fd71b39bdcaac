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

#include "haze/train/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "haze/data/image_io.hpp"
#include "haze/metrics/metrics.hpp"
#include "haze/nn/losses.hpp"

namespace haze::train {

namespace fs = std::filesystem;

namespace {

// Stream identifiers for derive_seed().
constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kOrderPaired = 1;
constexpr std::uint64_t kAugPaired = 2;
constexpr std::uint64_t kOrderHazy = 11;
constexpr std::uint64_t kOrderClean = 12;
constexpr std::uint64_t kOrderFinetune = 13;
constexpr std::uint64_t kAugHazy = 21;
constexpr std::uint64_t kAugClean = 22;
constexpr std::uint64_t kAugFinetune = 23;

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void require_finite(double v, const char* what, std::int64_t step) {
    if (!std::isfinite(v)) {
        throw NumericError(std::string("non-finite ") + what + " at step " + std::to_string(step) +
                           "; lower the learning rate or check the input data");
    }
}

data::AugmentationConfig eval_view(const data::AugmentationConfig& aug) {
    data::AugmentationConfig e = aug.geometry_only();
    return e;
}

struct QualitySums {
    double psnr = 0.0;
    double ssim = 0.0;
    double input_psnr = 0.0;
    std::size_t count = 0;
};

QualitySums quality(const nn::FFA& net, const data::PairedDataset& ds, const data::AugmentationConfig& aug) {
    QualitySums q;
    const auto view = eval_view(aug);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const data::Pair p = ds.get(i, view, 0);
        const Tensor out = run_generator(net, p.hazy, aug);
        q.psnr += metrics::psnr(out, p.clean);
        q.ssim += metrics::ssim(out, p.clean);
        q.input_psnr += metrics::psnr(p.hazy, p.clean);
        ++q.count;
    }
    return q;
}

void record_quality(HistoryRow& row, const std::string& prefix, const QualitySums& q) {
    if (q.count == 0) return;
    const double n = static_cast<double>(q.count);
    row.values[prefix + "_psnr"] = q.psnr / n;
    row.values[prefix + "_ssim"] = q.ssim / n;
    row.values[prefix + "_input_psnr"] = q.input_psnr / n;
}

void accumulate(GanStepLosses& into, const GanStepLosses& s) {
    into.generator.total += s.generator.total;
    into.generator.adv_xy += s.generator.adv_xy;
    into.generator.adv_yx += s.generator.adv_yx;
    into.generator.cyc_forward += s.generator.cyc_forward;
    into.generator.cyc_backward += s.generator.cyc_backward;
    into.generator.supervised += s.generator.supervised;
    into.discriminator.d_x += s.discriminator.d_x;
    into.discriminator.d_y += s.discriminator.d_y;
}

// Field table shared by history rows and checkpoint scalars.
template <class F>
void for_each_component(GanStepLosses& l, F&& f) {
    f("g_total", l.generator.total);
    f("adv_xy", l.generator.adv_xy);
    f("adv_yx", l.generator.adv_yx);
    f("cyc_forward", l.generator.cyc_forward);
    f("cyc_backward", l.generator.cyc_backward);
    f("supervised", l.generator.supervised);
    f("d_x", l.discriminator.d_x);
    f("d_y", l.discriminator.d_y);
}

}  // namespace

Tensor run_generator(const nn::FFA& net, const Tensor& x, const data::AugmentationConfig& aug) {
    if (!aug.normalize) return net.restore(x);
    Tensor in = x;
    data::normalize(in, aug);
    Tensor out = net.forward(in, nullptr);
    data::denormalize(out, aug);
    for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
    return out;
}

// ------------------------------------------------------------------ FFA phase

FFATrainer::FFATrainer(const TrainConfig& cfg, const nn::FFAConfig& ffa, const data::AugmentationConfig& aug,
                       const data::PairedDataset& train, const data::PairedDataset* val)
    : cfg_(cfg), aug_(aug), train_(train), val_(val), net_(ffa) {
    cfg_.validate();
    aug_.validate();
    if (cfg_.phase != Phase::ffa_pretrain) throw ConfigError("FFATrainer needs phase ffa_pretrain");
    if (train_.empty()) throw InputError("FFA pretraining needs at least one training pair");
    Rng rng(derive_seed(cfg_.seed, kInitStream));
    net_.init(rng);
    opt_ = std::make_unique<optim::Adam>(net_.parameters("ffa"),
                                         optim::AdamConfig{cfg_.lr, cfg_.beta1, cfg_.beta2, 1e-8});
    const std::int64_t per_step = static_cast<std::int64_t>(cfg_.batch_size) * cfg_.grad_accum_steps;
    steps_per_epoch_ = std::max<std::int64_t>(1, ceil_div(static_cast<std::int64_t>(train_.size()), per_step));
}

std::int64_t FFATrainer::planned_steps() const {
    const std::int64_t total = static_cast<std::int64_t>(cfg_.epochs) * steps_per_epoch_;
    return cfg_.max_steps > 0 ? std::min(total, cfg_.max_steps) : total;
}

void FFATrainer::resume(const Checkpoint& ckpt) {
    if (ckpt.phase != Phase::ffa_pretrain) throw CheckpointError("cannot resume FFA training from a GAN checkpoint");
    if (!(ckpt.ffa == net_.config())) throw CheckpointError("checkpoint FFA config differs from the trainer's");
    auto set = net_.parameters("ffa");
    ckpt.restore_into(set);
    auto& m = opt_->first_moments();
    auto& v = opt_->second_moments();
    const auto& params = opt_->parameters().params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Tensor* tm = ckpt.find("opt.m." + params[i].name);
        const Tensor* tv = ckpt.find("opt.v." + params[i].name);
        if (tm == nullptr || tv == nullptr) throw CheckpointError("checkpoint lacks optimizer state for " + params[i].name);
        m[i] = *tm;
        v[i] = *tv;
    }
    opt_->set_steps(ckpt.counters.count("opt.t") ? ckpt.counters.at("opt.t") : 0);
    step_ = ckpt.step;
    history_ = ckpt.history;
    epoch_loss_sum_ = ckpt.scalars.count("epoch_sum.l1") ? ckpt.scalars.at("epoch_sum.l1") : 0.0;
}

double FFATrainer::train_step() {
    const int batch = cfg_.batch_size;
    const int accum = cfg_.grad_accum_steps;
    const std::uint64_t per_step = static_cast<std::uint64_t>(batch) * accum;
    opt_->zero_grad();
    double loss = 0.0;
    for (int a = 0; a < accum; ++a) {
        std::vector<Tensor> xs;
        std::vector<Tensor> ys;
        for (int j = 0; j < batch; ++j) {
            const std::uint64_t g = static_cast<std::uint64_t>(step_) * per_step + static_cast<std::uint64_t>(a) * batch + j;
            const std::size_t idx = data::stream_index(train_.size(), cfg_.seed, kOrderPaired, g);
            data::Pair p = train_.get(idx, aug_, derive_seed(cfg_.seed, kAugPaired, g));
            xs.push_back(std::move(p.hazy));
            ys.push_back(std::move(p.clean));
        }
        const Tensor x = stack_batch<float>(xs);
        const Tensor y = stack_batch<float>(ys);
        nn::FFA::Cache cache;
        const Tensor out = net_.forward(x, &cache);
        const auto l1 = nn::l1_loss(out, y, 1.0 / accum);
        require_finite(l1.value, "L1 loss", step_);
        net_.backward(x, cache, l1.grad, true, false);
        loss += l1.value;
    }
    opt_->step();
    ++step_;
    step_losses_.push_back(loss);
    epoch_loss_sum_ += loss;
    return loss;
}

void FFATrainer::run() {
    const std::int64_t stop = planned_steps();
    while (step_ < stop) {
        const double loss = train_step();
        spdlog::debug("ffa step {} l1 {:.6f}", step_, loss);
        if (step_ % steps_per_epoch_ == 0) {
            const std::int64_t epoch = step_ / steps_per_epoch_;
            end_epoch(epoch, epoch_loss_sum_ / static_cast<double>(steps_per_epoch_));
            epoch_loss_sum_ = 0.0;
            if (cfg_.write_files && cfg_.checkpoint_every_epochs > 0 && epoch % cfg_.checkpoint_every_epochs == 0 &&
                step_ != stop) {
                save(epoch);
            }
        }
    }
    if (cfg_.write_files) {
        save(step_ / steps_per_epoch_);
        write_history_csv(fs::path(cfg_.checkpoint_dir) / "ffa_pretrain_base_history.csv", history_);
    }
}

double FFATrainer::dataset_loss() const {
    auto view = eval_view(aug_);
    view.normalize = aug_.normalize;
    double sum = 0.0;
    for (std::size_t i = 0; i < train_.size(); ++i) {
        const data::Pair p = train_.get(i, view, 0);
        sum += nn::mean_abs_error(net_.forward(p.hazy, nullptr), p.clean);
    }
    return sum / static_cast<double>(train_.size());
}

void FFATrainer::end_epoch(std::int64_t epoch, double mean_loss) {
    HistoryRow row{epoch, step_, {{"train_l1", mean_loss}}};
    if (cfg_.epoch_metrics) {
        record_quality(row, "train", quality(net_, train_, aug_));
        if (val_ != nullptr) record_quality(row, "val", quality(net_, *val_, aug_));
    }
    spdlog::info("ffa epoch {} step {} l1 {:.5f}{}", epoch, step_, mean_loss,
                 row.values.count("train_psnr") ? fmt::format(" psnr {:.2f} dB", row.values["train_psnr"]) : "");
    history_.push_back(std::move(row));
}

Checkpoint FFATrainer::checkpoint() {
    Checkpoint c;
    c.phase = Phase::ffa_pretrain;
    c.variant = "base";
    c.step = step_;
    c.epoch = step_ / steps_per_epoch_;
    c.train = cfg_;
    c.ffa = net_.config();
    c.aug = aug_;
    c.history = history_;
    c.capture(net_.parameters("ffa"));
    const auto& params = opt_->parameters().params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        c.tensors.push_back({"opt.m." + params[i].name, opt_->first_moments()[i]});
        c.tensors.push_back({"opt.v." + params[i].name, opt_->second_moments()[i]});
    }
    c.counters["opt.t"] = opt_->steps();
    c.scalars["epoch_sum.l1"] = epoch_loss_sum_;
    return c;
}

void FFATrainer::save(std::int64_t epoch) {
    const fs::path p = fs::path(cfg_.checkpoint_dir) / checkpoint_filename(Phase::ffa_pretrain, "base", epoch);
    save_checkpoint(p, checkpoint());
    spdlog::info("wrote {}", p.string());
}

// ------------------------------------------------------------------ GAN phases

GanTrainer::GanTrainer(const TrainConfig& cfg, const Checkpoint* init, const nn::FFAConfig& ffa,
                       const nn::DiscriminatorConfig& disc, const gan::LossConfig& loss,
                       const data::AugmentationConfig& aug, const GanData& data)
    : cfg_(cfg), ffa_(ffa), disc_(disc), loss_(loss), aug_(aug), data_(data) {
    cfg_.validate();
    loss_.validate();
    disc_.validate();
    if (cfg_.phase == Phase::ffa_pretrain) throw ConfigError("GanTrainer needs a GAN phase");
    if (data_.hazy == nullptr || data_.clean == nullptr || data_.hazy->empty() || data_.clean->empty()) {
        throw InputError("GAN training needs non-empty unpaired hazy and clean sets");
    }
    // GAN phases consume [0, 1] tensors.
    aug_.normalize = false;
    aug_.validate();
    model_aug_ = aug_;

    if (init != nullptr) ffa_ = init->ffa;
    state_ = std::make_unique<gan::CycleGAN>(ffa_, disc_);
    state_->init(cfg_.seed);
    if (init != nullptr) {
        if (init->phase == Phase::ffa_pretrain) {
            auto src = state_->g_xy.parameters("ffa");
            init->restore_into(src);
            if (init->aug.normalize) {
                spdlog::warn("initial generator was trained on normalized inputs; GAN phases feed [0, 1] images");
            }
        } else {
            if (!(init->disc == disc_)) throw CheckpointError("checkpoint discriminator config differs");
            auto all = state_->all_parameters();
            init->restore_into(all);
        }
    }
    const int min_side = state_->d_x.min_input_side();
    if (aug_.resize_height < std::max(min_side, nn::kMinImageSide) ||
        aug_.resize_width < std::max(min_side, nn::kMinImageSide)) {
        throw ConfigError("training images of " + std::to_string(aug_.resize_height) + "x" +
                          std::to_string(aug_.resize_width) + " are below the discriminator minimum of " +
                          std::to_string(min_side));
    }
    const optim::AdamConfig adam{cfg_.lr, cfg_.beta1, cfg_.beta2, 1e-8};
    opt_g_ = std::make_unique<optim::Adam>(state_->generator_parameters(), adam);
    opt_d_ = std::make_unique<optim::Adam>(state_->discriminator_parameters(), adam);

    const std::int64_t per_step = static_cast<std::int64_t>(cfg_.batch_size) * cfg_.grad_accum_steps;
    const auto longest = static_cast<std::int64_t>(std::max(data_.hazy->size(), data_.clean->size()));
    steps_per_epoch_ = std::max<std::int64_t>(1, ceil_div(longest, per_step));
}

std::string GanTrainer::variant() const {
    return cfg_.phase == Phase::finetune ? variant_name(cfg_.k_paired) : "gan";
}

std::int64_t GanTrainer::planned_steps() const {
    const std::int64_t total = static_cast<std::int64_t>(cfg_.epochs) * steps_per_epoch_;
    return cfg_.max_steps > 0 ? std::min(total, cfg_.max_steps) : total;
}

void GanTrainer::resume(const Checkpoint& ckpt) {
    if (ckpt.phase != cfg_.phase) throw CheckpointError("checkpoint phase differs from the trainer's phase");
    auto all = state_->all_parameters();
    ckpt.restore_into(all);
    auto load_opt = [&](optim::Adam& opt, const std::string& tag) {
        const auto& params = opt.parameters().params;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Tensor* tm = ckpt.find(tag + ".m." + params[i].name);
            const Tensor* tv = ckpt.find(tag + ".v." + params[i].name);
            if (tm == nullptr || tv == nullptr) throw CheckpointError("checkpoint lacks optimizer state for " + params[i].name);
            opt.first_moments()[i] = *tm;
            opt.second_moments()[i] = *tv;
        }
        const auto it = ckpt.counters.find(tag + ".t");
        opt.set_steps(it != ckpt.counters.end() ? it->second : 0);
    };
    load_opt(*opt_g_, "opt_g");
    load_opt(*opt_d_, "opt_d");
    step_ = ckpt.step;
    history_ = ckpt.history;
    step_losses_.clear();
    epoch_sum_ = GanStepLosses{};
    for_each_component(epoch_sum_, [&](const char* k, double& v) {
        const auto it = ckpt.scalars.find(std::string("epoch_sum.") + k);
        v = it != ckpt.scalars.end() ? it->second : 0.0;
    });
}

GanStepLosses GanTrainer::train_step() {
    const int batch = cfg_.batch_size;
    const int accum = cfg_.grad_accum_steps;
    const std::uint64_t per_step = static_cast<std::uint64_t>(batch) * accum;
    const bool supervised = cfg_.phase == Phase::finetune && data_.paired != nullptr && !data_.paired->empty();

    struct Micro {
        Tensor hazy;
        Tensor clean;
        gan::GeneratorStep gen;
    };
    std::vector<Micro> micro(accum);
    GanStepLosses out;
    opt_g_->zero_grad();
    opt_d_->zero_grad();
    for (int a = 0; a < accum; ++a) {
        std::vector<Tensor> hs;
        std::vector<Tensor> cs;
        std::vector<Tensor> ph;
        std::vector<Tensor> pc;
        for (int j = 0; j < batch; ++j) {
            const std::uint64_t g = static_cast<std::uint64_t>(step_) * per_step + static_cast<std::uint64_t>(a) * batch + j;
            const auto ih = data::stream_index(data_.hazy->size(), cfg_.seed, kOrderHazy, g);
            const auto ic = data::stream_index(data_.clean->size(), cfg_.seed, kOrderClean, g);
            hs.push_back(data_.hazy->get(ih, aug_, derive_seed(cfg_.seed, kAugHazy, g)));
            cs.push_back(data_.clean->get(ic, aug_, derive_seed(cfg_.seed, kAugClean, g)));
            if (supervised) {
                const auto ip = data::stream_index(data_.paired->size(), cfg_.seed, kOrderFinetune, g);
                data::Pair p = data_.paired->get(ip, aug_, derive_seed(cfg_.seed, kAugFinetune, g));
                ph.push_back(std::move(p.hazy));
                pc.push_back(std::move(p.clean));
            }
        }
        Micro& m = micro[a];
        m.hazy = stack_batch<float>(hs);
        m.clean = stack_batch<float>(cs);
        Tensor pair_hazy;
        Tensor pair_clean;
        gan::SupervisedPair pair;
        if (supervised) {
            pair_hazy = stack_batch<float>(ph);
            pair_clean = stack_batch<float>(pc);
            pair = gan::SupervisedPair{&pair_hazy, &pair_clean, cfg_.supervised_weight};
        }
        m.gen = gan::generator_step(*state_, m.hazy, m.clean, loss_, true, pair);
        require_finite(m.gen.losses.total, "generator loss", step_);
        const double w = 1.0 / accum;
        out.generator.adv_xy += w * m.gen.losses.adv_xy;
        out.generator.adv_yx += w * m.gen.losses.adv_yx;
        out.generator.cyc_forward += w * m.gen.losses.cyc_forward;
        out.generator.cyc_backward += w * m.gen.losses.cyc_backward;
        out.generator.supervised += w * m.gen.losses.supervised;
        out.generator.total += w * m.gen.losses.total;
    }
    if (accum > 1) opt_g_->parameters().scale_grads(1.0f / static_cast<float>(accum));
    opt_g_->step();

    for (int a = 0; a < accum; ++a) {
        const Micro& m = micro[a];
        const auto d = gan::discriminator_step(*state_, m.hazy, m.clean, m.gen.fake_hazy, m.gen.fake_clean, true);
        require_finite(d.total(), "discriminator loss", step_);
        out.discriminator.d_x += d.d_x / accum;
        out.discriminator.d_y += d.d_y / accum;
    }
    if (accum > 1) opt_d_->parameters().scale_grads(1.0f / static_cast<float>(accum));
    opt_d_->step();

    ++step_;
    if (cfg_.write_files && cfg_.sample_every > 0 && step_ % cfg_.sample_every == 0) {
        dump_samples(micro[0].hazy, micro[0].clean, micro[0].gen);
    }
    step_losses_.push_back(out);
    accumulate(epoch_sum_, out);
    return out;
}

void GanTrainer::run() {
    const std::int64_t stop = planned_steps();
    while (step_ < stop) {
        const GanStepLosses l = train_step();
        spdlog::debug("{} step {} g {:.5f} d_x {:.5f} d_y {:.5f}", phase_name(cfg_.phase), step_, l.generator.total,
                      l.discriminator.d_x, l.discriminator.d_y);
        if (step_ % steps_per_epoch_ == 0) {
            const std::int64_t epoch = step_ / steps_per_epoch_;
            end_epoch(epoch);
            if (cfg_.write_files && cfg_.checkpoint_every_epochs > 0 && epoch % cfg_.checkpoint_every_epochs == 0 &&
                step_ != stop) {
                save(epoch);
            }
        }
    }
    if (cfg_.write_files) {
        save(step_ / steps_per_epoch_);
        write_history_csv(fs::path(cfg_.checkpoint_dir) /
                              (std::string(phase_name(cfg_.phase)) + "_" + variant() + "_history.csv"),
                          history_);
    }
}

void GanTrainer::end_epoch(std::int64_t epoch) {
    const double n = static_cast<double>(steps_per_epoch_);
    HistoryRow row{epoch, step_, {}};
    for_each_component(epoch_sum_, [&](const char* k, double& v) { row.values[k] = v / n; });
    if (cfg_.epoch_metrics && data_.val != nullptr && !data_.val->empty()) {
        record_quality(row, "val", quality(state_->g_xy, *data_.val, model_aug_));
    }
    spdlog::info("{} epoch {} step {} g {:.4f} d {:.4f}", phase_name(cfg_.phase), epoch, step_,
                 row.values["g_total"], row.values["d_x"] + row.values["d_y"]);
    history_.push_back(std::move(row));
    epoch_sum_ = GanStepLosses{};
}

Checkpoint GanTrainer::checkpoint() {
    Checkpoint c;
    c.phase = cfg_.phase;
    c.variant = variant();
    c.step = step_;
    c.epoch = step_ / steps_per_epoch_;
    c.train = cfg_;
    c.ffa = ffa_;
    c.disc = disc_;
    c.loss = loss_;
    c.aug = model_aug_;
    c.history = history_;
    c.capture(state_->all_parameters());
    auto save_opt = [&](optim::Adam& opt, const std::string& tag) {
        const auto& params = opt.parameters().params;
        for (std::size_t i = 0; i < params.size(); ++i) {
            c.tensors.push_back({tag + ".m." + params[i].name, opt.first_moments()[i]});
            c.tensors.push_back({tag + ".v." + params[i].name, opt.second_moments()[i]});
        }
        c.counters[tag + ".t"] = opt.steps();
    };
    save_opt(*opt_g_, "opt_g");
    save_opt(*opt_d_, "opt_d");
    for_each_component(epoch_sum_, [&](const char* k, double& v) { c.scalars[std::string("epoch_sum.") + k] = v; });
    return c;
}

void GanTrainer::save(std::int64_t epoch) {
    const fs::path p = fs::path(cfg_.checkpoint_dir) / checkpoint_filename(cfg_.phase, variant(), epoch);
    save_checkpoint(p, checkpoint());
    spdlog::info("wrote {}", p.string());
}

void GanTrainer::dump_samples(const Tensor& hazy, const Tensor& clean, const gan::GeneratorStep& g) {
    const Tensor rec_hazy = state_->g_yx.restore(g.fake_clean);
    const Tensor rec_clean = state_->g_xy.restore(g.fake_hazy);
    const int h = hazy.h();
    const int w = hazy.w();
    Tensor grid(Shape{1, 3, 2 * h, 3 * w});
    const Tensor* tiles[6] = {&hazy, &g.fake_clean, &rec_hazy, &clean, &g.fake_hazy, &rec_clean};
    for (int t = 0; t < 6; ++t) {
        const int oy = (t / 3) * h;
        const int ox = (t % 3) * w;
        for (int c = 0; c < 3; ++c) {
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) grid.at(0, c, oy + y, ox + x) = std::clamp(tiles[t]->at(0, c, y, x), 0.0f, 1.0f);
            }
        }
    }
    const fs::path p = fs::path(cfg_.checkpoint_dir) / "samples" /
                       (std::string(phase_name(cfg_.phase)) + "_" + variant() + "_" + std::to_string(step_) + ".png");
    data::write_png(p, grid);
}

// ------------------------------------------------------------------ wrappers

Checkpoint train_ffa(const TrainConfig& cfg, const nn::FFAConfig& ffa, const data::AugmentationConfig& aug,
                     const data::PairedDataset& train, const data::PairedDataset* val) {
    FFATrainer t(cfg, ffa, aug, train, val);
    t.run();
    return t.checkpoint();
}

Checkpoint train_cyclegan(const TrainConfig& cfg, const Checkpoint& ffa_init, const nn::DiscriminatorConfig& disc,
                          const gan::LossConfig& loss, const data::AugmentationConfig& aug, const GanData& data) {
    if (cfg.phase != Phase::cyclegan) throw ConfigError("train_cyclegan needs phase cyclegan");
    GanTrainer t(cfg, &ffa_init, ffa_init.ffa, disc, loss, aug, data);
    t.run();
    return t.checkpoint();
}

Checkpoint finetune(const TrainConfig& cfg, const Checkpoint& gan_init, int k, const gan::LossConfig& loss,
                    const data::AugmentationConfig& aug, const GanData& data, bool allow_any_k) {
    if (!is_standard_variant(k)) {
        if (!allow_any_k) throw ConfigError("k_paired " + std::to_string(k) + " is not one of 25, 20, 10, 5, 0");
        spdlog::warn("non-standard fine-tuning count K={}", k);
    }
    if (gan_init.phase == Phase::ffa_pretrain) throw CheckpointError("fine-tuning starts from a GAN checkpoint");
    TrainConfig c = cfg;
    c.phase = Phase::finetune;
    c.k_paired = k;
    GanData d = data;
    if (k == 0) d.paired = nullptr;
    if (k > 0 && (d.paired == nullptr || d.paired->empty())) throw InputError("K > 0 needs paired fine-tuning data");
    if (k > 0 && d.paired->size() != static_cast<std::size_t>(k)) {
        spdlog::warn("fine-tuning with {} pairs instead of the requested {}", d.paired->size(), k);
    }
    GanTrainer t(c, &gan_init, gan_init.ffa, gan_init.disc, loss, aug, d);
    t.run();
    return t.checkpoint();
}

}  // namespace haze::train
