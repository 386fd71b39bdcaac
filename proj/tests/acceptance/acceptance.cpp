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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only
// when every line passes.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "haze/cli/cli.hpp"
#include "haze/data/degrade.hpp"
#include "haze/data/image_io.hpp"
#include "haze/metrics/metrics.hpp"
#include "haze/nn/conv.hpp"
#include "haze/service/server.hpp"
#include "haze/train/trainer.hpp"
#include "test_support.hpp"

namespace {

using namespace haze;
using haze::testing::random_tensor;
using haze::testing::relative_error;
using haze::testing::ScratchDir;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ------------------------------------------------------------------ identity

Verdict zero_weight_identity() {
    nn::FFA net(nn::FFAConfig{});
    Rng rng(1);
    net.init(rng);
    net.parameters().zero_values();
    const Tensor x = random_tensor<float>(Shape{1, 3, 256, 256}, 2, 0.0, 1.0);
    const auto t0 = Clock::now();
    const Tensor y = net.forward(x, nullptr);
    const double secs = seconds_since(t0);
    const double err = max_abs_diff(x, y);
    return {err <= 1e-7 && secs < 5.0, "max |y - x| = " + fmt_g(err) + ", forward " + fmt_g(secs) + " s at 256x256"};
}

// ------------------------------------------------------------------ gradients

double weighted_sum(const TensorD& y, const TensorD& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.numel(); ++i) s += y.data()[i] * w.data()[i];
    return s;
}

/// Worst norm-wise relative error over every parameter and the input.
double worst_gradient_error(nn::ParameterSet<double> set, TensorD& x, const std::function<TensorD()>& forward,
                            const std::function<TensorD(const TensorD&)>& backward, double eps) {
    const TensorD w = random_tensor<double>(forward().shape(), 99);
    const auto loss = [&] { return weighted_sum(forward(), w); };
    set.zero_grad();
    const TensorD gx = backward(w);
    double worst = relative_error(gx, haze::testing::numeric_gradient(x, loss, eps), 1e-6);
    for (auto& p : set.params) {
        worst = std::max(worst, relative_error(p.param->grad, haze::testing::numeric_gradient(p.param->value, loss, eps), 1e-6));
    }
    return worst;
}

template <class Layer>
double layer_gradient_error(Layer layer, std::uint64_t seed, double eps) {
    Rng rng(seed);
    layer.init(rng);
    nn::ParameterSet<double> set;
    layer.collect(set, "layer");
    for (auto& p : set.params) {
        if (p.name.ends_with("bias")) p.param->value = random_tensor<double>(p.param->value.shape(), seed + 1, -0.3, 0.3);
    }
    TensorD x = random_tensor<double>(Shape{1, 4, 16, 16}, seed + 2);
    typename Layer::Cache cache;
    return worst_gradient_error(
        set, x, [&] { return layer.forward(x, nullptr); },
        [&](const TensorD& gy) {
            layer.forward(x, &cache);
            return layer.backward(x, cache, gy, true);
        },
        eps);
}

double conv_gradient_error(std::uint64_t seed, double eps) {
    nn::Conv2d<double> conv(nn::Conv2dSpec{4, 4, 3, 1, 1, true});
    Rng rng(seed);
    conv.init(rng);
    conv.bias.value = random_tensor<double>(conv.bias.value.shape(), seed + 1);
    TensorD x = random_tensor<double>(Shape{1, 4, 16, 16}, seed + 2);
    nn::ParameterSet<double> set;
    conv.collect(set, "conv");
    return worst_gradient_error(
        set, x, [&] { return conv.forward(x); }, [&](const TensorD& gy) { return conv.backward(x, gy, true); }, eps);
}

/// Worst error of one family over seeds 0..4.
double family_error(int family, double eps) {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const std::uint64_t seed = 100 + 10 * s;
        double e = 0.0;
        switch (family) {
            case 0: e = conv_gradient_error(seed, eps); break;
            case 1: e = layer_gradient_error(nn::ChannelAttention<double>(4, 2), seed, eps); break;
            case 2: e = layer_gradient_error(nn::PixelAttention<double>(4, 2), seed, eps); break;
            default: e = layer_gradient_error(nn::ResidualBlock<double>(4, 3, 2), seed, eps); break;
        }
        worst = std::max(worst, e);
    }
    return worst;
}

Verdict gradient_checks() {
    const char* names[] = {"conv", "CA", "PA", "block"};
    std::string coarse;
    std::string fine;
    double worst = 0.0;
    for (int f = 0; f < 4; ++f) {
        const double e = family_error(f, 1e-3);
        worst = std::max(worst, e);
        coarse += std::string(f ? ", " : "") + names[f] + " " + fmt_g(e);
        fine += std::string(f ? ", " : "") + names[f] + " " + fmt_g(family_error(f, 1e-6));
    }
    return {worst < 1e-3, "16x16, 5 seeds, eps 1e-3: " + coarse + " (eps 1e-6: " + fine + ")"};
}

// ------------------------------------------------------------------ metrics

Verdict metric_oracles() {
    double worst_psnr = 0.0;
    double worst_ssim = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const TensorD a = random_tensor<double>(Shape{1, 3, 32, 32}, 1000 + s, 0.0, 1.0);
        const TensorD b = random_tensor<double>(Shape{1, 3, 32, 32}, 2000 + s, 0.0, 1.0);
        worst_psnr = std::max(worst_psnr, std::fabs(metrics::psnr(a, b) - haze::testing::psnr_oracle(a, b)));
        worst_ssim = std::max(worst_ssim, std::fabs(metrics::ssim(a, b) - haze::testing::ssim_oracle(a, b)));
    }
    const TensorD x = random_tensor<double>(Shape{1, 3, 32, 32}, 3000, 0.0, 1.0);
    const double self_psnr = metrics::psnr(x, x);
    const double self_ssim = metrics::ssim(x, x);
    const bool ok = worst_psnr <= 1e-9 && worst_ssim <= 1e-6 && self_psnr == 100.0 && self_ssim == 1.0;
    return {ok, "20 pairs: max psnr dev " + fmt_g(worst_psnr) + " dB, max ssim dev " + fmt_g(worst_ssim) +
                    "; psnr(x,x) " + fmt_g(self_psnr) + ", ssim(x,x) " + fmt_g(self_ssim)};
}

// ------------------------------------------------------------------ losses

Verdict closed_form_losses(const fs::path& toy) {
    const data::DatasetLayout l{toy};
    const data::UnpairedDataset hazy(data::UnpairedDatasetSpec{l.unpaired_hazy(), std::nullopt}, 0);
    const data::UnpairedDataset clean(data::UnpairedDatasetSpec{l.unpaired_clean(), std::nullopt}, 0);
    const nn::FFAConfig ffa;
    const nn::DiscriminatorConfig disc;
    const auto init = haze::testing::zero_gan_checkpoint(train::Phase::cyclegan, "gan", ffa, disc, 32);
    auto cfg = train::TrainConfig::defaults_for(train::Phase::cyclegan);
    cfg.write_files = false;
    cfg.epoch_metrics = false;
    data::AugmentationConfig aug;
    aug.resize_height = aug.resize_width = 32;
    train::GanTrainer t(cfg, &init, ffa, disc, {}, aug.geometry_only(), train::GanData{&hazy, &clean, nullptr, nullptr});
    const auto s = t.train_step();
    const auto& g = s.generator;
    const bool ok = std::fabs(g.total - 2.0) <= 1e-6 && std::fabs(g.adv_xy - 1.0) <= 1e-6 &&
                    std::fabs(g.adv_yx - 1.0) <= 1e-6 && std::fabs(g.cyc_forward) <= 1e-6 &&
                    std::fabs(g.cyc_backward) <= 1e-6 && std::fabs(s.discriminator.d_x - 0.5) <= 1e-6 &&
                    std::fabs(s.discriminator.d_y - 0.5) <= 1e-6;
    return {ok, "generator " + fmt_g(g.total) + " (adv " + fmt_g(g.adv_xy) + " + " + fmt_g(g.adv_yx) + ", cycle " +
                    fmt_g(g.cyc_forward + g.cyc_backward) + "), discriminators " + fmt_g(s.discriminator.d_x) + " / " +
                    fmt_g(s.discriminator.d_y)};
}

// ------------------------------------------------------------------ overfit

Verdict overfit(const fs::path& scratch) {
    data::ToyDatasetOptions opt;
    opt.paired = 4;
    opt.unpaired = 1;
    opt.test = 1;
    opt.size = 32;
    opt.seed = 11;
    data::write_toy_dataset(scratch / "overfit", opt);
    const data::DatasetLayout l{scratch / "overfit"};
    const data::PairedDataset pairs(data::PairedDatasetSpec{l.paired_hazy(), l.paired_clean(), std::nullopt});

    auto cfg = train::TrainConfig::defaults_for(train::Phase::ffa_pretrain);
    cfg.lr = 1e-3;
    cfg.batch_size = 4;
    cfg.epochs = 200;
    cfg.max_steps = 200;
    cfg.write_files = false;
    cfg.epoch_metrics = false;
    data::AugmentationConfig aug;
    aug.resize_height = aug.resize_width = 32;
    aug = aug.geometry_only();
    nn::FFAConfig ffa;
    ffa.feature_dim = 16;
    ffa.ca_reduction = 4;
    ffa.blocks_per_group = 2;

    const auto t0 = Clock::now();
    train::FFATrainer t(cfg, ffa, aug, pairs);
    const double l1_before = t.dataset_loss();
    t.run();
    const double l1_after = t.dataset_loss();
    const double secs = seconds_since(t0);
    double psnr_out = 0.0;
    double psnr_in = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto p = pairs.get(i, aug, 0);
        psnr_out += metrics::psnr(train::run_generator(t.model(), p.hazy, aug), p.clean) / pairs.size();
        psnr_in += metrics::psnr(p.hazy, p.clean) / pairs.size();
    }
    const bool ok = l1_after < 0.25 * l1_before && psnr_out > psnr_in && secs < 600.0;
    return {ok, "L1 " + fmt_g(l1_before) + " -> " + fmt_g(l1_after) + " (" + fmt_g(100.0 * l1_after / l1_before) +
                    "%), PSNR " + fmt_g(psnr_in) + " -> " + fmt_g(psnr_out) + " dB, " + fmt_g(secs) + " s"};
}

// ------------------------------------------------------------------ resume

double max_param_diff(const nn::ParameterSet<float>& a, const nn::ParameterSet<float>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        m = std::max(m, max_abs_diff(a.params[i].param->value, b.params[i].param->value));
    }
    return m;
}

Verdict resume_equivalence(const fs::path& toy, const fs::path& scratch) {
    const data::DatasetLayout l{toy};
    const data::PairedDataset pairs(data::PairedDatasetSpec{l.paired_hazy(), l.paired_clean(), 8});
    data::AugmentationConfig aug;
    aug.resize_height = aug.resize_width = 32;
    aug.random_crop = 28;
    aug.normalize = false;
    const nn::FFAConfig ffa = haze::testing::tiny_ffa();

    auto fcfg = train::TrainConfig::defaults_for(train::Phase::ffa_pretrain);
    fcfg.write_files = false;
    fcfg.epoch_metrics = false;
    fcfg.batch_size = 2;
    fcfg.seed = 17;
    train::FFATrainer straight(fcfg, ffa, aug, pairs);
    for (int i = 0; i < 8; ++i) straight.train_step();
    train::FFATrainer first(fcfg, ffa, aug, pairs);
    for (int i = 0; i < 4; ++i) first.train_step();
    train::save_checkpoint(scratch / "ffa_mid.ckpt", first.checkpoint());
    train::FFATrainer second(fcfg, ffa, aug, pairs);
    second.resume(train::load_checkpoint(scratch / "ffa_mid.ckpt"));
    for (int i = 0; i < 4; ++i) second.train_step();
    const double ffa_diff = max_param_diff(straight.model().parameters("ffa"), second.model().parameters("ffa"));

    const data::UnpairedDataset hazy(data::UnpairedDatasetSpec{l.unpaired_hazy(), std::nullopt}, 0);
    const data::UnpairedDataset clean(data::UnpairedDatasetSpec{l.unpaired_clean(), std::nullopt}, 0);
    const data::PairedDataset k5(data::PairedDatasetSpec{l.paired_hazy(), l.paired_clean(), 5});
    auto gcfg = train::TrainConfig::defaults_for(train::Phase::finetune);
    gcfg.write_files = false;
    gcfg.epoch_metrics = false;
    gcfg.k_paired = 5;
    gcfg.seed = 17;
    const train::GanData gd{&hazy, &clean, &k5, nullptr};
    auto make = [&] {
        return std::make_unique<train::GanTrainer>(gcfg, nullptr, ffa, haze::testing::tiny_disc(), gan::LossConfig{},
                                                   aug, gd);
    };
    auto gs = make();
    for (int i = 0; i < 6; ++i) gs->train_step();
    auto g1 = make();
    for (int i = 0; i < 3; ++i) g1->train_step();
    train::save_checkpoint(scratch / "gan_mid.ckpt", g1->checkpoint());
    auto g2 = make();
    g2->resume(train::load_checkpoint(scratch / "gan_mid.ckpt"));
    for (int i = 0; i < 3; ++i) g2->train_step();
    const double gan_diff = max_param_diff(gs->state().all_parameters(), g2->state().all_parameters());

    return {ffa_diff == 0.0 && gan_diff <= 1e-6,
            "FFA max weight diff " + fmt_g(ffa_diff) + " (resume at 4 of 8), GAN " + fmt_g(gan_diff) + " (3 of 6)"};
}

// ------------------------------------------------------------------ grid

Verdict grid(const fs::path& toy, const fs::path& out) {
    const auto t0 = Clock::now();
    std::ostringstream captured;
    auto* old = std::cout.rdbuf(captured.rdbuf());
    const int code = cli::run({"grid", "--profile", "smoke", "--data-root", toy.string(), "--out", out.string()});
    std::cout.rdbuf(old);
    const double secs = seconds_since(t0);
    const std::string table = captured.str();

    int rows = 0;
    bool header = false;
    std::istringstream in(table);
    for (std::string line; std::getline(in, line);) {
        if (line == "| Number of Images | SSIM | PSNR (dB) |") header = true;
        else if (line.rfind("| ", 0) == 0 && line.find("---") == std::string::npos) ++rows;
    }
    int loadable = 0;
    for (int k : train::kVariantCounts) {
        const fs::path p = out / train::checkpoint_filename(train::Phase::finetune, train::variant_name(k), 2);
        try {
            const auto c = train::load_checkpoint(p);
            (void)train::load_generator(c);
            loadable += c.variant == train::variant_name(k);
        } catch (const std::exception&) {
        }
    }
    const bool ok = code == 0 && header && rows == 5 && loadable == 5 && secs < 1800.0;
    return {ok, "exit " + std::to_string(code) + ", " + std::to_string(rows) + " rows, " + std::to_string(loadable) +
                    "/5 checkpoints loadable, " + fmt_g(secs) + " s"};
}

// ------------------------------------------------------------------ degradation

Verdict degradation_monotonicity() {
    std::string detail;
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Tensor clean = data::procedural_scene(64, 64, 100 + seed);
        double prev = std::numeric_limits<double>::infinity();
        for (double s : {0.2, 0.5, 0.8}) {
            const double p = metrics::psnr(data::synthesize_degradation(clean, data::Degradation::haze, s, seed), clean);
            ok = ok && p < prev;
            prev = p;
            if (seed == 0) detail += (detail.empty() ? "" : " > ") + fmt_g(p);
        }
    }
    return {ok, "5 images strictly decreasing; image 0 PSNR " + detail + " dB"};
}

// ------------------------------------------------------------------ service

Verdict service_contract(const fs::path& checkpoints, const fs::path& scratch) {
    service::ServiceConfig cfg;
    cfg.checkpoint_dir = checkpoints;
    cfg.artifact_dir = scratch / "artifacts";
    cfg.image_size = 32;
    service::RestoreService svc(cfg);
    httplib::Server server;
    service::mount(server, svc);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    struct Stop {
        httplib::Server& s;
        std::thread& t;
        ~Stop() {
            s.stop();
            t.join();
        }
    } stop{server, th};

    const Tensor clean = data::procedural_scene(48, 48, 7);
    const auto hazy_png = data::encode_png(data::synthesize_degradation(clean, data::Degradation::haze, 0.6, 1));
    const auto clean_png = data::encode_png(clean);
    const std::string img(hazy_png.begin(), hazy_png.end());
    const std::string ref(clean_png.begin(), clean_png.end());
    httplib::Client cli("127.0.0.1", port);
    auto restore = [&](const std::string& variant, bool with_ref) {
        httplib::MultipartFormDataItems items{{"image", img, "in.png", "image/png"}, {"variant", variant, "", ""}};
        if (with_ref) items.push_back({"reference", ref, "ref.png", "image/png"});
        return cli.Post("/api/restore", items);
    };

    const auto a = restore("25", false);
    if (!a || a->status != 200) return {false, "restore failed: " + (a ? a->body : std::string("no response"))};
    const auto ja = nlohmann::json::parse(a->body);
    const std::string url = ja.at("restored_image_url");
    const std::string bytes_a = cli.Get(url)->body;
    // Recompute from scratch rather than serving the cached artifact.
    fs::remove_all(cfg.artifact_dir);
    fs::create_directories(cfg.artifact_dir);
    const auto b = restore("25", false);
    const std::string bytes_b = cli.Get(nlohmann::json::parse(b->body).at("restored_image_url"))->body;
    const bool deterministic = !bytes_a.empty() && bytes_a == bytes_b && nlohmann::json::parse(b->body) == ja;

    const auto unknown = restore("7", false);
    const bool not_found = unknown && unknown->status == 404 &&
                           nlohmann::json::parse(unknown->body).at("error").at("code") == "unknown_variant";

    const bool no_metrics = !ja.contains("psnr_db") && !ja.contains("ssim");
    const auto c = restore("25", true);
    const auto jc = nlohmann::json::parse(c->body);
    const bool metrics = jc.contains("psnr_db") && jc.contains("ssim") && jc["psnr_db"].is_number() &&
                         jc["ssim"].is_number();

    return {deterministic && not_found && no_metrics && metrics,
            std::string("identical bytes on repeat ") + (deterministic ? "yes" : "no") + ", unknown variant " +
                (unknown ? std::to_string(unknown->status) : "none") + ", metrics without reference " +
                (no_metrics ? "absent" : "present") + ", with reference " + (metrics ? "present" : "absent")};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    ScratchDir scratch("acceptance");
    const fs::path toy = scratch / "toy";
    data::ToyDatasetOptions opt;
    opt.size = 32;
    opt.seed = 3;
    data::write_toy_dataset(toy, opt);

    report("zero-weight identity", zero_weight_identity);
    report("gradient checks", gradient_checks);
    report("metric oracles", metric_oracles);
    report("closed-form losses", [&] { return closed_form_losses(toy); });
    report("overfit smoke", [&] { return overfit(scratch.path()); });
    report("resume equivalence", [&] { return resume_equivalence(toy, scratch.path()); });
    report("grid artifact", [&] { return grid(toy, scratch / "grid"); });
    report("degradation monotonicity", degradation_monotonicity);
    report("service contract", [&] { return service_contract(scratch / "grid", scratch.path()); });
    return failures == 0 ? 0 : 1;
}
