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

#include "haze/gan/cyclegan.hpp"

#include <cmath>

#include "haze/nn/losses.hpp"

namespace haze::gan {

void LossConfig::validate() const {
    if (!(lambda_cycle >= 0.0) || !std::isfinite(lambda_cycle)) {
        throw ConfigError("lambda_cycle must be finite and non-negative");
    }
}

CycleGAN::CycleGAN(const nn::FFAConfig& ffa, const nn::DiscriminatorConfig& disc)
    : g_xy(ffa), g_yx(ffa), d_x(disc), d_y(disc) {}

void CycleGAN::init(std::uint64_t seed) {
    Rng r0(derive_seed(seed, 0x6778)), r1(derive_seed(seed, 0x6779));
    Rng r2(derive_seed(seed, 0x6478)), r3(derive_seed(seed, 0x6479));
    g_xy.init(r0);
    g_yx.init(r1);
    d_x.init(r2);
    d_y.init(r3);
}

nn::ParameterSet<float> CycleGAN::generator_parameters() {
    nn::ParameterSet<float> set;
    g_xy.collect(set, "g_xy");
    g_yx.collect(set, "g_yx");
    return set;
}

nn::ParameterSet<float> CycleGAN::discriminator_parameters() {
    nn::ParameterSet<float> set;
    d_x.collect(set, "d_x");
    d_y.collect(set, "d_y");
    return set;
}

nn::ParameterSet<float> CycleGAN::all_parameters() {
    nn::ParameterSet<float> set;
    g_xy.collect(set, "g_xy");
    g_yx.collect(set, "g_yx");
    d_x.collect(set, "d_x");
    d_y.collect(set, "d_y");
    return set;
}

double gan_loss(const Tensor& scores, bool target_is_real) {
    return nn::mse_to_constant(scores, target_is_real ? 1.0 : 0.0).value;
}

double cycle_consistency_loss(const Tensor& original, const Tensor& reconstructed,
                              const LossConfig& cfg) {
    require_same_shape(original.shape(), reconstructed.shape(), "cycle consistency loss");
    return cfg.lambda_cycle * nn::mean_abs_error(reconstructed, original);
}

GeneratorStep generator_step(CycleGAN& s, const Tensor& hazy, const Tensor& clean,
                             const LossConfig& cfg, bool backward, const SupervisedPair& pair) {
    cfg.validate();
    using FFACache = nn::FFA::Cache;
    using DCache = nn::PatchDiscriminator<float>::Cache;
    FFACache c_fake_clean, c_rec_hazy, c_fake_hazy, c_rec_clean;
    DCache c_dy, c_dx;
    FFACache* cache[4] = {nullptr, nullptr, nullptr, nullptr};
    if (backward) {
        cache[0] = &c_fake_clean;
        cache[1] = &c_rec_hazy;
        cache[2] = &c_fake_hazy;
        cache[3] = &c_rec_clean;
    }

    GeneratorStep out;
    out.fake_clean = s.g_xy.forward(hazy, cache[0]);
    Tensor rec_hazy = s.g_yx.forward(out.fake_clean, cache[1]);
    out.fake_hazy = s.g_yx.forward(clean, cache[2]);
    Tensor rec_clean = s.g_xy.forward(out.fake_hazy, cache[3]);

    const Tensor score_y = s.d_y.forward(out.fake_clean, backward ? &c_dy : nullptr);
    const Tensor score_x = s.d_x.forward(out.fake_hazy, backward ? &c_dx : nullptr);

    auto adv_xy = nn::mse_to_constant(score_y, 1.0);
    auto adv_yx = nn::mse_to_constant(score_x, 1.0);
    auto cyc_f = nn::l1_loss(rec_hazy, hazy, cfg.lambda_cycle);
    auto cyc_b = nn::l1_loss(rec_clean, clean, cfg.lambda_cycle);

    GeneratorLosses& L = out.losses;
    L.adv_xy = adv_xy.value;
    L.adv_yx = adv_yx.value;
    L.cyc_forward = cyc_f.value;
    L.cyc_backward = cyc_b.value;

    const bool supervised = pair.hazy != nullptr && pair.clean != nullptr && pair.weight > 0.0;
    FFACache c_sup;
    Tensor sup_out;
    nn::LossGrad<float> sup;
    if (supervised) {
        sup_out = s.g_xy.forward(*pair.hazy, backward ? &c_sup : nullptr);
        sup = nn::l1_loss(sup_out, *pair.clean, pair.weight);
        L.supervised = sup.value;
    }
    L.total = L.adv_xy + L.adv_yx + L.cyc_forward + L.cyc_backward + L.supervised;
    if (!backward) return out;

    // Discriminators contribute input gradients only.
    Tensor g_fake_clean = s.d_y.backward(c_dy, adv_xy.grad, false, true);
    Tensor g_fake_hazy = s.d_x.backward(c_dx, adv_yx.grad, false, true);

    add_inplace(g_fake_clean, s.g_yx.backward(out.fake_clean, c_rec_hazy, cyc_f.grad, true, true));
    add_inplace(g_fake_hazy, s.g_xy.backward(out.fake_hazy, c_rec_clean, cyc_b.grad, true, true));
    s.g_xy.backward(hazy, c_fake_clean, g_fake_clean, true, false);
    s.g_yx.backward(clean, c_fake_hazy, g_fake_hazy, true, false);
    if (supervised) s.g_xy.backward(*pair.hazy, c_sup, sup.grad, true, false);
    return out;
}

GeneratorLosses generator_step_losses(CycleGAN& state, const Tensor& hazy, const Tensor& clean,
                                      const LossConfig& cfg) {
    return generator_step(state, hazy, clean, cfg, false).losses;
}

namespace {

double discriminator_half(nn::PatchDiscriminator<float>& d, const Tensor& real, const Tensor& fake,
                          bool backward) {
    nn::PatchDiscriminator<float>::Cache c_real, c_fake;
    const Tensor s_real = d.forward(real, backward ? &c_real : nullptr);
    const Tensor s_fake = d.forward(fake, backward ? &c_fake : nullptr);
    auto l_real = nn::mse_to_constant(s_real, 1.0, 0.5);
    auto l_fake = nn::mse_to_constant(s_fake, 0.0, 0.5);
    if (backward) {
        d.backward(c_real, l_real.grad, true, false);
        d.backward(c_fake, l_fake.grad, true, false);
    }
    return l_real.value + l_fake.value;
}

}  // namespace

DiscriminatorLosses discriminator_step(CycleGAN& s, const Tensor& hazy, const Tensor& clean,
                                       const Tensor& fake_hazy, const Tensor& fake_clean,
                                       bool backward) {
    DiscriminatorLosses out;
    out.d_x = discriminator_half(s.d_x, hazy, fake_hazy, backward);
    out.d_y = discriminator_half(s.d_y, clean, fake_clean, backward);
    return out;
}

}  // namespace haze::gan
