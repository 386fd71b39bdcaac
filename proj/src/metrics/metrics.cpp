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

#include "haze/metrics/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "json.hpp"

namespace haze::metrics {

template <class T>
double psnr(const BasicTensor<T>& pred, const BasicTensor<T>& ref, double data_range) {
    require_same_shape(pred.shape(), ref.shape(), "psnr");
    if (!(data_range > 0.0)) throw InputError("psnr data_range must be positive");
    if (pred.numel() == 0) throw InputError("psnr of empty tensors");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.numel(); ++i) {
        const double d = static_cast<double>(pred.ptr()[i]) - static_cast<double>(ref.ptr()[i]);
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(pred.numel());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(data_range * data_range / mse));
}

std::vector<double> gaussian_window_1d(int size, double sigma) {
    std::vector<double> w(size);
    const double center = (size - 1) / 2.0;
    double total = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - center;
        w[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

namespace {

// Valid-mode separable filtering of one plane: (h, w) -> (h-k+1, w-k+1).
void filter_valid(const std::vector<double>& src, int h, int w, const std::vector<double>& g,
                  std::vector<double>& tmp, std::vector<double>& dst) {
    const int k = static_cast<int>(g.size());
    const int oh = h - k + 1;
    const int ow = w - k + 1;
    tmp.assign(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < h; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * w;
        double* out = tmp.data() + static_cast<std::size_t>(y) * ow;
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int t = 0; t < k; ++t) s += g[t] * row[x + t];
            out[x] = s;
        }
    }
    dst.assign(static_cast<std::size_t>(oh) * ow, 0.0);
    for (int y = 0; y < oh; ++y) {
        double* out = dst.data() + static_cast<std::size_t>(y) * ow;
        for (int t = 0; t < k; ++t) {
            const double gt = g[t];
            const double* in = tmp.data() + static_cast<std::size_t>(y + t) * ow;
            for (int x = 0; x < ow; ++x) out[x] += gt * in[x];
        }
    }
}

}  // namespace

template <class T>
double ssim(const BasicTensor<T>& pred, const BasicTensor<T>& ref, double data_range) {
    require_same_shape(pred.shape(), ref.shape(), "ssim");
    if (!(data_range > 0.0)) throw InputError("ssim data_range must be positive");
    const int h = pred.h();
    const int w = pred.w();
    if (h < kSsimWindow || w < kSsimWindow || pred.n() < 1 || pred.c() < 1) {
        throw InputError("ssim needs images of at least " + std::to_string(kSsimWindow) + "x" +
                         std::to_string(kSsimWindow) + ", got " + pred.shape().str());
    }
    const std::vector<double> g = gaussian_window_1d();
    const double c1 = (kSsimK1 * data_range) * (kSsimK1 * data_range);
    const double c2 = (kSsimK2 * data_range) * (kSsimK2 * data_range);
    const std::size_t plane = pred.shape().plane();
    const int oh = h - kSsimWindow + 1;
    const int ow = w - kSsimWindow + 1;
    const std::size_t positions = static_cast<std::size_t>(oh) * ow;

    std::vector<double> a(plane), b(plane), aa(plane), bb(plane), ab(plane), tmp;
    std::vector<double> mu_a, mu_b, s_aa, s_bb, s_ab;
    double total = 0.0;
    for (int n = 0; n < pred.n(); ++n) {
        std::vector<double> channel_mean(positions, 0.0);
        for (int ch = 0; ch < pred.c(); ++ch) {
            const T* pa = pred.plane(n, ch);
            const T* pb = ref.plane(n, ch);
            for (std::size_t i = 0; i < plane; ++i) {
                a[i] = pa[i];
                b[i] = pb[i];
                aa[i] = a[i] * a[i];
                bb[i] = b[i] * b[i];
                ab[i] = a[i] * b[i];
            }
            filter_valid(a, h, w, g, tmp, mu_a);
            filter_valid(b, h, w, g, tmp, mu_b);
            filter_valid(aa, h, w, g, tmp, s_aa);
            filter_valid(bb, h, w, g, tmp, s_bb);
            filter_valid(ab, h, w, g, tmp, s_ab);
            for (std::size_t i = 0; i < positions; ++i) {
                const double ma = mu_a[i];
                const double mb = mu_b[i];
                const double va = s_aa[i] - ma * ma;
                const double vb = s_bb[i] - mb * mb;
                const double cov = s_ab[i] - ma * mb;
                const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
                const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
                channel_mean[i] += num / den;
            }
        }
        double image = 0.0;
        for (double v : channel_mean) image += v / static_cast<double>(pred.c());
        total += image / static_cast<double>(positions);
    }
    return total / pred.n();
}

MetricSummary summarize(const std::vector<MetricReport>& rows) {
    MetricSummary s;
    for (const auto& r : rows) {
        if (!r.psnr_db || !r.ssim) continue;
        ++s.count;
        s.mean_psnr_db += *r.psnr_db;
        s.mean_ssim += *r.ssim;
    }
    if (s.count > 0) {
        s.mean_psnr_db /= static_cast<double>(s.count);
        s.mean_ssim /= static_cast<double>(s.count);
    }
    return s;
}

void write_csv(std::ostream& os, const std::vector<MetricReport>& rows) {
    os << "image_id,variant,psnr_db,ssim\n";
    const auto old = os.precision(10);
    for (const auto& r : rows) {
        os << r.image_id << ',' << r.variant << ',';
        if (r.psnr_db) os << *r.psnr_db;
        os << ',';
        if (r.ssim) os << *r.ssim;
        os << '\n';
    }
    os.precision(old);
}

std::string to_json(const std::vector<MetricReport>& rows) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row{{"image_id", r.image_id}, {"variant", r.variant}};
        row["psnr_db"] = r.psnr_db ? nlohmann::json(*r.psnr_db) : nlohmann::json(nullptr);
        row["ssim"] = r.ssim ? nlohmann::json(*r.ssim) : nlohmann::json(nullptr);
        j["rows"].push_back(std::move(row));
    }
    const MetricSummary s = summarize(rows);
    j["mean"] = {{"count", s.count},
                 {"psnr_db", s.count ? nlohmann::json(s.mean_psnr_db) : nlohmann::json(nullptr)},
                 {"ssim", s.count ? nlohmann::json(s.mean_ssim) : nlohmann::json(nullptr)}};
    return j.dump(2);
}

template double psnr(const Tensor&, const Tensor&, double);
template double psnr(const TensorD&, const TensorD&, double);
template double ssim(const Tensor&, const Tensor&, double);
template double ssim(const TensorD&, const TensorD&, double);

}  // namespace haze::metrics
