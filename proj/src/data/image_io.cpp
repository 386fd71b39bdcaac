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

#include "haze/data/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace haze::data {

namespace {

bool has_magic(std::span<const std::uint8_t> b) {
    static const std::uint8_t png[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (b.size() >= sizeof(png) && std::equal(png, png + sizeof(png), b.begin())) return true;
    return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

Tensor from_decoded(cv::Mat img, const std::string& what) {
    if (img.empty()) throw InputError("cannot decode image " + what);
    if (img.depth() == CV_16U) img.convertTo(img, CV_8U, 1.0 / 257.0);
    if (img.depth() != CV_8U) throw InputError("unsupported pixel depth in " + what);
    cv::Mat rgb;
    switch (img.channels()) {
        case 1: cv::cvtColor(img, rgb, cv::COLOR_GRAY2RGB); break;
        case 3: cv::cvtColor(img, rgb, cv::COLOR_BGR2RGB); break;
        case 4: cv::cvtColor(img, rgb, cv::COLOR_BGRA2RGB); break;
        default: throw InputError("unsupported channel count in " + what);
    }
    return mat_to_tensor(rgb);
}

}  // namespace

bool is_supported_image(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

Tensor read_image(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot open image " + p.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!has_magic(bytes)) throw InputError("not a PNG or JPEG file: " + p.string());
    cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8U, bytes.data());
    return from_decoded(cv::imdecode(raw, cv::IMREAD_UNCHANGED), p.string());
}

Tensor decode_image(std::span<const std::uint8_t> bytes) {
    if (!has_magic(bytes)) throw InputError("image must be PNG or JPEG");
    cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8U, const_cast<std::uint8_t*>(bytes.data()));
    return from_decoded(cv::imdecode(raw, cv::IMREAD_UNCHANGED), "upload");
}

Tensor mat_to_tensor(const cv::Mat& rgb8) {
    if (rgb8.type() != CV_8UC3) throw InputError("expected an 8-bit 3-channel image");
    Tensor t = Tensor::uninitialized(Shape{1, 3, rgb8.rows, rgb8.cols});
    for (int y = 0; y < rgb8.rows; ++y) {
        const std::uint8_t* row = rgb8.ptr<std::uint8_t>(y);
        for (int x = 0; x < rgb8.cols; ++x) {
            for (int c = 0; c < 3; ++c) t.at(0, c, y, x) = static_cast<float>(row[3 * x + c]) / 255.0f;
        }
    }
    return t;
}

cv::Mat tensor_to_mat(const Tensor& t, int index) {
    if (t.c() != 3 || index < 0 || index >= t.n()) throw InputError("cannot export tensor " + t.shape().str());
    cv::Mat out(t.h(), t.w(), CV_8UC3);
    for (int y = 0; y < t.h(); ++y) {
        std::uint8_t* row = out.ptr<std::uint8_t>(y);
        for (int x = 0; x < t.w(); ++x) {
            for (int c = 0; c < 3; ++c) {
                const float v = std::clamp(t.at(index, c, y, x), 0.0f, 1.0f);
                row[3 * x + c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const Tensor& t, int index) {
    cv::Mat bgr;
    cv::cvtColor(tensor_to_mat(t, index), bgr, cv::COLOR_RGB2BGR);
    std::vector<std::uint8_t> buf;
    if (!cv::imencode(".png", bgr, buf)) throw Error("PNG encoding failed");
    return buf;
}

void write_png(const std::filesystem::path& p, const Tensor& t, int index) {
    const auto bytes = encode_png(t, index);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + p.string());
}

Tensor resize(const Tensor& t, int height, int width) {
    if (height <= 0 || width <= 0) throw InputError("resize target must be positive");
    if (t.h() == height && t.w() == width) return t;
    const int interp = (height < t.h() && width < t.w()) ? cv::INTER_AREA : cv::INTER_LINEAR;
    Tensor out = Tensor::uninitialized(Shape{t.n(), t.c(), height, width});
    for (int b = 0; b < t.n(); ++b) {
        for (int c = 0; c < t.c(); ++c) {
            const cv::Mat src(t.h(), t.w(), CV_32F, const_cast<float*>(t.plane(b, c)));
            cv::Mat dst(height, width, CV_32F, out.plane(b, c));
            cv::resize(src, dst, cv::Size(width, height), 0, 0, interp);
        }
    }
    return out;
}

}  // namespace haze::data
