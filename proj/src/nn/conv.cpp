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

#include "haze/nn/conv.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "haze/simd/kernels.hpp"

namespace haze::nn {
namespace {

// Output pixels per im2col tile; keeps a 64-channel 3x3 column block in L2.
constexpr int kTilePixels = 512;

struct Geometry {
    int channels, height, width;
    int kernel, stride, padding;
    int out_h, out_w;
};

// col[(ci*k + ky)*k + kx][(oy - oy0)*out_w + ox]
template <class T>
void im2col(const T* img, const Geometry& g, int oy0, int oy1, T* col) {
    const int tile = (oy1 - oy0) * g.out_w;
    for (int ci = 0; ci < g.channels; ++ci) {
        const T* chan = img + static_cast<std::ptrdiff_t>(ci) * g.height * g.width;
        for (int ky = 0; ky < g.kernel; ++ky) {
            for (int kx = 0; kx < g.kernel; ++kx) {
                T* dst = col + static_cast<std::ptrdiff_t>((ci * g.kernel + ky) * g.kernel + kx) * tile;
                for (int oy = oy0; oy < oy1; ++oy) {
                    T* d = dst + static_cast<std::ptrdiff_t>(oy - oy0) * g.out_w;
                    const int iy = oy * g.stride - g.padding + ky;
                    if (iy < 0 || iy >= g.height) {
                        std::fill_n(d, g.out_w, T(0));
                        continue;
                    }
                    const T* src = chan + static_cast<std::ptrdiff_t>(iy) * g.width;
                    if (g.stride == 1) {
                        const int lo = std::clamp(g.padding - kx, 0, g.out_w);
                        const int hi = std::clamp(g.width + g.padding - kx, lo, g.out_w);
                        std::fill_n(d, lo, T(0));
                        std::memcpy(d + lo, src + lo - g.padding + kx,
                                    static_cast<std::size_t>(hi - lo) * sizeof(T));
                        std::fill(d + hi, d + g.out_w, T(0));
                    } else {
                        for (int ox = 0; ox < g.out_w; ++ox) {
                            const int ix = ox * g.stride - g.padding + kx;
                            d[ox] = (ix >= 0 && ix < g.width) ? src[ix] : T(0);
                        }
                    }
                }
            }
        }
    }
}

// Scatter-add of im2col's layout back into image space.
template <class T>
void col2im_add(const T* col, const Geometry& g, int oy0, int oy1, T* img) {
    const int tile = (oy1 - oy0) * g.out_w;
    for (int ci = 0; ci < g.channels; ++ci) {
        T* chan = img + static_cast<std::ptrdiff_t>(ci) * g.height * g.width;
        for (int ky = 0; ky < g.kernel; ++ky) {
            for (int kx = 0; kx < g.kernel; ++kx) {
                const T* src =
                    col + static_cast<std::ptrdiff_t>((ci * g.kernel + ky) * g.kernel + kx) * tile;
                for (int oy = oy0; oy < oy1; ++oy) {
                    const int iy = oy * g.stride - g.padding + ky;
                    if (iy < 0 || iy >= g.height) continue;
                    const T* s = src + static_cast<std::ptrdiff_t>(oy - oy0) * g.out_w;
                    T* d = chan + static_cast<std::ptrdiff_t>(iy) * g.width;
                    for (int ox = 0; ox < g.out_w; ++ox) {
                        const int ix = ox * g.stride - g.padding + kx;
                        if (ix >= 0 && ix < g.width) d[ix] += s[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

template <class T>
Conv2d<T>::Conv2d(const Conv2dSpec& spec) : spec_(spec) {
    if (spec.in_channels <= 0 || spec.out_channels <= 0 || spec.kernel <= 0 || spec.stride <= 0 ||
        spec.padding < 0) {
        throw ConfigError("invalid convolution spec");
    }
    weight = Parameter<T>(Shape{spec.out_channels, spec.in_channels, spec.kernel, spec.kernel});
    if (spec.bias) bias = Parameter<T>(Shape{spec.out_channels, 1, 1, 1});
}

template <class T>
void Conv2d<T>::init(Rng& rng) {
    const double fan_in = static_cast<double>(spec_.in_channels) * spec_.kernel * spec_.kernel;
    const double bound = 1.0 / std::sqrt(fan_in);
    for (auto& v : weight.value.data()) v = static_cast<T>(rng.uniform(-bound, bound));
    bias.value.fill(T(0));
}

template <class T>
Shape Conv2d<T>::output_shape(const Shape& in) const {
    const int oh = (in.h + 2 * spec_.padding - spec_.kernel) / spec_.stride + 1;
    const int ow = (in.w + 2 * spec_.padding - spec_.kernel) / spec_.stride + 1;
    return Shape{in.n, spec_.out_channels, oh, ow};
}

template <class T>
void Conv2d<T>::check_input(const Shape& in) const {
    if (in.c != spec_.in_channels) {
        throw ConfigError("conv expects " + std::to_string(spec_.in_channels) + " channels, got " +
                          in.str());
    }
    if (in.h + 2 * spec_.padding < spec_.kernel || in.w + 2 * spec_.padding < spec_.kernel) {
        throw InputError("conv input " + in.str() + " smaller than kernel " +
                         std::to_string(spec_.kernel));
    }
}

template <class T>
BasicTensor<T> Conv2d<T>::forward(const BasicTensor<T>& x) const {
    check_input(x.shape());
    const Shape os = output_shape(x.shape());
    auto y = BasicTensor<T>::uninitialized(os);
    const int pixels = os.h * os.w;
    const int kdim = spec_.in_channels * spec_.kernel * spec_.kernel;
    const T* wp = weight.value.ptr();

    if (is_pointwise()) {
        for (int b = 0; b < x.n(); ++b) {
            simd::gemm(os.c, pixels, kdim, wp, kdim, x.image(b), pixels, y.image(b), pixels, false);
        }
    } else if (spec_.stride == 1) {
        forward_shifted(x, y);
    } else {
        const Geometry g{x.c(), x.h(), x.w(), spec_.kernel, spec_.stride, spec_.padding, os.h, os.w};
        const int rows_per_tile = std::max(1, kTilePixels / os.w);
        std::vector<T> col(static_cast<std::size_t>(kdim) * rows_per_tile * os.w);
        for (int b = 0; b < x.n(); ++b) {
            for (int oy0 = 0; oy0 < os.h; oy0 += rows_per_tile) {
                const int oy1 = std::min(os.h, oy0 + rows_per_tile);
                const int tile = (oy1 - oy0) * os.w;
                im2col(x.image(b), g, oy0, oy1, col.data());
                simd::gemm(os.c, tile, kdim, wp, kdim, col.data(), tile,
                           y.image(b) + static_cast<std::ptrdiff_t>(oy0) * os.w, pixels, false);
            }
        }
    }

    if (spec_.bias) {
        for (int b = 0; b < os.n; ++b) {
            for (int co = 0; co < os.c; ++co) {
                const T bv = bias.value.ptr()[co];
                if (bv == T(0)) continue;
                T* p = y.plane(b, co);
                for (int i = 0; i < pixels; ++i) p[i] += bv;
            }
        }
    }
    return y;
}

// Stride-1 forward without an im2col copy. With the input zero-padded to
// (hp, wp) and flattened, tap (ci, ky, kx) of output pixel oy*wp + ox reads
// element ci*hp*wp + (oy + ky)*wp + ox + kx, so each im2col row is a shifted
// view of the padded buffer and the GEMM packs straight from it. Columns
// ox >= out_w are computed and discarded.
template <class T>
void Conv2d<T>::forward_shifted(const BasicTensor<T>& x, BasicTensor<T>& y) const {
    const int k = spec_.kernel;
    const int pad = spec_.padding;
    const int cin = spec_.in_channels;
    const int cout = spec_.out_channels;
    const int kdim = cin * k * k;
    const int hp = x.h() + 2 * pad;
    const int wp = x.w() + 2 * pad;
    const int oh = y.h();
    const int ow = y.w();
    const std::size_t padded_plane = static_cast<std::size_t>(hp) * wp;

    const int rows_per_tile = std::max(1, kTilePixels / wp);
    // Slack past the last plane keeps the discarded columns in bounds.
    std::vector<T> padded(padded_plane * cin + static_cast<std::size_t>(k) * wp, T(0));
    std::vector<T> acc(static_cast<std::size_t>(cout) * rows_per_tile * wp);
    std::vector<const T*> rows(kdim);

    for (int b = 0; b < x.n(); ++b) {
        for (int ci = 0; ci < cin; ++ci) {
            const T* src = x.plane(b, ci);
            T* dst = padded.data() + ci * padded_plane + static_cast<std::size_t>(pad) * wp + pad;
            for (int iy = 0; iy < x.h(); ++iy) {
                std::memcpy(dst + static_cast<std::size_t>(iy) * wp,
                            src + static_cast<std::size_t>(iy) * x.w(),
                            static_cast<std::size_t>(x.w()) * sizeof(T));
            }
        }
        for (int oy0 = 0; oy0 < oh; oy0 += rows_per_tile) {
            const int nrows = std::min(rows_per_tile, oh - oy0);
            const int cols = nrows * wp;
            for (int ci = 0; ci < cin; ++ci) {
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        rows[(ci * k + ky) * k + kx] = padded.data() + ci * padded_plane +
                                                       static_cast<std::size_t>(oy0 + ky) * wp + kx;
                    }
                }
            }
            simd::gemm_rows(cout, cols, kdim, weight.value.ptr(), kdim, rows.data(), acc.data(), cols,
                            false);
            for (int co = 0; co < cout; ++co) {
                const T* a = acc.data() + static_cast<std::size_t>(co) * cols;
                T* out = y.plane(b, co) + static_cast<std::size_t>(oy0) * ow;
                for (int r = 0; r < nrows; ++r) {
                    std::memcpy(out + static_cast<std::size_t>(r) * ow,
                                a + static_cast<std::size_t>(r) * wp,
                                static_cast<std::size_t>(ow) * sizeof(T));
                }
            }
        }
    }
}

template <class T>
BasicTensor<T> Conv2d<T>::backward(const BasicTensor<T>& x, const BasicTensor<T>& gy,
                                   bool param_grads, bool input_grad) {
    check_input(x.shape());
    const Shape os = output_shape(x.shape());
    require_same_shape(gy.shape(), os, "conv backward");
    const int pixels = os.h * os.w;
    const int kdim = spec_.in_channels * spec_.kernel * spec_.kernel;

    BasicTensor<T> gx;
    if (input_grad) gx = BasicTensor<T>(x.shape());

    // weight^T: (kdim x out)
    std::vector<T> wt(static_cast<std::size_t>(kdim) * os.c);
    simd::transpose(weight.value.ptr(), os.c, kdim, kdim, wt.data());
    T* gw = weight.grad.ptr();

    if (param_grads && spec_.bias) {
        T* gb = bias.grad.ptr();
        for (int b = 0; b < os.n; ++b) {
            for (int co = 0; co < os.c; ++co) gb[co] += simd::sum(gy.plane(b, co), pixels);
        }
    }

    if (is_pointwise()) {
        std::vector<T> xt;
        for (int b = 0; b < x.n(); ++b) {
            if (param_grads) {
                xt.resize(static_cast<std::size_t>(pixels) * kdim);
                simd::transpose(x.image(b), kdim, pixels, pixels, xt.data());
                simd::gemm(os.c, kdim, pixels, gy.image(b), pixels, xt.data(), kdim, gw, kdim, true);
            }
            if (input_grad) {
                simd::gemm(kdim, pixels, os.c, wt.data(), os.c, gy.image(b), pixels, gx.image(b),
                           pixels, false);
            }
        }
        return gx;
    }

    const Geometry g{x.c(), x.h(), x.w(), spec_.kernel, spec_.stride, spec_.padding, os.h, os.w};
    const int rows_per_tile = std::max(1, kTilePixels / os.w);
    const std::size_t tile_cap = static_cast<std::size_t>(kdim) * rows_per_tile * os.w;
    std::vector<T> col(tile_cap);
    std::vector<T> colt(param_grads ? tile_cap : 0);
    std::vector<T> dcol(input_grad ? tile_cap : 0);
    for (int b = 0; b < x.n(); ++b) {
        for (int oy0 = 0; oy0 < os.h; oy0 += rows_per_tile) {
            const int oy1 = std::min(os.h, oy0 + rows_per_tile);
            const int tile = (oy1 - oy0) * os.w;
            const T* gyt = gy.image(b) + static_cast<std::ptrdiff_t>(oy0) * os.w;
            if (param_grads) {
                im2col(x.image(b), g, oy0, oy1, col.data());
                simd::transpose(col.data(), kdim, tile, tile, colt.data());
                simd::gemm(os.c, kdim, tile, gyt, pixels, colt.data(), kdim, gw, kdim, true);
            }
            if (input_grad) {
                simd::gemm(kdim, tile, os.c, wt.data(), os.c, gyt, pixels, dcol.data(), tile, false);
                col2im_add(dcol.data(), g, oy0, oy1, gx.image(b));
            }
        }
    }
    return gx;
}

template <class T>
void Conv2d<T>::collect(ParameterSet<T>& set, const std::string& prefix) {
    set.add(join_name(prefix, "weight"), weight);
    if (spec_.bias) set.add(join_name(prefix, "bias"), bias);
}

template class Conv2d<float>;
template class Conv2d<double>;

}  // namespace haze::nn
