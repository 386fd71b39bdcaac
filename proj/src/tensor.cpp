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

#include "haze/tensor.hpp"

#include <cmath>
#include <cstring>

namespace haze {

std::string Shape::str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + ")";
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
    if (!(a == b)) {
        throw InputError(std::string(what) + ": shape mismatch " + a.str() + " vs " + b.str());
    }
}

template <class T>
double max_abs_diff(const BasicTensor<T>& a, const BasicTensor<T>& b) {
    require_same_shape(a.shape(), b.shape(), "max_abs_diff");
    double m = 0.0;
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(x[i]) - static_cast<double>(y[i])));
    }
    return m;
}

template <class T>
BasicTensor<T> concat_channels(std::span<const BasicTensor<T>* const> parts) {
    if (parts.empty()) throw InputError("concat_channels: no inputs");
    Shape s = parts.front()->shape();
    int channels = 0;
    for (const auto* p : parts) {
        const Shape& ps = p->shape();
        if (ps.n != s.n || ps.h != s.h || ps.w != s.w) {
            throw InputError("concat_channels: incompatible shapes " + s.str() + " and " + ps.str());
        }
        channels += ps.c;
    }
    s.c = channels;
    auto out = BasicTensor<T>::uninitialized(s);
    for (int b = 0; b < s.n; ++b) {
        T* dst = out.image(b);
        for (const auto* p : parts) {
            const std::size_t count = static_cast<std::size_t>(p->c()) * s.plane();
            std::memcpy(dst, p->image(b), count * sizeof(T));
            dst += count;
        }
    }
    return out;
}

template <class T>
BasicTensor<T> slice_channels(const BasicTensor<T>& t, int first, int count) {
    if (first < 0 || count < 0 || first + count > t.c()) {
        throw InputError("slice_channels: range out of bounds for " + t.shape().str());
    }
    auto out = BasicTensor<T>::uninitialized(Shape{t.n(), count, t.h(), t.w()});
    const std::size_t bytes = static_cast<std::size_t>(count) * t.shape().plane() * sizeof(T);
    for (int b = 0; b < t.n(); ++b) std::memcpy(out.image(b), t.plane(b, first), bytes);
    return out;
}

template <class T>
BasicTensor<T> slice_batch(const BasicTensor<T>& t, int first, int count) {
    if (first < 0 || count < 0 || first + count > t.n()) {
        throw InputError("slice_batch: range out of bounds for " + t.shape().str());
    }
    auto out = BasicTensor<T>::uninitialized(Shape{count, t.c(), t.h(), t.w()});
    if (count > 0) {
        std::memcpy(out.ptr(), t.image(first), out.numel() * sizeof(T));
    }
    return out;
}

template <class T>
BasicTensor<T> stack_batch(std::span<const BasicTensor<T>> parts) {
    if (parts.empty()) throw InputError("stack_batch: no inputs");
    Shape s = parts.front().shape();
    int total = 0;
    for (const auto& p : parts) {
        if (p.c() != s.c || p.h() != s.h || p.w() != s.w) {
            throw InputError("stack_batch: incompatible shapes " + s.str() + " and " + p.shape().str());
        }
        total += p.n();
    }
    s.n = total;
    auto out = BasicTensor<T>::uninitialized(s);
    T* dst = out.ptr();
    for (const auto& p : parts) {
        std::memcpy(dst, p.ptr(), p.numel() * sizeof(T));
        dst += p.numel();
    }
    return out;
}

template <class T>
void add_inplace(BasicTensor<T>& dst, const BasicTensor<T>& src) {
    require_same_shape(dst.shape(), src.shape(), "add_inplace");
    T* d = dst.ptr();
    const T* s = src.ptr();
    for (std::size_t i = 0; i < dst.numel(); ++i) d[i] += s[i];
}

template <class T>
void scale_inplace(BasicTensor<T>& dst, T s) {
    for (auto& v : dst.data()) v *= s;
}

#define HAZE_INSTANTIATE(T)                                                                   \
    template double max_abs_diff<T>(const BasicTensor<T>&, const BasicTensor<T>&);            \
    template BasicTensor<T> concat_channels<T>(std::span<const BasicTensor<T>* const>);       \
    template BasicTensor<T> slice_channels<T>(const BasicTensor<T>&, int, int);               \
    template BasicTensor<T> slice_batch<T>(const BasicTensor<T>&, int, int);                  \
    template BasicTensor<T> stack_batch<T>(std::span<const BasicTensor<T>>);                  \
    template void add_inplace<T>(BasicTensor<T>&, const BasicTensor<T>&);                     \
    template void scale_inplace<T>(BasicTensor<T>&, T);

HAZE_INSTANTIATE(float)
HAZE_INSTANTIATE(double)
#undef HAZE_INSTANTIATE

}  // namespace haze
