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

#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <type_traits>
#include <span>
#include <string>
#include <vector>

#include "haze/error.hpp"

namespace haze {

/// Allocator whose value-initialization is a no-op, so large buffers that are
/// about to be overwritten are not zero-filled first.
template <class T, class A = std::allocator<T>>
class DefaultInitAllocator : public A {
    using traits = std::allocator_traits<A>;

public:
    template <class U>
    struct rebind {
        using other = DefaultInitAllocator<U, typename traits::template rebind_alloc<U>>;
    };
    using A::A;

    template <class U>
    void construct(U* ptr) noexcept(std::is_nothrow_default_constructible_v<U>) {
        ::new (static_cast<void*>(ptr)) U;
    }
    template <class U, class... Args>
    void construct(U* ptr, Args&&... args) {
        traits::construct(static_cast<A&>(*this), ptr, std::forward<Args>(args)...);
    }
};

/// NCHW extent of a rank-4 tensor.
struct Shape {
    int n = 0;
    int c = 0;
    int h = 0;
    int w = 0;

    [[nodiscard]] std::size_t numel() const noexcept {
        return static_cast<std::size_t>(n) * c * h * w;
    }
    [[nodiscard]] std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
    bool operator==(const Shape&) const = default;

    [[nodiscard]] std::string str() const;
};

/// Dense rank-4 array in NCHW order with value semantics.
template <class T>
class BasicTensor {
public:
    using value_type = T;

    BasicTensor() = default;
    explicit BasicTensor(Shape shape, T fill = T(0)) : shape_(checked(shape)), data_(shape.numel(), fill) {}
    BasicTensor(Shape shape, const std::vector<T>& data)
        : shape_(shape), data_(data.begin(), data.end()) {
        if (data_.size() != shape_.numel()) {
            throw InputError("tensor data size does not match shape " + shape_.str());
        }
    }

    /// Tensor whose contents are unspecified until written.
    [[nodiscard]] static BasicTensor uninitialized(Shape shape) {
        BasicTensor t;
        t.shape_ = checked(shape);
        t.data_.resize(shape.numel());
        return t;
    }

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] int n() const noexcept { return shape_.n; }
    [[nodiscard]] int c() const noexcept { return shape_.c; }
    [[nodiscard]] int h() const noexcept { return shape_.h; }
    [[nodiscard]] int w() const noexcept { return shape_.w; }
    [[nodiscard]] std::size_t numel() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<T> data() noexcept { return data_; }
    [[nodiscard]] std::span<const T> data() const noexcept { return data_; }
    [[nodiscard]] T* ptr() noexcept { return data_.data(); }
    [[nodiscard]] const T* ptr() const noexcept { return data_.data(); }

    /// Pointer to the (h, w) plane of image `b`, channel `ch`.
    [[nodiscard]] T* plane(int b, int ch) noexcept {
        return data_.data() + (static_cast<std::size_t>(b) * shape_.c + ch) * shape_.plane();
    }
    [[nodiscard]] const T* plane(int b, int ch) const noexcept {
        return data_.data() + (static_cast<std::size_t>(b) * shape_.c + ch) * shape_.plane();
    }
    /// Pointer to the first channel of image `b`.
    [[nodiscard]] T* image(int b) noexcept { return plane(b, 0); }
    [[nodiscard]] const T* image(int b) const noexcept { return plane(b, 0); }

    [[nodiscard]] T& at(int b, int ch, int y, int x) noexcept {
        return plane(b, ch)[static_cast<std::size_t>(y) * shape_.w + x];
    }
    [[nodiscard]] T at(int b, int ch, int y, int x) const noexcept {
        return plane(b, ch)[static_cast<std::size_t>(y) * shape_.w + x];
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    /// Same data under a different shape with equal element count.
    [[nodiscard]] BasicTensor reshaped(Shape s) const {
        if (s.numel() != numel()) throw InputError("cannot reshape " + shape_.str() + " to " + s.str());
        BasicTensor t = *this;
        t.shape_ = s;
        return t;
    }

    template <class U>
    [[nodiscard]] BasicTensor<U> cast() const {
        return BasicTensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
    }

    bool operator==(const BasicTensor&) const = default;

private:
    static Shape checked(Shape s) {
        if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0) throw InputError("negative tensor extent " + s.str());
        return s;
    }

    Shape shape_{};
    std::vector<T, DefaultInitAllocator<T>> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

/// Throws InputError naming `what` if the two shapes differ.
void require_same_shape(const Shape& a, const Shape& b, const char* what);

/// Largest absolute elementwise difference.
template <class T>
double max_abs_diff(const BasicTensor<T>& a, const BasicTensor<T>& b);

/// Concatenate along the channel axis.
template <class T>
BasicTensor<T> concat_channels(std::span<const BasicTensor<T>* const> parts);

/// Inverse of concat_channels: slice channels [first, first + count).
template <class T>
BasicTensor<T> slice_channels(const BasicTensor<T>& t, int first, int count);

/// Select images [first, first + count) along the batch axis.
template <class T>
BasicTensor<T> slice_batch(const BasicTensor<T>& t, int first, int count);

/// Stack tensors with equal (c, h, w) along the batch axis.
template <class T>
BasicTensor<T> stack_batch(std::span<const BasicTensor<T>> parts);

template <class T>
void add_inplace(BasicTensor<T>& dst, const BasicTensor<T>& src);

template <class T>
void scale_inplace(BasicTensor<T>& dst, T s);

}  // namespace haze
