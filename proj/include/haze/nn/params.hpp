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

#include <string>
#include <vector>

#include "haze/random.hpp"
#include "haze/tensor.hpp"

namespace haze::nn {

/// Learnable tensor plus its accumulated gradient.
template <class T>
struct Parameter {
    BasicTensor<T> value;
    BasicTensor<T> grad;

    Parameter() = default;
    explicit Parameter(Shape s) : value(s), grad(s) {}

    void zero_grad() { grad.fill(T(0)); }
};

template <class T>
struct ParameterRef {
    std::string name;
    Parameter<T>* param;
};

template <class T>
struct BufferRef {
    std::string name;
    BasicTensor<T>* tensor;
};

/// Flat view over a module tree, keyed by hierarchical dotted names.
template <class T>
struct ParameterSet {
    std::vector<ParameterRef<T>> params;
    std::vector<BufferRef<T>> buffers;

    void add(std::string name, Parameter<T>& p) { params.push_back({std::move(name), &p}); }
    void add_buffer(std::string name, BasicTensor<T>& t) { buffers.push_back({std::move(name), &t}); }

    void zero_grad() {
        for (auto& p : params) p.param->zero_grad();
    }
    /// Set every learnable value to zero (buffers untouched).
    void zero_values() {
        for (auto& p : params) p.param->value.fill(T(0));
    }
    void scale_grads(T s) {
        for (auto& p : params) {
            for (T& g : p.param->grad.data()) g *= s;
        }
    }
    [[nodiscard]] std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const auto& p : params) n += p.param->value.numel();
        return n;
    }
    [[nodiscard]] double grad_abs_sum() const {
        double s = 0.0;
        for (const auto& p : params) {
            for (T g : p.param->grad.data()) s += g < 0 ? -static_cast<double>(g) : g;
        }
        return s;
    }
};

inline std::string join_name(const std::string& prefix, const std::string& leaf) {
    return prefix.empty() ? leaf : prefix + "." + leaf;
}

}  // namespace haze::nn
