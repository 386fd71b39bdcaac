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

#include "haze/simd/kernels.hpp"

#include <algorithm>

namespace haze::simd::detail {

template <class T>
void gemm_reference(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
                    bool accumulate) {
    for (int i = 0; i < m; ++i) {
        T* crow = c + static_cast<std::ptrdiff_t>(i) * ldc;
        if (!accumulate) std::fill(crow, crow + n, T(0));
        const T* arow = a + static_cast<std::ptrdiff_t>(i) * lda;
        for (int p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* brow = b + static_cast<std::ptrdiff_t>(p) * ldb;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void gemm_rows_reference(int m, int n, int k, const T* a, int lda, const T* const* rows, T* c,
                         int ldc, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        T* crow = c + static_cast<std::ptrdiff_t>(i) * ldc;
        if (!accumulate) std::fill(crow, crow + n, T(0));
        const T* arow = a + static_cast<std::ptrdiff_t>(i) * lda;
        for (int p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* brow = rows[p];
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
T dot_reference(const T* x, const T* y, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

template <class T>
T sum_reference(const T* x, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

template <class T>
void axpy_reference(T alpha, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template void gemm_reference<float>(int, int, int, const float*, int, const float*, int, float*,
                                    int, bool);
template void gemm_reference<double>(int, int, int, const double*, int, const double*, int,
                                     double*, int, bool);
template void gemm_rows_reference<float>(int, int, int, const float*, int, const float* const*,
                                         float*, int, bool);
template void gemm_rows_reference<double>(int, int, int, const double*, int, const double* const*,
                                          double*, int, bool);
template float dot_reference<float>(const float*, const float*, std::size_t);
template double dot_reference<double>(const double*, const double*, std::size_t);
template float sum_reference<float>(const float*, std::size_t);
template double sum_reference<double>(const double*, std::size_t);
template void axpy_reference<float>(float, const float*, float*, std::size_t);
template void axpy_reference<double>(double, const double*, double*, std::size_t);

const KernelTable kScalarTable{
    Isa::scalar, &gemm_reference<float>, &gemm_rows_reference<float>, &dot_reference<float>, &sum_reference<float>,
    &axpy_reference<float>,
};

}  // namespace haze::simd::detail
