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

// Arithmetic inner loops used by the network layers.
//
// Every kernel has a portable scalar reference and, on x86-64, AVX2+FMA and
// AVX-512F variants. The variant is chosen once at startup from CPUID and can
// be forced with HAZE_ISA=scalar|avx2|avx512 or set_isa(). Matrices are
// row-major with explicit leading dimensions.

#include <cstddef>
#include <optional>
#include <string_view>

namespace haze::simd {

enum class Isa { scalar, avx2, avx512 };

[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;
[[nodiscard]] std::optional<Isa> parse_isa(std::string_view name) noexcept;

using GemmFn = void (*)(int m, int n, int k, const float* a, int lda, const float* b, int ldb,
                        float* c, int ldc, bool accumulate);
using GemmRowsFn = void (*)(int m, int n, int k, const float* a, int lda, const float* const* rows,
                           float* c, int ldc, bool accumulate);
using DotFn = float (*)(const float* x, const float* y, std::size_t n);
using SumFn = float (*)(const float* x, std::size_t n);
using AxpyFn = void (*)(float alpha, const float* x, float* y, std::size_t n);

struct KernelTable {
    Isa isa;
    /// c[m x n] = (accumulate ? c : 0) + a[m x k] * b[k x n]
    GemmFn gemm;
    /// Same product with row q of b read from rows[q] (indirect im2col).
    GemmRowsFn gemm_rows;
    DotFn dot;
    SumFn sum;
    /// y += alpha * x
    AxpyFn axpy;
};

/// True if this build contains the variant and the CPU can execute it.
[[nodiscard]] bool isa_available(Isa isa) noexcept;

/// Kernel table of a specific variant; nullptr when unavailable.
[[nodiscard]] const KernelTable* kernels_for(Isa isa) noexcept;

/// Widest variant available on this machine.
[[nodiscard]] Isa best_isa() noexcept;

/// Currently active kernel table.
[[nodiscard]] const KernelTable& kernels() noexcept;

/// Switch the active variant. Returns false (and keeps the current one) if unavailable.
bool set_isa(Isa isa) noexcept;

[[nodiscard]] inline Isa active_isa() noexcept { return kernels().isa; }

// Typed front doors. Float goes through the active table; double always uses
// the scalar reference (it only serves gradient checks and oracles).
void gemm(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc,
          bool accumulate);
void gemm(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
          int ldc, bool accumulate);
void gemm_rows(int m, int n, int k, const float* a, int lda, const float* const* rows, float* c,
               int ldc, bool accumulate);
void gemm_rows(int m, int n, int k, const double* a, int lda, const double* const* rows, double* c,
               int ldc, bool accumulate);
float dot(const float* x, const float* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
float sum(const float* x, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// dst[cols x rows] = transpose(src[rows x cols]) with source leading dimension `ld`.
template <class T>
void transpose(const T* src, int rows, int cols, int ld, T* dst);

namespace detail {
// Reference implementations, shared by both precisions.
template <class T>
void gemm_reference(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
                    bool accumulate);
template <class T>
void gemm_rows_reference(int m, int n, int k, const T* a, int lda, const T* const* rows, T* c,
                         int ldc, bool accumulate);
template <class T>
T dot_reference(const T* x, const T* y, std::size_t n);
template <class T>
T sum_reference(const T* x, std::size_t n);
template <class T>
void axpy_reference(T alpha, const T* x, T* y, std::size_t n);

extern const KernelTable kScalarTable;
#if defined(HAZE_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(HAZE_HAVE_AVX512)
extern const KernelTable kAvx512Table;
#endif
}  // namespace detail

}  // namespace haze::simd
