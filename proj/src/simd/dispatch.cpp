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

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

#include "haze/simd/kernels.hpp"

namespace haze::simd {
namespace {

bool cpu_supports(Isa isa) noexcept {
#if defined(__x86_64__) || defined(__i386__)
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
        case Isa::avx512:
            return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("fma");
    }
    return false;
#else
    return isa == Isa::scalar;
#endif
}

const KernelTable* initial_table() noexcept {
    Isa isa = best_isa();
    if (const char* env = std::getenv("HAZE_ISA")) {
        if (auto requested = parse_isa(env); requested && isa_available(*requested)) isa = *requested;
    }
    return kernels_for(isa);
}

std::atomic<const KernelTable*>& active() noexcept {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::avx512:
            return "avx512";
    }
    return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2") return Isa::avx2;
    if (name == "avx512") return Isa::avx512;
    return std::nullopt;
}

const KernelTable* kernels_for(Isa isa) noexcept {
    if (!cpu_supports(isa)) return nullptr;
    switch (isa) {
        case Isa::scalar:
            return &detail::kScalarTable;
        case Isa::avx2:
#if defined(HAZE_HAVE_AVX2)
            return &detail::kAvx2Table;
#else
            return nullptr;
#endif
        case Isa::avx512:
#if defined(HAZE_HAVE_AVX512)
            return &detail::kAvx512Table;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

bool isa_available(Isa isa) noexcept { return kernels_for(isa) != nullptr; }

Isa best_isa() noexcept {
    if (isa_available(Isa::avx512)) return Isa::avx512;
    if (isa_available(Isa::avx2)) return Isa::avx2;
    return Isa::scalar;
}

const KernelTable& kernels() noexcept { return *active().load(std::memory_order_acquire); }

bool set_isa(Isa isa) noexcept {
    const KernelTable* table = kernels_for(isa);
    if (table == nullptr) return false;
    active().store(table, std::memory_order_release);
    return true;
}

void gemm(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc,
          bool accumulate) {
    kernels().gemm(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}
void gemm(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
          int ldc, bool accumulate) {
    detail::gemm_reference(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}
void gemm_rows(int m, int n, int k, const float* a, int lda, const float* const* rows, float* c,
               int ldc, bool accumulate) {
    kernels().gemm_rows(m, n, k, a, lda, rows, c, ldc, accumulate);
}
void gemm_rows(int m, int n, int k, const double* a, int lda, const double* const* rows, double* c,
               int ldc, bool accumulate) {
    detail::gemm_rows_reference(m, n, k, a, lda, rows, c, ldc, accumulate);
}
float dot(const float* x, const float* y, std::size_t n) { return kernels().dot(x, y, n); }
double dot(const double* x, const double* y, std::size_t n) { return detail::dot_reference(x, y, n); }
float sum(const float* x, std::size_t n) { return kernels().sum(x, n); }
double sum(const double* x, std::size_t n) { return detail::sum_reference(x, n); }
void axpy(float alpha, const float* x, float* y, std::size_t n) { kernels().axpy(alpha, x, y, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    detail::axpy_reference(alpha, x, y, n);
}

template <class T>
void transpose(const T* src, int rows, int cols, int ld, T* dst) {
    constexpr int kBlock = 32;
    for (int r0 = 0; r0 < rows; r0 += kBlock) {
        const int r1 = std::min(rows, r0 + kBlock);
        for (int c0 = 0; c0 < cols; c0 += kBlock) {
            const int c1 = std::min(cols, c0 + kBlock);
            for (int r = r0; r < r1; ++r) {
                const T* s = src + static_cast<std::ptrdiff_t>(r) * ld;
                for (int c = c0; c < c1; ++c) dst[static_cast<std::ptrdiff_t>(c) * rows + r] = s[c];
            }
        }
    }
}

template void transpose<float>(const float*, int, int, int, float*);
template void transpose<double>(const double*, int, int, int, double*);

}  // namespace haze::simd
