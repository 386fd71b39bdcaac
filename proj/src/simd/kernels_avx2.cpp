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

// AVX2 + FMA variants. Compiled with -mavx2 -mfma; entered only after CPUID
// reports both extensions.

#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "haze/simd/kernels.hpp"

namespace haze::simd::detail {
namespace {

constexpr int kMr = 6;
constexpr int kNr = 16;
constexpr int kKc = 256;

inline __m256i lane_mask(int count) {
    const __m256i idx = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    return _mm256_cmpgt_epi32(_mm256_set1_epi32(count), idx);
}

inline float hsum(__m256 v) {
    const __m128 lo = _mm256_castps256_ps128(v);
    const __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x55));
    return _mm_cvtss_f32(s);
}

template <bool Full>
inline void micro_kernel(int kc, const float* packed_a, const float* b, int ldb, float* c, int ldc,
                         int mr, int nr, bool overwrite) {
    __m256 acc[kMr][2];
#pragma GCC unroll 6
    for (int r = 0; r < kMr; ++r) {
        acc[r][0] = _mm256_setzero_ps();
        acc[r][1] = _mm256_setzero_ps();
    }
    const __m256i m0 = lane_mask(nr);
    const __m256i m1 = lane_mask(nr - 8);

    for (int q = 0; q < kc; ++q) {
        __m256 b0;
        __m256 b1;
        if constexpr (Full) {
            b0 = _mm256_loadu_ps(b);
            b1 = _mm256_loadu_ps(b + 8);
        } else {
            b0 = _mm256_maskload_ps(b, m0);
            b1 = _mm256_maskload_ps(b + 8, m1);
        }
#pragma GCC unroll 6
        for (int r = 0; r < kMr; ++r) {
            const __m256 av = _mm256_broadcast_ss(packed_a + r);
            acc[r][0] = _mm256_fmadd_ps(av, b0, acc[r][0]);
            acc[r][1] = _mm256_fmadd_ps(av, b1, acc[r][1]);
        }
        packed_a += kMr;
        b += ldb;
    }

    for (int r = 0; r < mr; ++r) {
        float* crow = c + static_cast<std::ptrdiff_t>(r) * ldc;
        if constexpr (Full) {
            if (!overwrite) {
                acc[r][0] = _mm256_add_ps(acc[r][0], _mm256_loadu_ps(crow));
                acc[r][1] = _mm256_add_ps(acc[r][1], _mm256_loadu_ps(crow + 8));
            }
            _mm256_storeu_ps(crow, acc[r][0]);
            _mm256_storeu_ps(crow + 8, acc[r][1]);
        } else {
            if (!overwrite) {
                acc[r][0] = _mm256_add_ps(acc[r][0], _mm256_maskload_ps(crow, m0));
                acc[r][1] = _mm256_add_ps(acc[r][1], _mm256_maskload_ps(crow + 8, m1));
            }
            _mm256_maskstore_ps(crow, m0, acc[r][0]);
            _mm256_maskstore_ps(crow + 8, m1, acc[r][1]);
        }
    }
}

// Row q of B starts at brow(q).
template <class BRow>
void gemm_impl(int m, int n, int k, const float* a, int lda, BRow brow, float* c, int ldc,
               bool accumulate) {
    if (m <= 0 || n <= 0) return;
    if (k <= 0) {
        if (!accumulate) {
            for (int i = 0; i < m; ++i) std::fill_n(c + static_cast<std::ptrdiff_t>(i) * ldc, n, 0.0f);
        }
        return;
    }
    thread_local std::vector<float> packed;
    const int panels = (m + kMr - 1) / kMr;

    for (int k0 = 0; k0 < k; k0 += kKc) {
        const int kc = std::min(kKc, k - k0);
        packed.assign(static_cast<std::size_t>(panels) * kc * kMr, 0.0f);
        for (int p = 0; p < panels; ++p) {
            float* dst = packed.data() + static_cast<std::size_t>(p) * kc * kMr;
            const int rows = std::min(kMr, m - p * kMr);
            for (int r = 0; r < rows; ++r) {
                const float* src = a + static_cast<std::ptrdiff_t>(p * kMr + r) * lda + k0;
                for (int q = 0; q < kc; ++q) dst[q * kMr + r] = src[q];
            }
        }
        const bool overwrite = (k0 == 0) && !accumulate;
        // Contiguous copy of the B micro-panel; large power-of-two ldb would
        // otherwise alias into a handful of L1 sets.
        thread_local std::vector<float> bpack;
        bpack.resize(static_cast<std::size_t>(kc) * kNr);
        for (int j = 0; j < n; j += kNr) {
            const int nr = std::min(kNr, n - j);
            const __m256i m0 = lane_mask(nr);
            const __m256i m1 = lane_mask(nr - 8);
            for (int q = 0; q < kc; ++q) {
                const float* src = brow(k0 + q) + j;
                _mm256_storeu_ps(bpack.data() + q * kNr, _mm256_maskload_ps(src, m0));
                _mm256_storeu_ps(bpack.data() + q * kNr + 8, _mm256_maskload_ps(src + 8, m1));
            }
            for (int p = 0; p < panels; ++p) {
                const int mr = std::min(kMr, m - p * kMr);
                const float* pa = packed.data() + static_cast<std::size_t>(p) * kc * kMr;
                float* cp = c + static_cast<std::ptrdiff_t>(p * kMr) * ldc + j;
                if (nr == kNr) {
                    micro_kernel<true>(kc, pa, bpack.data(), kNr, cp, ldc, mr, nr, overwrite);
                } else {
                    micro_kernel<false>(kc, pa, bpack.data(), kNr, cp, ldc, mr, nr, overwrite);
                }
            }
        }
    }
}

void gemm_avx2(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
                int ldc, bool accumulate) {
    gemm_impl(
        m, n, k, a, lda, [b, ldb](int q) { return b + static_cast<std::ptrdiff_t>(q) * ldb; }, c, ldc,
        accumulate);
}

void gemm_rows_avx2(int m, int n, int k, const float* a, int lda, const float* const* rows, float* c,
                    int ldc, bool accumulate) {
    gemm_impl(m, n, k, a, lda, [rows](int q) { return rows[q]; }, c, ldc, accumulate);
}

float dot_avx2(const float* x, const float* y, std::size_t n) {
    __m256 s0 = _mm256_setzero_ps();
    __m256 s1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        s0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), s0);
        s1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8), s1);
    }
    float acc = hsum(_mm256_add_ps(s0, s1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

float sum_avx2(const float* x, std::size_t n) {
    __m256 s0 = _mm256_setzero_ps();
    __m256 s1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        s0 = _mm256_add_ps(_mm256_loadu_ps(x + i), s0);
        s1 = _mm256_add_ps(_mm256_loadu_ps(x + i + 8), s1);
    }
    float acc = hsum(_mm256_add_ps(s0, s1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_avx2(float alpha, const float* x, float* y, std::size_t n) {
    const __m256 av = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable kAvx2Table{Isa::avx2, &gemm_avx2, &gemm_rows_avx2, &dot_avx2, &sum_avx2, &axpy_avx2};

}  // namespace haze::simd::detail
