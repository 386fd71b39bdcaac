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

// AVX-512F variants. This translation unit is compiled with -mavx512f -mfma
// and only entered after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "haze/simd/kernels.hpp"

namespace haze::simd::detail {
namespace {

constexpr int kMr = 8;
constexpr int kNr = 32;
constexpr int kKc = 256;

inline __mmask16 tail_mask(int count) {
    if (count >= 16) return static_cast<__mmask16>(0xFFFF);
    if (count <= 0) return 0;
    return static_cast<__mmask16>((1u << count) - 1u);
}

// c[mr x nr] (+)= packed_a[kc x 8] * b[kc x nr]
template <bool Full>
inline void micro_kernel(int kc, const float* packed_a, const float* b, int ldb, float* c, int ldc,
                         int mr, int nr, bool overwrite) {
    __m512 acc[kMr][2];
#pragma GCC unroll 8
    for (int r = 0; r < kMr; ++r) {
        acc[r][0] = _mm512_setzero_ps();
        acc[r][1] = _mm512_setzero_ps();
    }
    const __mmask16 m0 = Full ? static_cast<__mmask16>(0xFFFF) : tail_mask(nr);
    const __mmask16 m1 = Full ? static_cast<__mmask16>(0xFFFF) : tail_mask(nr - 16);

    for (int q = 0; q < kc; ++q) {
        __m512 b0;
        __m512 b1;
        if constexpr (Full) {
            b0 = _mm512_loadu_ps(b);
            b1 = _mm512_loadu_ps(b + 16);
        } else {
            b0 = _mm512_maskz_loadu_ps(m0, b);
            b1 = _mm512_maskz_loadu_ps(m1, b + 16);
        }
#pragma GCC unroll 8
        for (int r = 0; r < kMr; ++r) {
            const __m512 av = _mm512_set1_ps(packed_a[r]);
            acc[r][0] = _mm512_fmadd_ps(av, b0, acc[r][0]);
            acc[r][1] = _mm512_fmadd_ps(av, b1, acc[r][1]);
        }
        packed_a += kMr;
        b += ldb;
    }

    for (int r = 0; r < mr; ++r) {
        float* crow = c + static_cast<std::ptrdiff_t>(r) * ldc;
        if constexpr (Full) {
            if (!overwrite) {
                acc[r][0] = _mm512_add_ps(acc[r][0], _mm512_loadu_ps(crow));
                acc[r][1] = _mm512_add_ps(acc[r][1], _mm512_loadu_ps(crow + 16));
            }
            _mm512_storeu_ps(crow, acc[r][0]);
            _mm512_storeu_ps(crow + 16, acc[r][1]);
        } else {
            if (!overwrite) {
                acc[r][0] = _mm512_add_ps(acc[r][0], _mm512_maskz_loadu_ps(m0, crow));
                acc[r][1] = _mm512_add_ps(acc[r][1], _mm512_maskz_loadu_ps(m1, crow + 16));
            }
            _mm512_mask_storeu_ps(crow, m0, acc[r][0]);
            _mm512_mask_storeu_ps(crow + 16, m1, acc[r][1]);
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
    // One buffer per thread so concurrent inference stays safe.
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
            const __mmask16 m0 = tail_mask(nr);
            const __mmask16 m1 = tail_mask(nr - 16);
            for (int q = 0; q < kc; ++q) {
                const float* src = brow(k0 + q) + j;
                _mm512_storeu_ps(bpack.data() + q * kNr, _mm512_maskz_loadu_ps(m0, src));
                _mm512_storeu_ps(bpack.data() + q * kNr + 16, _mm512_maskz_loadu_ps(m1, src + 16));
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

void gemm_avx512(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
                int ldc, bool accumulate) {
    gemm_impl(
        m, n, k, a, lda, [b, ldb](int q) { return b + static_cast<std::ptrdiff_t>(q) * ldb; }, c, ldc,
        accumulate);
}

void gemm_rows_avx512(int m, int n, int k, const float* a, int lda, const float* const* rows, float* c,
                    int ldc, bool accumulate) {
    gemm_impl(m, n, k, a, lda, [rows](int q) { return rows[q]; }, c, ldc, accumulate);
}

float dot_avx512(const float* x, const float* y, std::size_t n) {
    __m512 s0 = _mm512_setzero_ps();
    __m512 s1 = _mm512_setzero_ps();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        s0 = _mm512_fmadd_ps(_mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i), s0);
        s1 = _mm512_fmadd_ps(_mm512_loadu_ps(x + i + 16), _mm512_loadu_ps(y + i + 16), s1);
    }
    for (; i < n; i += 16) {
        const __mmask16 m = tail_mask(static_cast<int>(n - i));
        s0 = _mm512_fmadd_ps(_mm512_maskz_loadu_ps(m, x + i), _mm512_maskz_loadu_ps(m, y + i), s0);
    }
    return _mm512_reduce_add_ps(_mm512_add_ps(s0, s1));
}

float sum_avx512(const float* x, std::size_t n) {
    __m512 s0 = _mm512_setzero_ps();
    __m512 s1 = _mm512_setzero_ps();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        s0 = _mm512_add_ps(_mm512_loadu_ps(x + i), s0);
        s1 = _mm512_add_ps(_mm512_loadu_ps(x + i + 16), s1);
    }
    for (; i < n; i += 16) {
        s0 = _mm512_add_ps(_mm512_maskz_loadu_ps(tail_mask(static_cast<int>(n - i)), x + i), s0);
    }
    return _mm512_reduce_add_ps(_mm512_add_ps(s0, s1));
}

void axpy_avx512(float alpha, const float* x, float* y, std::size_t n) {
    const __m512 av = _mm512_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        _mm512_storeu_ps(y + i, _mm512_fmadd_ps(av, _mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i)));
    }
    if (i < n) {
        const __mmask16 m = tail_mask(static_cast<int>(n - i));
        const __m512 r =
            _mm512_fmadd_ps(av, _mm512_maskz_loadu_ps(m, x + i), _mm512_maskz_loadu_ps(m, y + i));
        _mm512_mask_storeu_ps(y + i, m, r);
    }
}

}  // namespace

const KernelTable kAvx512Table{Isa::avx512, &gemm_avx512, &gemm_rows_avx512, &dot_avx512, &sum_avx512, &axpy_avx512};

}  // namespace haze::simd::detail
