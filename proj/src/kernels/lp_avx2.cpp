// AVX2 + FMA kernels. Built with -mavx2 -mfma; only called after the runtime
// CPU check in dispatch.cpp.
//
// Inputs are float32, arithmetic is float64: each 8-wide float load is
// widened to two 4-wide double vectors. Tiles are one A row against four B
// rows; the leftover-column path runs the identical per-pair sequence so a
// pair's value is independent of where it falls in the tile.

#include <immintrin.h>

#include <cmath>

#include "kgcjoin/kernels/lp_distance.hpp"

namespace kgcjoin::kernels {
namespace {

inline double hsum(__m256d lo, __m256d hi) {
    const __m256d s = _mm256_add_pd(lo, hi);
    const __m128d low = _mm256_castpd256_pd128(s);
    const __m128d high = _mm256_extractf128_pd(s, 1);
    const __m128d p = _mm_add_pd(low, high);               // (s0+s2, s1+s3)
    return _mm_cvtsd_f64(_mm_add_sd(p, _mm_unpackhi_pd(p, p)));
}

struct Widened {
    __m256d lo;
    __m256d hi;
};

inline Widened widen(const float* p) {
    const __m256 v = _mm256_loadu_ps(p);
    return {_mm256_cvtps_pd(_mm256_castps256_ps128(v)), _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1))};
}

inline __m256d abs_pd(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

struct L2Op {
    static inline void step(__m256d& acc, __m256d diff) { acc = _mm256_fmadd_pd(diff, diff, acc); }
    static inline double tail(double acc, double diff) { return std::fma(diff, diff, acc); }
    static inline double finish(double acc) { return std::sqrt(acc); }
};

struct L1Op {
    static inline void step(__m256d& acc, __m256d diff) { acc = _mm256_add_pd(acc, abs_pd(diff)); }
    static inline double tail(double acc, double diff) { return acc + std::fabs(diff); }
    static inline double finish(double acc) { return acc; }
};

template <class Op>
inline double finish_pair(__m256d lo, __m256d hi, const float* ai, const float* bj,
                          std::size_t k0, std::size_t dim) {
    double acc = hsum(lo, hi);
    for (std::size_t k = k0; k < dim; ++k) {
        acc = Op::tail(acc, static_cast<double>(ai[k]) - static_cast<double>(bj[k]));
    }
    return Op::finish(acc);
}

template <class Op>
void pairwise(const float* a, std::size_t m, const float* b, std::size_t n, std::size_t dim,
              double* out, std::size_t ldo) {
    const std::size_t dvec = dim & ~std::size_t{7};
    for (std::size_t i = 0; i < m; ++i) {
        const float* ai = a + i * dim;
        double* oi = out + i * ldo;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const float* b0 = b + (j + 0) * dim;
            const float* b1 = b + (j + 1) * dim;
            const float* b2 = b + (j + 2) * dim;
            const float* b3 = b + (j + 3) * dim;
            __m256d l0 = _mm256_setzero_pd(), h0 = _mm256_setzero_pd();
            __m256d l1 = _mm256_setzero_pd(), h1 = _mm256_setzero_pd();
            __m256d l2 = _mm256_setzero_pd(), h2 = _mm256_setzero_pd();
            __m256d l3 = _mm256_setzero_pd(), h3 = _mm256_setzero_pd();
            for (std::size_t k = 0; k < dvec; k += 8) {
                const Widened va = widen(ai + k);
                Widened vb = widen(b0 + k);
                Op::step(l0, _mm256_sub_pd(va.lo, vb.lo));
                Op::step(h0, _mm256_sub_pd(va.hi, vb.hi));
                vb = widen(b1 + k);
                Op::step(l1, _mm256_sub_pd(va.lo, vb.lo));
                Op::step(h1, _mm256_sub_pd(va.hi, vb.hi));
                vb = widen(b2 + k);
                Op::step(l2, _mm256_sub_pd(va.lo, vb.lo));
                Op::step(h2, _mm256_sub_pd(va.hi, vb.hi));
                vb = widen(b3 + k);
                Op::step(l3, _mm256_sub_pd(va.lo, vb.lo));
                Op::step(h3, _mm256_sub_pd(va.hi, vb.hi));
            }
            oi[j + 0] = finish_pair<Op>(l0, h0, ai, b0, dvec, dim);
            oi[j + 1] = finish_pair<Op>(l1, h1, ai, b1, dvec, dim);
            oi[j + 2] = finish_pair<Op>(l2, h2, ai, b2, dvec, dim);
            oi[j + 3] = finish_pair<Op>(l3, h3, ai, b3, dvec, dim);
        }
        for (; j < n; ++j) {
            const float* bj = b + j * dim;
            __m256d lo = _mm256_setzero_pd(), hi = _mm256_setzero_pd();
            for (std::size_t k = 0; k < dvec; k += 8) {
                const Widened va = widen(ai + k);
                const Widened vb = widen(bj + k);
                Op::step(lo, _mm256_sub_pd(va.lo, vb.lo));
                Op::step(hi, _mm256_sub_pd(va.hi, vb.hi));
            }
            oi[j] = finish_pair<Op>(lo, hi, ai, bj, dvec, dim);
        }
    }
}

}  // namespace

KernelSet avx2_kernels() noexcept { return {Isa::Avx2, &pairwise<L1Op>, &pairwise<L2Op>}; }

}  // namespace kgcjoin::kernels
