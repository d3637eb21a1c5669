// Portable reference kernels. Sequential 64-bit accumulation per pair; this
// is the numeric baseline the ISA variants are tested against.

#include <cmath>

#include "kgcjoin/kernels/lp_distance.hpp"

namespace kgcjoin::kernels {
namespace {

void l1_scalar(const float* a, std::size_t m, const float* b, std::size_t n,
               std::size_t dim, double* out, std::size_t ldo) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* ai = a + i * dim;
        for (std::size_t j = 0; j < n; ++j) {
            const float* bj = b + j * dim;
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                acc += std::fabs(static_cast<double>(ai[k]) - static_cast<double>(bj[k]));
            }
            out[i * ldo + j] = acc;
        }
    }
}

void l2_scalar(const float* a, std::size_t m, const float* b, std::size_t n,
               std::size_t dim, double* out, std::size_t ldo) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* ai = a + i * dim;
        for (std::size_t j = 0; j < n; ++j) {
            const float* bj = b + j * dim;
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = static_cast<double>(ai[k]) - static_cast<double>(bj[k]);
                acc += diff * diff;
            }
            out[i * ldo + j] = std::sqrt(acc);
        }
    }
}

}  // namespace

KernelSet scalar_kernels() noexcept { return {Isa::Scalar, &l1_scalar, &l2_scalar}; }

}  // namespace kgcjoin::kernels
