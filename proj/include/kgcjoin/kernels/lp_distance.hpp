#pragma once

// Pairwise Lp distance kernels: one portable reference implementation and
// ISA-specific variants, picked once at startup.
//
// Every variant computes one pair at a time with a fixed reduction order, so
// the value for pair (i, j) never depends on m, n or tile position. Variants
// agree with each other to rounding (~1e-12 relative), not bitwise.

#include <cstddef>
#include <string_view>
#include <vector>

namespace kgcjoin::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

/// out[i * ldo + j] = ||a_i - b_j||_p for i < m, j < n. Rows are dense with
/// stride dim.
using PairwiseFn = void (*)(const float* a, std::size_t m, const float* b,
                            std::size_t n, std::size_t dim, double* out,
                            std::size_t ldo);

struct KernelSet {
    Isa isa;
    PairwiseFn l1;
    PairwiseFn l2;

    PairwiseFn for_norm(int p) const noexcept { return p == 1 ? l1 : l2; }
};

KernelSet scalar_kernels() noexcept;

#if defined(KGCJOIN_HAVE_AVX2)
KernelSet avx2_kernels() noexcept;
#endif

/// Variants usable on this build and CPU, scalar first.
std::vector<KernelSet> available_kernels();

/// Best available variant. The KGCJOIN_KERNEL environment variable
/// ("scalar" / "avx2") overrides the choice.
const KernelSet& active_kernels();

/// Replaces the active variant (tests and benchmarks).
void set_active_kernels(Isa isa);

}  // namespace kgcjoin::kernels
