#include <atomic>
#include <cstdlib>
#include <string>

#include "kgcjoin/error.hpp"
#include "kgcjoin/kernels/lp_distance.hpp"

namespace kgcjoin::kernels {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

namespace {

bool cpu_has_avx2() noexcept {
#if defined(KGCJOIN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelSet* find(Isa isa) {
    static const std::vector<KernelSet> all = available_kernels();
    for (const auto& k : all) {
        if (k.isa == isa) return &k;
    }
    return nullptr;
}

const KernelSet* pick_default() {
    if (const char* env = std::getenv("KGCJOIN_KERNEL")) {
        const std::string want = env;
        for (Isa isa : {Isa::Scalar, Isa::Avx2}) {
            if (want == to_string(isa)) {
                if (const KernelSet* k = find(isa)) return k;
            }
        }
    }
    static const std::vector<KernelSet> all = available_kernels();
    return find(all.back().isa);
}

std::atomic<const KernelSet*>& active_slot() {
    static std::atomic<const KernelSet*> slot{pick_default()};
    return slot;
}

}  // namespace

std::vector<KernelSet> available_kernels() {
    std::vector<KernelSet> out{scalar_kernels()};
#if defined(KGCJOIN_HAVE_AVX2)
    if (cpu_has_avx2()) out.push_back(avx2_kernels());
#endif
    return out;
}

const KernelSet& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_kernels(Isa isa) {
    const KernelSet* k = find(isa);
    if (k == nullptr) {
        fail(ErrorKind::Parameter,
             std::string("kernel variant '") + std::string(to_string(isa)) + "' not available");
    }
    active_slot().store(k, std::memory_order_release);
}

}  // namespace kgcjoin::kernels
