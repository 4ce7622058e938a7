#include <cstdlib>
#include <string>

#include "tremble/kernels/kernels.hpp"

namespace tremble::kernels {

namespace {

constexpr Table kScalar{Isa::Scalar, gather_min_scalar, max_abs_diff_scalar};
#if defined(__x86_64__)
constexpr Table kAvx2{Isa::Avx2, gather_min_avx2, max_abs_diff_avx2};
#endif

}  // namespace

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool supported(Isa isa) {
    if (isa == Isa::Scalar) return true;
#if defined(__x86_64__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Table& table(Isa isa) {
#if defined(__x86_64__)
    if (isa == Isa::Avx2 && supported(Isa::Avx2)) return kAvx2;
#endif
    (void)isa;
    return kScalar;
}

const Table& active() {
    static const Table& chosen = [] () -> const Table& {
        const char* force = std::getenv("TREMBLE_SIMD");
        if (force && std::string(force) == "scalar") return kScalar;
        return table(Isa::Avx2);
    }();
    return chosen;
}

}  // namespace tremble::kernels
