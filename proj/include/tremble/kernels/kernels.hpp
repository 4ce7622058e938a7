#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace tremble::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view name(Isa isa);

/// min over v[idx[0..n)]; n > 0.
using GatherMinFn = double (*)(const double* v, const std::uint32_t* idx, std::size_t n);
/// max over |a[i] - b[i]|; 0 for n == 0.
using MaxAbsDiffFn = double (*)(const double* a, const double* b, std::size_t n);

struct Table {
    Isa isa;
    GatherMinFn gather_min;
    MaxAbsDiffFn max_abs_diff;
};

double gather_min_scalar(const double* v, const std::uint32_t* idx, std::size_t n);
double max_abs_diff_scalar(const double* a, const double* b, std::size_t n);
#if defined(__x86_64__)
double gather_min_avx2(const double* v, const std::uint32_t* idx, std::size_t n);
double max_abs_diff_avx2(const double* a, const double* b, std::size_t n);
#endif

bool supported(Isa isa);
/// Kernels for `isa`; falls back to scalar when the CPU lacks it.
const Table& table(Isa isa);
/// Best supported table, chosen once. TREMBLE_SIMD=scalar forces scalar.
const Table& active();

}  // namespace tremble::kernels
