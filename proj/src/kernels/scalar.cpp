#include <cmath>

#include "tremble/kernels/kernels.hpp"

namespace tremble::kernels {

double gather_min_scalar(const double* v, const std::uint32_t* idx, std::size_t n) {
    double m = v[idx[0]];
    for (std::size_t i = 1; i < n; ++i) m = v[idx[i]] < m ? v[idx[i]] : m;
    return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        m = d > m ? d : m;
    }
    return m;
}

}  // namespace tremble::kernels
