#include <cmath>

#include "tables.hpp"

namespace mtc::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i + 0] * b[i + 0];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s2) + (s1 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Equivalent to std::round, written as truncate-then-adjust so the SIMD
// variants can mirror it exactly. x - trunc(x) is exact for every finite double.
inline double round_half_away(double x) {
    const double t = std::trunc(x);
    const double frac = x - t;
    if (frac >= 0.5) return t + 1.0;
    if (frac <= -0.5) return t - 1.0;
    return t;
}

void scale_round(const double* in, double scale, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = round_half_away(in[i] * scale);
}

double abs_diff_sum(const double* a, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t m = n - 1;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        s0 += std::fabs(a[i + 1] - a[i + 0]);
        s1 += std::fabs(a[i + 2] - a[i + 1]);
        s2 += std::fabs(a[i + 3] - a[i + 2]);
        s3 += std::fabs(a[i + 4] - a[i + 3]);
    }
    double s = (s0 + s2) + (s1 + s3);
    for (; i < m; ++i) s += std::fabs(a[i + 1] - a[i]);
    return s;
}

inline double norm3(double dx, double dy, double dz) {
    return std::sqrt((dx * dx + dy * dy) + dz * dz);
}

double point_distance_sum(const double* px, const double* py, const double* pz,
                          const double* qx, const double* qy, const double* qz,
                          std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (std::size_t lane = 0; lane < 4; ++lane) {
            const std::size_t j = i + lane;
            s[lane] += norm3(px[j] - qx[j], py[j] - qy[j], pz[j] - qz[j]);
        }
    }
    double total = (s[0] + s[2]) + (s[1] + s[3]);
    for (; i < n; ++i) total += norm3(px[i] - qx[i], py[i] - qy[i], pz[i] - qz[i]);
    return total;
}

}  // namespace

const KernelTable scalar_table{
    Isa::scalar, "scalar", dot, axpy, scale_round, abs_diff_sum, point_distance_sum,
};

}  // namespace mtc::kernels::detail
