#include <immintrin.h>

#include <cmath>

#include "tables.hpp"

namespace mtc::kernels::detail {
namespace {

// (v0 + v2) + (v1 + v3), matching the scalar reference.
inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d y0 = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        const __m256d y1 =
            _mm256_add_pd(_mm256_loadu_pd(y + i + 4), _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4)));
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_round(const double* in, double scale, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d neg_half = _mm256_set1_pd(-0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(in + i), vs);
        const __m256d t = _mm256_round_pd(x, _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
        const __m256d frac = _mm256_sub_pd(x, t);
        __m256d r = _mm256_blendv_pd(t, _mm256_add_pd(t, one), _mm256_cmp_pd(frac, half, _CMP_GE_OQ));
        r = _mm256_blendv_pd(r, _mm256_sub_pd(t, one), _mm256_cmp_pd(frac, neg_half, _CMP_LE_OQ));
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        const double x = in[i] * scale;
        const double t = std::trunc(x);
        const double frac = x - t;
        out[i] = frac >= 0.5 ? t + 1.0 : (frac <= -0.5 ? t - 1.0 : t);
    }
}

double abs_diff_sum(const double* a, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t m = n - 1;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i + 1), _mm256_loadu_pd(a + i))));
    }
    double s = hsum(acc);
    for (; i < m; ++i) s += std::fabs(a[i + 1] - a[i]);
    return s;
}

double point_distance_sum(const double* px, const double* py, const double* pz,
                          const double* qx, const double* qy, const double* qz,
                          std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(qx + i));
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(py + i), _mm256_loadu_pd(qy + i));
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(pz + i), _mm256_loadu_pd(qz + i));
        const __m256d sq = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                         _mm256_mul_pd(dz, dz));
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(sq));
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        const double dx = px[i] - qx[i], dy = py[i] - qy[i], dz = pz[i] - qz[i];
        total += std::sqrt((dx * dx + dy * dy) + dz * dz);
    }
    return total;
}

}  // namespace

const KernelTable avx2_table{
    Isa::avx2, "avx2", dot, axpy, scale_round, abs_diff_sum, point_distance_sum,
};

}  // namespace mtc::kernels::detail
