#include "kkm/kernels.hpp"

#include <limits>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace kkm::kernels {

// Same operation order as the scalar loop (no FMA), so results match bit for bit.
__attribute__((target("avx2"))) void max_violation_avx2(const HalfspaceView& h, const PointBatch& pts, double* out)
{
    const std::size_t n = pts.count;
    const std::size_t vec_end = n - n % 4;
    const double ninf = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < vec_end; p += 4) {
        __m256d best = _mm256_set1_pd(ninf);
        for (std::size_t r = 0; r < h.rows; ++r) {
            __m256d s = _mm256_setzero_pd();
            for (std::size_t k = 0; k < h.dim; ++k) {
                const __m256d a = _mm256_set1_pd(h.normals[r * h.dim + k]);
                const __m256d x = _mm256_loadu_pd(pts.coords + k * n + p);
                s = _mm256_add_pd(s, _mm256_mul_pd(a, x));
            }
            s = _mm256_sub_pd(s, _mm256_set1_pd(h.offsets[r]));
            // (s > best) ? s : best, keeping the scalar NaN behaviour.
            best = _mm256_blendv_pd(best, s, _mm256_cmp_pd(s, best, _CMP_GT_OQ));
        }
        _mm256_storeu_pd(out + p, best);
    }
    if (vec_end < n) {
        for (std::size_t p = vec_end; p < n; ++p) {
            double best = ninf;
            for (std::size_t r = 0; r < h.rows; ++r) {
                double s = 0.0;
                for (std::size_t k = 0; k < h.dim; ++k) s = s + h.normals[r * h.dim + k] * pts.coords[k * n + p];
                s = s - h.offsets[r];
                if (s > best) best = s;
            }
            out[p] = best;
        }
    }
}

} // namespace kkm::kernels

#else

namespace kkm::kernels {

void max_violation_avx2(const HalfspaceView& h, const PointBatch& pts, double* out) { max_violation_scalar(h, pts, out); }

} // namespace kkm::kernels

#endif
