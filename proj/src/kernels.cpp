#include "kkm/kernels.hpp"

#include <cstdlib>
#include <limits>

namespace kkm::kernels {

void max_violation_scalar(const HalfspaceView& h, const PointBatch& pts, double* out)
{
    for (std::size_t p = 0; p < pts.count; ++p) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < h.rows; ++r) {
            double s = 0.0;
            for (std::size_t k = 0; k < h.dim; ++k) s = s + h.normals[r * h.dim + k] * pts.coords[k * pts.count + p];
            s = s - h.offsets[r];
            if (s > best) best = s;
        }
        out[p] = best;
    }
}

bool cpu_has_avx2()
{
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

MaxViolationFn select()
{
    if (std::getenv("KKM_FORCE_SCALAR") == nullptr && cpu_has_avx2()) return max_violation_avx2;
    return max_violation_scalar;
}

MaxViolationFn dispatched()
{
    static const MaxViolationFn fn = select();
    return fn;
}

} // namespace

void max_violation(const HalfspaceView& h, const PointBatch& pts, double* out) { dispatched()(h, pts, out); }

std::string_view active_isa() { return dispatched() == max_violation_avx2 ? "avx2" : "scalar"; }

} // namespace kkm::kernels
