#pragma once

#include <cstddef>
#include <string_view>

namespace kkm::kernels {

/// Row-major halfspace system {x : normals[r] . x <= offsets[r]}.
struct HalfspaceView {
    const double* normals = nullptr;
    const double* offsets = nullptr;
    std::size_t rows = 0;
    std::size_t dim = 0;
};

/// Points stored coordinate-major: coordinate k of point p is at
/// coords[k * count + p].
struct PointBatch {
    const double* coords = nullptr;
    std::size_t count = 0;
};

/// out[p] = max_r (normals[r] . x_p - offsets[r]); -inf when rows == 0.
/// A point lies in the polytope iff its value is <= 0.
using MaxViolationFn = void (*)(const HalfspaceView&, const PointBatch&, double* out);

void max_violation_scalar(const HalfspaceView& h, const PointBatch& pts, double* out);
void max_violation_avx2(const HalfspaceView& h, const PointBatch& pts, double* out);

bool cpu_has_avx2();

/// Dispatches once per process.  Setting KKM_FORCE_SCALAR in the environment
/// pins the reference implementation.
void max_violation(const HalfspaceView& h, const PointBatch& pts, double* out);
std::string_view active_isa();

} // namespace kkm::kernels
