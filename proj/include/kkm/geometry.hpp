#pragma once

#include "kkm/linalg.hpp"
#include "kkm/rational.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kkm {

/// A labelled point configuration V with its exact center of mass c_V.
/// `labels[i]` is the label that selects `points[i]`; `names` are display
/// names (face subsets for KKMS configurations).
struct PointConfig {
    std::vector<RVec> points;
    std::vector<int> labels;
    std::vector<std::string> names;
    RVec center;

    std::size_t size() const noexcept { return points.size(); }
    std::size_t dim() const noexcept { return points.empty() ? 0 : points.front().dim(); }
    /// Index of the point carrying `label`, or -1.
    int index_of(int label) const;
};

/// Builds a configuration with labels 1..m and computes the center.
PointConfig make_config(std::vector<RVec> points, std::vector<int> labels = {},
                        std::vector<std::string> names = {});

/// Nonnegative solution of `a x = b` by exact Phase-I simplex with Bland's
/// rule; absent when infeasible.
std::optional<std::vector<Rational>> nonnegative_solution(const Matrix<Rational>& a,
                                                          const std::vector<Rational>& b);

/// Coefficients lambda >= 0 summing to one with sum lambda_i p_i == target,
/// or absent when target lies outside conv(points).
std::optional<std::vector<Rational>> convex_combination(std::span<const RVec> points,
                                                        const RVec& target);

enum class Crossing { Positive, Negative, None, Degenerate };

std::string_view to_string(Crossing c);

/// Whether the open ray origin + t*direction (t > 0) crosses the relative
/// interior of the (n-1)-simplex spanned by n points of R^n.  The sign is the
/// sign of det[v_1 - origin, ..., v_n - origin] in listed order.  Boundary
/// hits, parallel incidence and affinely dependent vertices all yield
/// Degenerate.
Crossing ray_crossing_sign(std::span<const RVec> simplex, const RVec& origin,
                           const RVec& direction);

/// True when the closed ray meets conv(points) (exact cone membership).
bool ray_meets_hull(std::span<const RVec> points, const RVec& origin, const RVec& direction);

/// Exact determinant of the square matrix whose rows are `rows`.
Rational det_rows(std::span<const RVec> rows);

/// Affine dimension of a point set.
std::size_t affine_rank(std::span<const RVec> points);

} // namespace kkm
