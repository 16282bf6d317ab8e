#include "kkm/geometry.hpp"

#include "kkm/error.hpp"

#include <algorithm>

namespace kkm {

int PointConfig::index_of(int label) const
{
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    return -1;
}

PointConfig make_config(std::vector<RVec> points, std::vector<int> labels,
                        std::vector<std::string> names)
{
    require(!points.empty(), "point configuration is empty", "points");
    const std::size_t dim = points.front().dim();
    require(dim > 0, "points must have positive dimension", "points");
    for (const auto& p : points) require(p.dim() == dim, "points differ in dimension", "points");
    if (labels.empty()) {
        labels.resize(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) labels[i] = static_cast<int>(i) + 1;
    }
    require(labels.size() == points.size(), "one label per point required", "labels");
    if (names.empty()) {
        for (int l : labels) names.push_back(std::to_string(l));
    }
    require(names.size() == points.size(), "one name per point required", "names");
    {
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                "point labels must be distinct", "labels");
    }
    PointConfig cfg;
    cfg.center = centroid(points);
    cfg.points = std::move(points);
    cfg.labels = std::move(labels);
    cfg.names = std::move(names);
    return cfg;
}

std::optional<std::vector<Rational>> nonnegative_solution(const Matrix<Rational>& a,
                                                          const std::vector<Rational>& b)
{
    const std::size_t m = a.rows();
    const std::size_t k = a.cols();
    require(b.size() == m, "right-hand side size mismatch");

    // Tableau columns: k originals, m artificials, rhs.
    const std::size_t width = k + m + 1;
    const std::size_t rhs = k + m;
    Matrix<Rational> t(m + 1, width);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const bool flip = b[i] < 0;
        for (std::size_t j = 0; j < k; ++j) t(i, j) = flip ? Rational(-a(i, j)) : a(i, j);
        t(i, k + i) = 1;
        t(i, rhs) = flip ? Rational(-b[i]) : b[i];
        basis[i] = k + i;
    }
    // Phase-I objective: minimise the artificial sum; row m holds reduced costs.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) t(m, j) -= t(i, j);
        t(m, rhs) -= t(i, rhs);
    }

    for (;;) {
        std::size_t enter = width;
        for (std::size_t j = 0; j < k + m; ++j) {
            if (t(m, j) < 0) {
                enter = j;
                break;
            }
        }
        if (enter == width) break;

        std::size_t leave = m;
        Rational best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (t(i, enter) <= 0) continue;
            Rational ratio = t(i, rhs) / t(i, enter);
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) fail(ErrorCode::InternalError, "phase-I simplex reported unbounded");

        const Rational piv = t(leave, enter);
        for (std::size_t j = 0; j < width; ++j) t(leave, j) /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || t(i, enter) == 0) continue;
            const Rational f = t(i, enter);
            for (std::size_t j = 0; j < width; ++j) t(i, j) -= f * t(leave, j);
        }
        basis[leave] = enter;
    }

    if (t(m, rhs) != 0) return std::nullopt;
    std::vector<Rational> x(k);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < k) x[basis[i]] = t(i, rhs);
    return x;
}

std::optional<std::vector<Rational>> convex_combination(std::span<const RVec> points,
                                                        const RVec& target)
{
    require(!points.empty(), "convex combination of an empty point set", "points");
    const std::size_t dim = target.dim();
    for (const auto& p : points)
        require(p.dim() == dim, "dimension mismatch between points and target", "points");

    Matrix<Rational> a(dim + 1, points.size());
    std::vector<Rational> b(dim + 1);
    for (std::size_t j = 0; j < points.size(); ++j) {
        for (std::size_t r = 0; r < dim; ++r) a(r, j) = points[j][r];
        a(dim, j) = 1;
    }
    for (std::size_t r = 0; r < dim; ++r) b[r] = target[r];
    b[dim] = 1;
    return nonnegative_solution(a, b);
}

std::string_view to_string(Crossing c)
{
    switch (c) {
    case Crossing::Positive: return "+1";
    case Crossing::Negative: return "-1";
    case Crossing::None: return "0";
    case Crossing::Degenerate: return "DEGENERATE";
    }
    return "?";
}

Crossing ray_crossing_sign(std::span<const RVec> simplex, const RVec& origin,
                           const RVec& direction)
{
    const std::size_t n = origin.dim();
    require(n > 0 && simplex.size() == n, "ray crossing needs n vertices in R^n", "simplex");
    require(direction.dim() == n, "direction dimension mismatch", "direction");
    for (const auto& v : simplex) require(v.dim() == n, "vertex dimension mismatch", "simplex");

    // Solve [v_1 - o, ..., v_n - o] alpha = d; the ray crosses iff alpha > 0.
    Matrix<Rational> d(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) d(r, c) = simplex[c][r] - origin[r];
    std::vector<Rational> rhs(direction.begin(), direction.end());
    auto alpha = solve(d, rhs);
    if (!alpha) return Crossing::Degenerate;

    bool on_boundary = false;
    for (const auto& a : *alpha) {
        if (a < 0) return Crossing::None;
        if (a == 0) on_boundary = true;
    }
    if (on_boundary) return Crossing::Degenerate;
    return determinant(d) > 0 ? Crossing::Positive : Crossing::Negative;
}

bool ray_meets_hull(std::span<const RVec> points, const RVec& origin, const RVec& direction)
{
    const std::size_t n = origin.dim();
    Matrix<Rational> a(n, points.size());
    for (std::size_t c = 0; c < points.size(); ++c)
        for (std::size_t r = 0; r < n; ++r) a(r, c) = points[c][r] - origin[r];
    std::vector<Rational> b(direction.begin(), direction.end());
    return nonnegative_solution(a, b).has_value();
}

Rational det_rows(std::span<const RVec> rows)
{
    const std::size_t n = rows.size();
    Matrix<Rational> m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        require(rows[r].dim() == n, "determinant needs a square matrix");
        for (std::size_t c = 0; c < n; ++c) m(r, c) = rows[r][c];
    }
    return determinant(std::move(m));
}

std::size_t affine_rank(std::span<const RVec> points)
{
    if (points.size() <= 1) return 0;
    const std::size_t dim = points.front().dim();
    Matrix<Rational> m(points.size() - 1, dim);
    for (std::size_t r = 1; r < points.size(); ++r)
        for (std::size_t c = 0; c < dim; ++c) m(r - 1, c) = points[r][c] - points[0][c];
    return rank(std::move(m));
}

} // namespace kkm
