#pragma once

// Test-only helpers: random generators and independent oracles.

#include "kkm/complexes.hpp"
#include "kkm/linalg.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace kkm::testing {

inline Triangulation cycle(int length)
{
    Triangulation t;
    t.dim = 1;
    for (int i = 0; i < length; ++i) t.vertices.push_back(RVec{Rational(i)});
    for (int i = 0; i < length; ++i) {
        t.cells.push_back({i, (i + 1) % length});
        t.orientation.push_back(1);
    }
    return t;
}

inline Labeling cyclic_labeling(const std::vector<int>& labels, int n)
{
    return Labeling{labels, n, false};
}

inline Labeling random_labeling(std::mt19937_64& rng, std::size_t vertices, int n)
{
    std::uniform_int_distribution<int> pick(1, n);
    Labeling l{std::vector<int>(vertices), n, false};
    for (auto& a : l.labels) a = pick(rng);
    return l;
}

/// Winding number of the closed PL path through the corners of an
/// equilateral triangle (label 1, 2, 3 counterclockwise) around its center.
inline int winding_number(const std::vector<int>& labels)
{
    auto corner = [](int l) {
        const double a = 2.0 * std::numbers::pi * (l - 1) / 3.0;
        return std::pair{std::cos(a), std::sin(a)};
    };
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [x0, y0] = corner(labels[i]);
        auto [x1, y1] = corner(labels[(i + 1) % labels.size()]);
        total += std::atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Exact solution of an overdetermined consistent system with independent
/// columns, by row reduction; absent if inconsistent or rank deficient.
inline std::optional<std::vector<Rational>> exact_least_system(Matrix<Rational> a, std::vector<Rational> b)
{
    const std::size_t rows = a.rows(), cols = a.cols();
    std::size_t r = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t p = r;
        while (p < rows && a(p, c) == 0) ++p;
        if (p == rows) return std::nullopt;
        a.swap_rows(p, r);
        std::swap(b[p], b[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a(i, c) == 0) continue;
            Rational f = a(i, c) / a(r, c);
            for (std::size_t j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
            b[i] -= f * b[r];
        }
        pivots.push_back(r);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> x(cols);
    for (std::size_t c = 0; c < cols; ++c) x[c] = b[c] / a(c, c);
    return x;
}

/// Caratheodory oracle: target in conv(points) iff some affinely
/// independent subset of size <= dim+1 contains it with nonnegative weights.
inline bool caratheodory_contains(const std::vector<RVec>& points, const RVec& target)
{
    const std::size_t d = target.dim();
    const std::size_t m = points.size();
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        if (idx.size() > d + 1) continue;
        Matrix<Rational> a(d + 1, idx.size());
        std::vector<Rational> b(d + 1);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            for (std::size_t r = 0; r < d; ++r) a(r, j) = points[idx[j]][r];
            a(d, j) = 1;
        }
        for (std::size_t r = 0; r < d; ++r) b[r] = target[r];
        b[d] = 1;
        auto x = exact_least_system(a, b);
        if (!x) continue;
        bool nonneg = true;
        for (const auto& v : *x) nonneg = nonneg && v >= 0;
        if (nonneg) return true;
    }
    return false;
}

inline RVec random_rvec(std::mt19937_64& rng, std::size_t dim, int range = 5, int den = 3)
{
    std::uniform_int_distribution<int> pick(-range * den, range * den);
    RVec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = Rational(pick(rng), den);
    return v;
}

} // namespace kkm::testing

namespace kkm::testing {

/// Vertex sequence of an oriented closed 1-cycle, following orientation.
inline std::vector<int> cycle_order(const Triangulation& b)
{
    std::vector<std::pair<int, int>> next;
    std::map<int, int> succ;
    for (std::size_t c = 0; c < b.cells.size(); ++c) {
        int from = b.cells[c][0], to = b.cells[c][1];
        if (b.orientation[c] < 0) std::swap(from, to);
        succ[from] = to;
    }
    std::vector<int> order;
    const int start = succ.begin()->first;
    int cur = start;
    do {
        order.push_back(cur);
        cur = succ.at(cur);
    } while (cur != start);
    return order;
}

/// Random signed labeling of a centrally symmetric triangulation that is
/// antipodal on the boundary and has no complementary boundary edge.
inline Labeling random_antipodal_labeling(std::mt19937_64& rng, const Triangulation& t, int n)
{
    const Triangulation b = boundary(t);
    std::vector<bool> on_boundary(t.vertices.size(), false);
    std::vector<std::vector<int>> nbrs(t.vertices.size());
    for (const auto& cell : b.cells)
        for (int u : cell) {
            on_boundary[u] = true;
            for (int w : cell)
                if (w != u) nbrs[u].push_back(w);
        }
    const auto anti = antipodes(t);
    std::uniform_int_distribution<int> mag(1, n), sgn(0, 1);
    auto draw = [&] { return mag(rng) * (sgn(rng) ? 1 : -1); };

    for (;;) {
        Labeling l{std::vector<int>(t.vertices.size(), 0), n, true};
        bool ok = true;
        for (std::size_t u = 0; u < t.vertices.size() && ok; ++u) {
            if (!on_boundary[u] || l.labels[u] != 0) continue;
            std::vector<int> allowed;
            for (int a = -n; a <= n; ++a) {
                if (a == 0) continue;
                bool fine = true;
                for (int w : nbrs[u])
                    if (l.labels[w] == -a) fine = false;
                for (int w : nbrs[anti[u]])
                    if (l.labels[w] == a) fine = false;
                if (anti[u] == static_cast<int>(u)) fine = false;
                if (fine) allowed.push_back(a);
            }
            if (allowed.empty()) {
                ok = false;
                break;
            }
            std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
            const int a = allowed[pick(rng)];
            l.labels[u] = a;
            l.labels[anti[u]] = -a;
        }
        if (!ok) continue;
        for (std::size_t u = 0; u < t.vertices.size(); ++u)
            if (!on_boundary[u]) l.labels[u] = draw();
        return l;
    }
}

/// Winding number around the origin of the closed PL path through `points`.
inline int winding_number_2d(const std::vector<std::pair<double, double>>& pts)
{
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto [x0, y0] = pts[i];
        auto [x1, y1] = pts[(i + 1) % pts.size()];
        total += std::atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Disk kuhn_triangulation(3, k) whose boundary labels wind three times
/// around the label triangle; interior labels random.
inline Labeling winding_three_labeling(std::mt19937_64& rng, const Triangulation& disk)
{
    const auto order = cycle_order(boundary(disk));
    Labeling l = random_labeling(rng, disk.vertices.size(), 3);
    const std::size_t len = order.size();
    for (std::size_t i = 0; i < len; ++i) l.labels[order[i]] = static_cast<int>((9 * i / len) % 3) + 1;
    return l;
}

} // namespace kkm::testing
