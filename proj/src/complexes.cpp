#include "kkm/complexes.hpp"

#include "kkm/error.hpp"
#include "kkm/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace kkm {

namespace {

int permutation_parity(std::vector<int> p)
{
    int sgn = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (p[i] != static_cast<int>(i)) {
            std::swap(p[i], p[p[i]]);
            sgn = -sgn;
        }
    }
    return sgn;
}

// Parity of the permutation that sorts `cell` ascending.
int sort_parity(const Cell& cell)
{
    std::vector<int> order(cell.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return cell[a] < cell[b]; });
    return permutation_parity(order);
}

Cell sorted(Cell c)
{
    std::sort(c.begin(), c.end());
    return c;
}

struct FacetUse {
    Cell listed;
    int sign;
};

std::map<Cell, std::vector<FacetUse>> facet_uses(const Triangulation& t)
{
    std::map<Cell, std::vector<FacetUse>> uses;
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        const Cell& cell = t.cells[c];
        for (std::size_t j = 0; j < cell.size(); ++j) {
            Cell facet;
            facet.reserve(cell.size() - 1);
            for (std::size_t i = 0; i < cell.size(); ++i)
                if (i != j) facet.push_back(cell[i]);
            const int sgn = t.orientation[c] * ((j % 2 == 0) ? 1 : -1);
            uses[sorted(facet)].push_back({std::move(facet), sgn});
        }
    }
    return uses;
}

} // namespace

std::vector<RVec> Triangulation::cell_points(std::size_t c) const
{
    std::vector<RVec> pts;
    pts.reserve(cells[c].size());
    for (int v : cells[c]) pts.push_back(vertices[v]);
    return pts;
}

int orientation_sign(std::span<const RVec> vertices)
{
    if (vertices.empty()) return 0;
    const std::size_t ambient = vertices.front().dim();
    if (vertices.size() == ambient) return sign(det_rows(vertices));
    if (vertices.size() == ambient + 1) {
        std::vector<RVec> rows;
        for (std::size_t i = 1; i < vertices.size(); ++i) rows.push_back(vertices[i] - vertices[0]);
        return sign(det_rows(rows));
    }
    return 0;
}

void validate(const Triangulation& t)
{
    require(t.dim >= 0, "negative triangulation dimension", "dim");
    require(t.orientation.size() == t.cells.size(), "one orientation per cell required",
            "orientation");
    const std::size_t ambient = t.ambient_dim();
    for (const auto& v : t.vertices)
        require(v.dim() == ambient, "vertex coordinates differ in dimension", "vertices");
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        const Cell& cell = t.cells[c];
        require(cell.size() == static_cast<std::size_t>(t.dim) + 1,
                "cell " + std::to_string(c) + " does not have dim+1 vertices", "cells");
        for (int v : cell)
            require(v >= 0 && static_cast<std::size_t>(v) < t.vertices.size(),
                    "cell " + std::to_string(c) + " references a missing vertex", "cells");
        require(std::set<int>(cell.begin(), cell.end()).size() == cell.size(),
                "cell " + std::to_string(c) + " repeats a vertex", "cells");
        require(t.orientation[c] == 1 || t.orientation[c] == -1, "orientation must be +-1",
                "orientation");
    }
}

void validate(const Labeling& l, const Triangulation& t)
{
    require(l.labels.size() == t.vertices.size(), "labeling must cover every vertex", "labels");
    require(l.n >= 1, "label universe must be nonempty", "n");
    for (std::size_t v = 0; v < l.labels.size(); ++v) {
        const int a = l.labels[v];
        const bool ok = l.is_signed ? (a != 0 && std::abs(a) <= l.n) : (a >= 1 && a <= l.n);
        require(ok, "vertex " + std::to_string(v) + " has label outside the universe", "labels");
    }
}

Triangulation edgewise_subdivision(std::span<const RVec> corners, int k)
{
    require(!corners.empty(), "subdivision needs at least one corner");
    require(k >= 1, "resolution must be positive", "k");
    const int d = static_cast<int>(corners.size()) - 1;
    const std::size_t ambient = corners.front().dim();

    Triangulation t;
    t.dim = d;
    std::map<std::vector<int>, int> index;
    auto vertex_of = [&](const std::vector<int>& y) {
        // Partial sums y -> barycentric lattice weights a.
        std::vector<int> a(d + 1);
        if (d == 0) {
            a[0] = k;
        } else {
            a[0] = y[0];
            for (int i = 1; i < d; ++i) a[i] = y[i] - y[i - 1];
            a[d] = k - y[d - 1];
        }
        auto [it, inserted] = index.emplace(a, static_cast<int>(t.vertices.size()));
        if (inserted) {
            RVec p(ambient);
            for (int i = 0; i <= d; ++i)
                if (a[i] != 0) p += corners[i] * Rational(a[i], k);
            t.vertices.push_back(std::move(p));
        }
        return it->second;
    };

    if (d == 0) {
        t.cells.push_back({vertex_of({})});
        t.orientation.push_back(1);
        return t;
    }

    std::vector<int> base(d, 0);
    std::vector<int> perm(d);
    for (;;) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<std::vector<int>> ys{base};
            for (int s = 0; s < d; ++s) {
                auto y = ys.back();
                ++y[perm[s]];
                ys.push_back(std::move(y));
            }
            const bool inside = std::all_of(ys.begin(), ys.end(), [&](const std::vector<int>& y) {
                if (y[0] < 0 || y[d - 1] > k) return false;
                for (int i = 1; i < d; ++i)
                    if (y[i] < y[i - 1]) return false;
                return true;
            });
            if (inside) {
                Cell cell;
                for (const auto& y : ys) cell.push_back(vertex_of(y));
                std::vector<RVec> pts;
                for (int v : cell) pts.push_back(t.vertices[v]);
                int o = orientation_sign(pts);
                t.cells.push_back(std::move(cell));
                t.orientation.push_back(o == 0 ? 1 : o);
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        int i = 0;
        while (i < d && ++base[i] == k) base[i++] = 0;
        if (i == d) break;
    }
    return t;
}

Triangulation kuhn_triangulation(int n, int k)
{
    require(n >= 2, "kuhn_triangulation needs n >= 2", "n");
    require(k >= 1, "kuhn_triangulation needs k >= 1", "k");
    std::vector<RVec> corners;
    for (int i = 0; i < n; ++i) corners.push_back(unit_vector(n, i));
    return edgewise_subdivision(corners, k);
}

Triangulation boundary(const Triangulation& t)
{
    require(t.dim >= 1, "boundary needs dim >= 1", "dim");
    const auto uses = facet_uses(t);
    for (const auto& [key, u] : uses)
        if (u.size() > 2) fail(ErrorCode::StructuralError, "non-manifold facet in " +
                                                               std::to_string(u.size()) + " cells");

    Triangulation b;
    b.dim = t.dim - 1;
    b.vertices = t.vertices;
    // Emit in cell order so the result is deterministic.
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        const Cell& cell = t.cells[c];
        for (std::size_t j = 0; j < cell.size(); ++j) {
            Cell facet;
            for (std::size_t i = 0; i < cell.size(); ++i)
                if (i != j) facet.push_back(cell[i]);
            if (uses.at(sorted(facet)).size() != 1) continue;
            b.orientation.push_back(t.orientation[c] * ((j % 2 == 0) ? 1 : -1));
            b.cells.push_back(std::move(facet));
        }
    }
    return b;
}

Triangulation antipodal_ball_triangulation(int n, int k)
{
    require(n >= 1, "ball dimension must be positive", "n");
    require(k >= 1, "ball resolution must be positive", "k");
    Triangulation t;
    t.dim = n;

    std::vector<int> strides(n);
    int total = 1;
    for (int i = 0; i < n; ++i) {
        strides[i] = total;
        total *= k + 1;
    }
    t.vertices.reserve(total);
    for (int idx = 0; idx < total; ++idx) {
        RVec p(n);
        int rest = idx;
        for (int i = 0; i < n; ++i) {
            p[i] = Rational(2 * (rest % (k + 1)) - k, k);
            rest /= k + 1;
        }
        t.vertices.push_back(std::move(p));
    }

    std::vector<int> base(n, 0), perm(n);
    for (;;) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
            int idx = 0;
            for (int i = 0; i < n; ++i) idx += base[i] * strides[i];
            Cell cell{idx};
            for (int s = 0; s < n; ++s) {
                idx += strides[perm[s]];
                cell.push_back(idx);
            }
            std::vector<RVec> pts;
            for (int v : cell) pts.push_back(t.vertices[v]);
            t.orientation.push_back(orientation_sign(pts));
            t.cells.push_back(std::move(cell));
        } while (std::next_permutation(perm.begin(), perm.end()));
        int i = 0;
        while (i < n && ++base[i] == k) base[i++] = 0;
        if (i == n) break;
    }
    return t;
}

Triangulation barycentric_subdivision(const Triangulation& t)
{
    Triangulation r;
    r.dim = t.dim;
    std::map<Cell, int> index;
    // Original vertices keep their indices so labelings restrict naturally.
    r.vertices = t.vertices;
    for (std::size_t v = 0; v < t.vertices.size(); ++v) index[{static_cast<int>(v)}] = static_cast<int>(v);

    auto face_vertex = [&](Cell face) {
        std::sort(face.begin(), face.end());
        auto it = index.find(face);
        if (it != index.end()) return it->second;
        std::vector<RVec> pts;
        for (int v : face) pts.push_back(t.vertices[v]);
        const int id = static_cast<int>(r.vertices.size());
        r.vertices.push_back(centroid(pts));
        index.emplace(std::move(face), id);
        return id;
    };

    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        const Cell& cell = t.cells[c];
        std::vector<int> perm(cell.size());
        std::iota(perm.begin(), perm.end(), 0);
        do {
            Cell child;
            Cell face;
            for (int p : perm) {
                face.push_back(cell[p]);
                child.push_back(face_vertex(face));
            }
            r.cells.push_back(std::move(child));
            r.orientation.push_back(t.orientation[c] * permutation_parity(perm));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return r;
}

Triangulation reversed(const Triangulation& t)
{
    Triangulation r = t;
    for (int& o : r.orientation) o = -o;
    return r;
}

std::vector<Cell> incoherent_facets(const Triangulation& t)
{
    std::vector<Cell> bad;
    for (const auto& [key, uses] : facet_uses(t)) {
        if (uses.size() != 2) continue;
        const int a = uses[0].sign * sort_parity(uses[0].listed);
        const int b = uses[1].sign * sort_parity(uses[1].listed);
        if (a == b) bad.push_back(key);
    }
    return bad;
}

bool is_closed(const Triangulation& t)
{
    if (t.dim < 1) return t.cells.empty();
    for (const auto& [key, uses] : facet_uses(t))
        if (uses.size() != 2) return false;
    return true;
}

std::vector<std::pair<int, int>> edges(const Triangulation& t)
{
    std::set<std::pair<int, int>> out;
    for (const auto& cell : t.cells)
        for (std::size_t i = 0; i < cell.size(); ++i)
            for (std::size_t j = i + 1; j < cell.size(); ++j)
                out.emplace(std::min(cell[i], cell[j]), std::max(cell[i], cell[j]));
    return {out.begin(), out.end()};
}

std::vector<int> antipodes(const Triangulation& t)
{
    std::map<RVec, int> where;
    for (std::size_t v = 0; v < t.vertices.size(); ++v) where.emplace(t.vertices[v], static_cast<int>(v));
    std::vector<int> out(t.vertices.size(), -1);
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        auto it = where.find(t.vertices[v] * Rational(-1));
        if (it != where.end()) out[v] = it->second;
    }
    return out;
}

std::vector<int> support(const RVec& x)
{
    std::vector<int> s;
    for (std::size_t i = 0; i < x.dim(); ++i)
        if (x[i] != 0) s.push_back(static_cast<int>(i));
    return s;
}

Labeling canonical_sperner_labeling(const Triangulation& t, int n)
{
    require(t.ambient_dim() == static_cast<std::size_t>(n),
            "Sperner labeling needs barycentric coordinates in R^n", "vertices");
    Labeling l;
    l.n = n;
    for (const auto& v : t.vertices) {
        auto s = support(v);
        require(!s.empty(), "vertex outside the simplex", "vertices");
        l.labels.push_back(s.front() + 1);
    }
    return l;
}

namespace {

// Pulling triangulation of the face spanned by `face` (vertex ids) of
// affine dimension `dim`.
void pull(const std::vector<RVec>& verts, const std::vector<LinearConstraint>& cons,
          const std::vector<int>& face, int dim, std::vector<Cell>& out, Cell prefix)
{
    if (dim == 0) {
        prefix.push_back(face.front());
        out.push_back(std::move(prefix));
        return;
    }
    const int apex = face.front();
    std::set<std::vector<int>> facets;
    for (const auto& c : cons) {
        std::vector<int> tight;
        for (int v : face)
            if (c.normal.dot(verts[v]) == c.offset) tight.push_back(v);
        if (tight.size() == face.size() || tight.empty()) continue;
        std::vector<RVec> pts;
        for (int v : tight) pts.push_back(verts[v]);
        if (static_cast<int>(affine_rank(pts)) == dim - 1) facets.insert(tight);
    }
    prefix.push_back(apex);
    for (const auto& f : facets) {
        if (std::find(f.begin(), f.end(), apex) != f.end()) continue;
        pull(verts, cons, f, dim - 1, out, prefix);
    }
}

} // namespace

Triangulation triangulate_simplex_region(int n, std::span<const LinearConstraint> constraints)
{
    require(n >= 2, "region needs n >= 2", "n");
    std::vector<LinearConstraint> cons;
    for (int i = 0; i < n; ++i) cons.push_back({unit_vector(n, i) * Rational(-1), Rational(0)});
    for (const auto& c : constraints) {
        require(c.normal.dim() == static_cast<std::size_t>(n), "constraint dimension mismatch",
                "constraints");
        cons.push_back(c);
    }

    // Vertices: points of the hyperplane sum x = 1 with n-1 independent tight
    // constraints, satisfying all others.
    std::vector<RVec> verts;
    const int m = static_cast<int>(cons.size());
    std::vector<bool> mask(m, false);
    std::fill(mask.begin(), mask.begin() + (n - 1), true);
    do {
        Matrix<Rational> a(n, n);
        std::vector<Rational> b(n);
        for (int c = 0; c < n; ++c) a(0, c) = 1;
        b[0] = 1;
        int row = 1;
        for (int i = 0; i < m; ++i) {
            if (!mask[i]) continue;
            for (int c = 0; c < n; ++c) a(row, c) = cons[i].normal[c];
            b[row] = cons[i].offset;
            ++row;
        }
        auto x = solve(a, b);
        if (!x) continue;
        RVec p(std::move(*x));
        bool feasible = std::all_of(cons.begin(), cons.end(),
                                    [&](const LinearConstraint& c) { return c.normal.dot(p) <= c.offset; });
        if (feasible && std::find(verts.begin(), verts.end(), p) == verts.end()) verts.push_back(p);
    } while (std::prev_permutation(mask.begin(), mask.end()));

    if (verts.empty() || static_cast<int>(affine_rank(verts)) != n - 1)
        fail(ErrorCode::EmptyDomain, "constrained price region is empty or not full-dimensional");
    std::sort(verts.begin(), verts.end());

    std::vector<int> all(verts.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<Cell> cells;
    pull(verts, cons, all, n - 1, cells, {});

    Triangulation t;
    t.dim = n - 1;
    t.vertices = std::move(verts);
    for (auto& cell : cells) {
        std::vector<RVec> pts;
        for (int v : cell) pts.push_back(t.vertices[v]);
        const int o = orientation_sign(pts);
        if (o == 0) continue;
        t.orientation.push_back(o);
        t.cells.push_back(std::move(cell));
    }
    return t;
}

} // namespace kkm
