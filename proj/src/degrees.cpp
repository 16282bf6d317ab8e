#include "kkm/degrees.hpp"

#include "kkm/balanced.hpp"
#include "kkm/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace kkm {

namespace {

constexpr int kMaxRedraws = 64;

int parity_of_sort(const std::vector<int>& keys)
{
    std::vector<int> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    int sgn = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        while (order[i] != static_cast<int>(i)) {
            std::swap(order[i], order[order[i]]);
            sgn = -sgn;
        }
    }
    return sgn;
}

RVec random_direction(std::mt19937_64& rng, std::size_t dim)
{
    std::uniform_int_distribution<long> coord(-(1L << 20), 1L << 20);
    for (;;) {
        RVec d(dim);
        bool nonzero = false;
        for (std::size_t i = 0; i < dim; ++i) {
            d[i] = coord(rng);
            nonzero = nonzero || d[i] != 0;
        }
        if (nonzero) return d;
    }
}

void require_closed(const Triangulation& t)
{
    validate(t);
    if (t.dim >= 1 && !is_closed(t))
        fail(ErrorCode::InputError, "degree needs a closed triangulation", "cells");
}

} // namespace

std::uint64_t input_hash(const Triangulation& t, const Labeling& l)
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](long long v) {
        for (int b = 0; b < 8; ++b) {
            h ^= static_cast<std::uint64_t>((v >> (8 * b)) & 0xff);
            h *= 1099511628211ull;
        }
    };
    mix(t.dim);
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        for (int v : t.cells[c]) mix(v);
        mix(t.orientation[c]);
    }
    for (int a : l.labels) mix(a);
    return h;
}

DegreeReport degree_labeling(const Triangulation& t, const Labeling& l, int omitted)
{
    require_closed(t);
    validate(l, t);
    require(!l.is_signed, "degree_labeling needs an unsigned labeling", "labels");
    const int n = l.n;
    require(t.dim == n - 2, "degree_labeling needs dim(T) = n - 2", "dim");
    if (omitted == 0) omitted = n;
    require(omitted >= 1 && omitted <= n, "omitted label outside I_n", "omitted");

    const int facet_sign = ((omitted - 1) % 2 == 0) ? 1 : -1;
    DegreeReport report;
    report.regular_value = "barycenter of the facet omitting label " + std::to_string(omitted);
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        std::vector<int> labels;
        for (int v : t.cells[c]) labels.push_back(l[v]);
        std::set<int> distinct(labels.begin(), labels.end());
        if (static_cast<int>(distinct.size()) == n)
            fail(ErrorCode::FullyLabeledOnDomain, "cell " + std::to_string(c) + " carries all labels");
        if (static_cast<int>(distinct.size()) != n - 1 || distinct.count(omitted)) continue;
        const int s = t.orientation[c] * parity_of_sort(labels) * facet_sign;
        report.cells.push_back({static_cast<int>(c), s});
        report.degree += s;
    }
    return report;
}

DegreeReport pl_degree(const Triangulation& t, std::span<const RVec> images, const RVec& center,
                       std::uint64_t seed)
{
    const std::size_t n = center.dim();
    require(static_cast<std::size_t>(t.dim) + 1 == n, "image dimension must be dim(T) + 1", "dim");
    require(images.size() == t.vertices.size(), "one image per vertex required", "images");

    std::vector<std::vector<RVec>> cell_images(t.cells.size());
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        for (int v : t.cells[c]) cell_images[c].push_back(images[v]);
        if (convex_combination(cell_images[c], center))
            fail(ErrorCode::BlOnDomain, "center lies in the image of cell " + std::to_string(c));
    }

    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        const RVec dir = random_direction(rng, n);
        DegreeReport report;
        report.regular_value = "ray direction " + dir.str();
        bool degenerate = false;
        for (std::size_t c = 0; c < t.cells.size() && !degenerate; ++c) {
            Crossing x = ray_crossing_sign(cell_images[c], center, dir);
            if (x == Crossing::Degenerate) {
                // Flat or edge-on images are missed by almost every ray; only
                // a real hit forces a redraw.
                if (!ray_meets_hull(cell_images[c], center, dir)) continue;
                degenerate = true;
                break;
            }
            if (x == Crossing::None) continue;
            const int s = t.orientation[c] * (x == Crossing::Positive ? 1 : -1);
            report.cells.push_back({static_cast<int>(c), s});
            report.degree += s;
        }
        if (!degenerate) return report;
    }
    fail(ErrorCode::InternalError, "ray casting stayed degenerate after redraws");
}

DegreeReport degree_labeling_V(const Triangulation& t, const Labeling& l, const PointConfig& v)
{
    require_closed(t);
    require(l.labels.size() == t.vertices.size(), "labeling must cover every vertex", "labels");
    require(static_cast<std::size_t>(t.dim) + 1 == v.dim(), "degree needs dim(T) = n - 1 for V in R^n",
            "dim");
    std::vector<RVec> images;
    images.reserve(l.size());
    for (std::size_t u = 0; u < l.size(); ++u) {
        const int idx = v.index_of(l[u]);
        require(idx >= 0, "label " + std::to_string(l[u]) + " has no point in V", "labels");
        images.push_back(v.points[idx]);
    }
    return pl_degree(t, images, v.center, input_hash(t, l));
}

SpernerReport check_sperner(const Triangulation& t, const Labeling& l)
{
    validate(l, t);
    require(t.ambient_dim() == static_cast<std::size_t>(l.n),
            "Sperner check needs barycentric coordinates in R^n", "vertices");
    SpernerReport r;
    for (std::size_t u = 0; u < t.vertices.size(); ++u) {
        const auto s = support(t.vertices[u]);
        std::vector<int> face;
        for (int i : s) face.push_back(i + 1);
        const bool allowed = std::find(face.begin(), face.end(), l[u]) != face.end();
        if (!allowed) r.violations.push_back({static_cast<int>(u), l[u], face});
    }
    r.ok = r.violations.empty();
    return r;
}

WitnessReport find_fully_labeled(const Triangulation& t, const Labeling& l)
{
    validate(t);
    validate(l, t);
    WitnessReport r;
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        std::set<int> labels;
        for (int v : t.cells[c]) labels.insert(l[v]);
        if (static_cast<int>(labels.size()) == l.n) r.cells.push_back(static_cast<int>(c));
    }
    if (t.dim == l.n - 1 && t.dim >= 1 && !l.is_signed) {
        Triangulation b = boundary(t);
        if (!b.cells.empty()) {
            try {
                r.boundary_degree = degree_labeling(b, l).degree;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::FullyLabeledOnDomain) throw;
            }
        }
    }
    if (r.boundary_degree && r.cells.size() < static_cast<std::size_t>(std::abs(*r.boundary_degree)))
        fail(ErrorCode::InternalError, "fewer fully labeled cells than the boundary degree");
    return r;
}

WitnessReport find_bl_simplices(const Triangulation& t, const Labeling& l, const PointConfig& v)
{
    validate(t);
    require(l.labels.size() == t.vertices.size(), "labeling must cover every vertex", "labels");
    std::map<std::vector<int>, bool> cache;
    auto balanced = [&](std::vector<int> labels) {
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        auto it = cache.find(labels);
        if (it != cache.end()) return it->second;
        const bool b = is_balanced(labels, v).has_value();
        cache.emplace(std::move(labels), b);
        return b;
    };

    WitnessReport r;
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        std::vector<int> labels;
        for (int u : t.cells[c]) labels.push_back(l[u]);
        if (balanced(std::move(labels))) r.cells.push_back(static_cast<int>(c));
    }
    if (static_cast<std::size_t>(t.dim) == v.dim() && t.dim >= 1) {
        Triangulation b = boundary(t);
        if (!b.cells.empty()) {
            try {
                r.boundary_degree = degree_labeling_V(b, l, v).degree;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::BlOnDomain) throw;
            }
        }
    }
    if (r.boundary_degree && r.cells.size() < static_cast<std::size_t>(std::abs(*r.boundary_degree)))
        fail(ErrorCode::InternalError, "fewer BL cells than the boundary degree");
    return r;
}

ComplementaryReport find_complementary_edges(const Triangulation& t, const Labeling& l)
{
    validate(t);
    validate(l, t);
    require(l.is_signed, "complementary edges need a signed labeling", "labels");

    std::set<std::pair<int, int>> boundary_edges;
    std::vector<bool> on_boundary(t.vertices.size(), false);
    Triangulation b;
    if (t.dim >= 1) {
        b = boundary(t);
        for (const auto& [u, w] : edges(b)) boundary_edges.emplace(u, w);
        for (const auto& cell : b.cells)
            for (int u : cell) on_boundary[u] = true;
    }

    ComplementaryReport r;
    bool boundary_complementary = false;
    for (const auto& [u, w] : edges(t)) {
        if (l[u] != -l[w]) continue;
        const bool internal = !boundary_edges.count({u, w});
        boundary_complementary = boundary_complementary || !internal;
        r.edges.push_back({u, w, internal});
    }

    if (!b.cells.empty()) {
        const auto anti = antipodes(t);
        r.antipodal_boundary = true;
        for (std::size_t u = 0; u < t.vertices.size() && r.antipodal_boundary; ++u) {
            if (!on_boundary[u]) continue;
            if (anti[u] < 0 || !on_boundary[anti[u]] || l[anti[u]] != -l[u]) r.antipodal_boundary = false;
        }
    }

    if (r.antipodal_boundary && !boundary_complementary && t.dim == l.n) {
        const int deg = degree_labeling_V(b, l, tucker_config(l.n)).degree;
        r.boundary_degree = deg;
        std::size_t internal = 0;
        for (const auto& e : r.edges) internal += e.internal;
        if (deg % 2 == 0 || internal < static_cast<std::size_t>(std::abs(deg)))
            fail(ErrorCode::InternalError, "antipodal boundary degree guarantee violated");
    }
    return r;
}

} // namespace kkm
