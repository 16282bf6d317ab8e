#include "doctest.h"

#include "kkm/complexes.hpp"
#include "kkm/error.hpp"
#include "kkm/geometry.hpp"

#include <map>
#include <set>

using namespace kkm;

namespace {

Rational abs_volume(const Triangulation& t, std::size_t c)
{
    Rational d = det_rows(t.cell_points(c));
    return d < 0 ? Rational(-d) : d;
}

// Follows the oriented 1-cycle; returns the number of edges visited before
// returning to the start, or -1 if the traversal breaks.
int cycle_length(const Triangulation& b)
{
    std::map<int, int> next;
    for (std::size_t c = 0; c < b.cells.size(); ++c) {
        int from = b.cells[c][0], to = b.cells[c][1];
        if (b.orientation[c] < 0) std::swap(from, to);
        if (next.count(from)) return -1;
        next[from] = to;
    }
    const int start = next.begin()->first;
    int cur = start, steps = 0;
    do {
        auto it = next.find(cur);
        if (it == next.end()) return -1;
        cur = it->second;
        ++steps;
    } while (cur != start && steps <= static_cast<int>(next.size()));
    return steps;
}

// Independent count of Kuhn cells: monotone lattice chains from a base point,
// enumerated directly on barycentric weight vectors.
long count_kuhn_cells(int n, int k)
{
    long count = 0;
    std::vector<int> y(n - 1, 0);
    std::vector<int> perm(n - 1);
    for (;;) {
        for (int i = 0; i < n - 1; ++i) perm[i] = i;
        do {
            auto cur = y;
            bool ok = true;
            auto inside = [&](const std::vector<int>& p) {
                for (int i = 0; i + 1 < n - 1; ++i)
                    if (p[i] > p[i + 1]) return false;
                return p.front() >= 0 && p.back() <= k;
            };
            ok = inside(cur);
            for (int s = 0; s < n - 1 && ok; ++s) {
                ++cur[perm[s]];
                ok = inside(cur);
            }
            count += ok;
        } while (std::next_permutation(perm.begin(), perm.end()));
        int i = 0;
        while (i < n - 1 && ++y[i] == k) y[i++] = 0;
        if (i == n - 1) break;
    }
    return count;
}

} // namespace

TEST_CASE("kuhn_triangulation sizes")
{
    auto seg = kuhn_triangulation(2, 3);
    CHECK(seg.vertices.size() == 4);
    CHECK(seg.cells.size() == 3);
    auto tri = kuhn_triangulation(3, 2);
    CHECK(tri.vertices.size() == 6);
    CHECK(tri.cells.size() == 4);
    auto tet = kuhn_triangulation(4, 3);
    CHECK(tet.cells.size() == 27);
    CHECK(count_kuhn_cells(4, 3) == 27);
    for (int n = 2; n <= 4; ++n)
        for (int k = 1; k <= 4; ++k) CHECK(kuhn_triangulation(n, k).cells.size() == count_kuhn_cells(n, k));
}

TEST_CASE("kuhn cells have equal volume summing to the simplex")
{
    for (int n = 2; n <= 4; ++n) {
        for (int k = 1; k <= 4; ++k) {
            auto t = kuhn_triangulation(n, k);
            Rational total = 0;
            const Rational first = abs_volume(t, 0);
            for (std::size_t c = 0; c < t.cells.size(); ++c) {
                CHECK(abs_volume(t, c) == first);
                total += abs_volume(t, c);
            }
            CHECK(total == 1);
            CHECK(incoherent_facets(t).empty());
        }
    }
}

TEST_CASE("boundary of kuhn triangulations")
{
    auto b1 = boundary(kuhn_triangulation(3, 1));
    CHECK(b1.cells.size() == 3);
    CHECK(cycle_length(b1) == 3);
    auto b4 = boundary(kuhn_triangulation(3, 4));
    CHECK(b4.cells.size() == 12);
    CHECK(cycle_length(b4) == 12);
    CHECK(is_closed(b4));
    CHECK(boundary(b4).cells.empty());
    auto b3 = boundary(kuhn_triangulation(4, 3));
    CHECK(is_closed(b3));
    CHECK(incoherent_facets(b3).empty());
    CHECK(boundary(b3).cells.empty());
}

TEST_CASE("boundary rejects non-manifold input")
{
    Triangulation t;
    t.dim = 2;
    t.vertices = {RVec{rat(0)}, RVec{rat(1)}, RVec{rat(2)}, RVec{rat(3)}, RVec{rat(4)}};
    // Three triangles sharing the edge {0, 1}.
    t.cells = {{0, 1, 2}, {0, 1, 3}, {1, 0, 4}};
    t.orientation = {1, 1, 1};
    CHECK_THROWS_AS(boundary(t), Error);
}

TEST_CASE("antipodal ball triangulation")
{
    auto seg = antipodal_ball_triangulation(1, 2);
    CHECK(seg.vertices.size() == 3);
    auto segb = boundary(seg);
    CHECK(segb.cells.size() == 2);
    std::set<RVec> ends;
    for (const auto& c : segb.cells) ends.insert(seg.vertices[c[0]]);
    CHECK(ends == std::set<RVec>{RVec{rat(-1)}, RVec{rat(1)}});

    for (int k : {1, 2, 3, 4}) {
        auto disk = antipodal_ball_triangulation(2, k);
        auto b = boundary(disk);
        CHECK(b.cells.size() == static_cast<std::size_t>(4 * k));
        CHECK(cycle_length(b) == 4 * k);
        CHECK(incoherent_facets(disk).empty());
    }

    for (int n = 1; n <= 3; ++n) {
        auto ball = antipodal_ball_triangulation(n, 2);
        const auto anti = antipodes(ball);
        std::set<std::vector<int>> cells;
        for (auto c : ball.cells) {
            std::sort(c.begin(), c.end());
            cells.insert(c);
        }
        for (const auto& c : ball.cells) {
            std::vector<int> image;
            for (int v : c) {
                REQUIRE(anti[v] >= 0);
                image.push_back(anti[v]);
            }
            std::sort(image.begin(), image.end());
            CHECK(cells.count(image) == 1);
        }
    }
}

TEST_CASE("barycentric subdivision keeps coherence and closedness")
{
    auto b = boundary(kuhn_triangulation(4, 1));
    auto r = barycentric_subdivision(b);
    CHECK(r.cells.size() == b.cells.size() * 6);
    CHECK(is_closed(r));
    CHECK(incoherent_facets(r).empty());
    auto disk = barycentric_subdivision(kuhn_triangulation(3, 2));
    CHECK(incoherent_facets(disk).empty());
    Rational total = 0;
    for (std::size_t c = 0; c < disk.cells.size(); ++c) total += abs_volume(disk, c);
    CHECK(total == 1);
}

TEST_CASE("canonical Sperner labeling")
{
    auto t = kuhn_triangulation(3, 3);
    auto l = canonical_sperner_labeling(t, 3);
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        auto s = support(t.vertices[v]);
        CHECK(l[v] == s.front() + 1);
    }
}

TEST_CASE("triangulate_simplex_region")
{
    auto full = triangulate_simplex_region(3, {});
    Rational total = 0;
    for (std::size_t c = 0; c < full.cells.size(); ++c) total += abs_volume(full, c);
    CHECK(total == 1);

    std::vector<LinearConstraint> half{{RVec{rat(1), rat(0), rat(0)}, rat(1, 2)}};
    auto cut = triangulate_simplex_region(3, half);
    total = 0;
    for (std::size_t c = 0; c < cut.cells.size(); ++c) total += abs_volume(cut, c);
    CHECK(total == rat(3, 4));
    CHECK(incoherent_facets(cut).empty());
    CHECK(is_closed(boundary(cut)));

    auto region4 = triangulate_simplex_region(
        4, std::vector<LinearConstraint>{{RVec{rat(1), rat(1), rat(0), rat(0)}, rat(1, 2)}});
    total = 0;
    for (std::size_t c = 0; c < region4.cells.size(); ++c) total += abs_volume(region4, c);
    // Fraction of the 3-simplex with x1 + x2 <= 1/2: 1 - P(x3 + x4 < 1/2) = 1 - ... by symmetry 1/2.
    CHECK(total == rat(1, 2));

    std::vector<LinearConstraint> empty{{RVec{rat(1), rat(1), rat(1)}, rat(1, 2)}};
    CHECK_THROWS_AS(triangulate_simplex_region(3, empty), Error);
}
