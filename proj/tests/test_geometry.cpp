#include "doctest.h"

#include "kkm/complexes.hpp"
#include "kkm/error.hpp"
#include "kkm/geometry.hpp"
#include "support.hpp"

#include <cmath>

using namespace kkm;
using namespace kkm::testing;

TEST_CASE("convex_combination on a segment")
{
    std::vector<RVec> seg{RVec{rat(0)}, RVec{rat(1)}};
    auto mid = convex_combination(seg, RVec{rat(1, 2)});
    REQUIRE(mid);
    CHECK((*mid)[0] == rat(1, 2));
    CHECK((*mid)[1] == rat(1, 2));
    CHECK_FALSE(convex_combination(seg, RVec{rat(2)}));
}

TEST_CASE("convex_combination rejects dimension mismatch")
{
    std::vector<RVec> pts{RVec{rat(0), rat(0)}};
    CHECK_THROWS_AS(convex_combination(pts, RVec{rat(0)}), Error);
}

TEST_CASE("convex_combination reconstructs random hull members exactly")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> w(0, 6);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<RVec> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(random_rvec(rng, 3));
        std::vector<Rational> weights(5);
        Rational total = 0;
        for (auto& x : weights) {
            x = w(rng);
            total += x;
        }
        if (total == 0) continue;
        RVec target(3);
        for (int i = 0; i < 5; ++i) target += pts[i] * (weights[i] / total);

        auto lambda = convex_combination(pts, target);
        REQUIRE(lambda);
        RVec back(3);
        Rational sum = 0;
        for (int i = 0; i < 5; ++i) {
            CHECK((*lambda)[i] >= 0);
            back += pts[i] * (*lambda)[i];
            sum += (*lambda)[i];
        }
        CHECK(sum == 1);
        CHECK(back == target);
        CHECK(caratheodory_contains(pts, target));
    }
}

TEST_CASE("convex_combination agrees with the Caratheodory oracle")
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(1, 6), dim(1, 3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = dim(rng);
        std::vector<RVec> pts;
        const int m = count(rng);
        for (int i = 0; i < m; ++i) pts.push_back(random_rvec(rng, d, 2, 1));
        const RVec target = random_rvec(rng, d, 1, 2);
        CHECK(convex_combination(pts, target).has_value() == caratheodory_contains(pts, target));
    }
}

TEST_CASE("ray_crossing_sign basic cases")
{
    std::vector<RVec> seg{RVec{rat(1), rat(-1)}, RVec{rat(1), rat(1)}};
    const RVec origin{rat(0), rat(0)};
    const Crossing fwd = ray_crossing_sign(seg, origin, RVec{rat(1), rat(0)});
    CHECK(fwd == Crossing::Positive);
    CHECK(ray_crossing_sign(seg, origin, RVec{rat(-1), rat(0)}) == Crossing::None);
    // Through an endpoint.
    CHECK(ray_crossing_sign(seg, origin, RVec{rat(1), rat(1)}) == Crossing::Degenerate);
    // Reversed vertex order flips the sign.
    std::vector<RVec> rev{seg[1], seg[0]};
    CHECK(ray_crossing_sign(rev, origin, RVec{rat(1), rat(0)}) == Crossing::Negative);
    // Collapsed simplex.
    std::vector<RVec> flat{seg[0], seg[0]};
    CHECK(ray_crossing_sign(flat, origin, RVec{rat(1), rat(0)}) == Crossing::Degenerate);
}

TEST_CASE("ray_crossing_sign matches a rasterized intersection oracle")
{
    std::mt19937_64 rng(21);
    int compared = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<RVec> seg{random_rvec(rng, 2), random_rvec(rng, 2)};
        const RVec origin = random_rvec(rng, 2, 1);
        const RVec dir = random_rvec(rng, 2);
        const Crossing got = ray_crossing_sign(seg, origin, dir);
        if (got == Crossing::Degenerate) continue;

        const auto a = seg[0].to_doubles(), b = seg[1].to_doubles();
        const auto o = origin.to_doubles(), d = dir.to_doubles();
        const double dn = std::hypot(d[0], d[1]);
        if (dn == 0) continue;
        // Signed distance of a point to the ray's line, and its position along it.
        auto side = [&](double x, double y) { return (d[0] * (y - o[1]) - d[1] * (x - o[0])) / dn; };
        auto along = [&](double x, double y) { return (d[0] * (x - o[0]) + d[1] * (y - o[1])) / dn; };

        // Rasterize the segment at step 1e-3 and look for a side change ahead of the origin.
        const int steps = 1000;
        int crossing = 0;
        bool near_miss = false;
        double prev = side(a[0], a[1]);
        for (int s = 1; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            const double x = a[0] + t * (b[0] - a[0]), y = a[1] + t * (b[1] - a[1]);
            const double cur = side(x, y);
            if ((prev < 0) != (cur < 0)) {
                const double pos = along(x, y);
                if (std::fabs(pos) < 1e-2) near_miss = true;
                if (pos > 0) crossing = (cur > prev) ? 1 : -1;
            }
            prev = cur;
        }
        const double sa = side(a[0], a[1]), sb = side(b[0], b[1]);
        if (near_miss || std::fabs(sa) < 1e-2 || std::fabs(sb) < 1e-2) continue;

        // The raster sign is the direction the segment sweeps across the ray;
        // det[a - o, b - o] > 0 exactly when it sweeps from right to left.
        const int expected = crossing;
        const int actual = got == Crossing::Positive ? 1 : got == Crossing::Negative ? -1 : 0;
        CHECK(actual == expected);
        ++compared;
    }
    CHECK(compared > 200);
}

namespace {

int signed_ray_count(const Triangulation& closed, const RVec& origin, const RVec& dir)
{
    int total = 0;
    for (std::size_t c = 0; c < closed.cells.size(); ++c) {
        auto pts = closed.cell_points(c);
        const Crossing x = ray_crossing_sign(pts, origin, dir);
        REQUIRE(x != Crossing::Degenerate);
        if (x == Crossing::Positive) total += closed.orientation[c];
        if (x == Crossing::Negative) total -= closed.orientation[c];
    }
    return total;
}

} // namespace

TEST_CASE("signed ray count over a polytope boundary is its orientation")
{
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 4; ++n) {
        CAPTURE(n);
        const Triangulation cube = boundary(antipodal_ball_triangulation(n, 1));
        Triangulation simplex;
        simplex.dim = n;
        for (int i = 0; i < n; ++i) simplex.vertices.push_back(unit_vector(n, i));
        RVec apex(n);
        for (int i = 0; i < n; ++i) apex[i] = -1;
        simplex.vertices.push_back(apex);
        Cell all(n + 1);
        for (int i = 0; i <= n; ++i) all[i] = i;
        simplex.cells.push_back(all);
        simplex.orientation.push_back(orientation_sign(simplex.vertices));
        const Triangulation simplex_boundary = boundary(simplex);

        RVec origin(n);
        origin[0] = rat(1, 7);
        for (int trial = 0; trial < 5; ++trial) {
            RVec dir = random_rvec(rng, n, 7, 13);
            if (dir == RVec(n)) continue;
            CHECK(signed_ray_count(cube, origin, dir) == 1);
            CHECK(signed_ray_count(simplex_boundary, origin, dir) == 1);
        }
    }
}

TEST_CASE("nonnegative_solution detects infeasibility")
{
    Matrix<Rational> a(1, 2);
    a(0, 0) = 1;
    a(0, 1) = 1;
    CHECK_FALSE(nonnegative_solution(a, {rat(-1)}));
    auto x = nonnegative_solution(a, {rat(3)});
    REQUIRE(x);
    CHECK((*x)[0] + (*x)[1] == 3);
}
