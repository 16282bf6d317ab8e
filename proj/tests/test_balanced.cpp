#include "doctest.h"

#include "kkm/balanced.hpp"
#include "kkm/error.hpp"
#include "support.hpp"

#include <set>

using namespace kkm;
using namespace kkm::testing;

namespace {

std::vector<int> labels_of_mask(const PointConfig& v, unsigned mask)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < v.points.size(); ++i)
        if (mask & (1u << i)) out.push_back(v.labels[i]);
    return out;
}

void check_against_oracle(const PointConfig& v)
{
    const unsigned m = static_cast<unsigned>(v.points.size());
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<RVec> pts;
        for (unsigned i = 0; i < m; ++i)
            if (mask & (1u << i)) pts.push_back(v.points[i]);
        const auto cert = is_balanced(labels_of_mask(v, mask), v);
        CAPTURE(mask);
        REQUIRE(cert.has_value() == caratheodory_contains(pts, v.center));
        if (cert) REQUIRE(verify_certificate(*cert, v));
    }
}

// Shapley's membership-weight definition, decided independently through the
// barycentric picture: 1/n in the hull of the face centers 1_S / |S|.
bool shapley_balanced(const std::vector<std::vector<int>>& collection, int n)
{
    std::vector<RVec> pts;
    for (const auto& s : collection) {
        RVec p(n);
        for (int i : s) p[i - 1] = Rational(1, static_cast<long>(s.size()));
        pts.push_back(p);
    }
    RVec target(n);
    for (int i = 0; i < n; ++i) target[i] = Rational(1, n);
    return caratheodory_contains(pts, target);
}

} // namespace

TEST_CASE("simplex vertices: only the full set is balanced")
{
    for (int n : {2, 3, 4}) {
        const auto v = simplex_vertex_config(n);
        const auto all = enumerate_balanced(v, n);
        REQUIRE(all.size() == 1);
        CHECK(all[0].subset.size() == static_cast<std::size_t>(n));
        for (const auto& c : all[0].coefficients) CHECK(c == Rational(1, n));
    }
}

TEST_CASE("is_balanced agrees with the Caratheodory oracle")
{
    check_against_oracle(simplex_vertex_config(4));
    for (int n : {1, 2, 3}) check_against_oracle(tucker_config(n));
    for (int k : {1, 2}) check_against_oracle(kkms_config(k));
}

TEST_CASE("KKMS configuration for the triangle has six minimal balanced collections")
{
    const auto v = kkms_config(2);
    REQUIRE(v.points.size() == 7);
    const auto faces = kkms_faces(2);
    const auto minimal = minimal_balanced(enumerate_balanced(v, 7));
    std::set<std::set<std::vector<int>>> got;
    for (const auto& c : minimal) {
        std::set<std::vector<int>> coll;
        for (int l : c.subset) coll.insert(faces[v.index_of(l)]);
        got.insert(coll);
    }
    const std::set<std::set<std::vector<int>>> expected{
        {{1, 2, 3}},
        {{1}, {2}, {3}},
        {{1, 2}, {3}},
        {{1, 3}, {2}},
        {{2, 3}, {1}},
        {{1, 2}, {1, 3}, {2, 3}},
    };
    CHECK(got == expected);
}

TEST_CASE("face-center balancedness matches Shapley's definition")
{
    for (int k : {1, 2}) {
        const auto v = kkms_config(k);
        const auto faces = kkms_faces(k);
        const unsigned m = static_cast<unsigned>(v.points.size());
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            std::vector<std::vector<int>> coll;
            for (unsigned i = 0; i < m; ++i)
                if (mask & (1u << i)) coll.push_back(faces[i]);
            REQUIRE(is_balanced(labels_of_mask(v, mask), v).has_value() == shapley_balanced(coll, k + 1));
        }
    }
}

TEST_CASE("Tucker configuration: balanced iff it contains an antipodal pair")
{
    for (int n : {1, 2, 3, 4}) {
        const auto v = tucker_config(n);
        const unsigned m = static_cast<unsigned>(v.points.size());
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            const auto s = labels_of_mask(v, mask);
            bool pair = false;
            for (int a : s)
                for (int b : s) pair = pair || a == -b;
            REQUIRE(is_balanced(s, v).has_value() == pair);
        }
    }
}

TEST_CASE("supersets of balanced sets stay balanced")
{
    std::mt19937_64 rng(5);
    std::vector<RVec> pts;
    for (int i = 0; i < 9; ++i) pts.push_back(random_rvec(rng, 2));
    const auto v = make_config(pts);
    const auto all = enumerate_balanced(v, 9);
    std::set<unsigned> balanced;
    for (const auto& c : all) {
        unsigned mask = 0;
        for (int l : c.subset) mask |= 1u << v.index_of(l);
        balanced.insert(mask);
    }
    for (unsigned mask : balanced)
        for (unsigned i = 0; i < 9; ++i) CHECK(balanced.count(mask | (1u << i)) == 1);
    CHECK(balanced.count((1u << 9) - 1) == 1);
}

TEST_CASE("enumeration order and size guard")
{
    const auto all = enumerate_balanced(kkms_config(2), 7);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].subset.size() <= all[i].subset.size());
    CHECK(enumerate_balanced(kkms_config(2), 1).size() == 1);

    std::vector<RVec> many(25, RVec(1));
    for (int i = 0; i < 25; ++i) many[i][0] = i;
    try {
        enumerate_balanced(make_config(many), 3);
        FAIL("expected size guard");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SizeGuard);
    }
}

TEST_CASE("a certificate with tampered weights fails verification")
{
    const auto v = kkms_config(2);
    auto cert = is_balanced(std::vector<int>{1, 2, 3}, v);
    REQUIRE(cert);
    CHECK(verify_certificate(*cert, v));
    cert->coefficients[0] += Rational(1, 100);
    cert->coefficients[1] -= Rational(1, 100);
    CHECK_FALSE(verify_certificate(*cert, v));
}
