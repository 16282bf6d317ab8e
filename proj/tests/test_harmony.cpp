#include "doctest.h"

#include "kkm/error.hpp"
#include "kkm/harmony.hpp"
#include "support.hpp"

#include <algorithm>
#include <numeric>

using namespace kkm;
using namespace kkm::testing;

namespace {

const RealMatrix diagonal3{{10, 1, 1}, {1, 10, 1}, {1, 1, 10}};

// Plain quasi-linear envy at an interior price vector.
double interior_gap(const RealMatrix& u, const std::vector<double>& p, std::size_t i, int room)
{
    double best = -1e300;
    for (std::size_t j = 0; j < p.size(); ++j) best = std::max(best, u[i][j] - p[j]);
    return best - (u[i][room] - p[room]);
}

bool is_bijection(std::vector<int> a)
{
    std::sort(a.begin(), a.end());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != static_cast<int>(i)) return false;
    return true;
}

// Entries in [0, spread].  A spread below 1/n leaves room for strictly
// positive envy-free prices.
RealMatrix random_utilities(std::mt19937_64& rng, std::size_t n, double spread = 0.2)
{
    std::uniform_int_distribution<int> d(0, 100);
    RealMatrix u(n, std::vector<double>(n));
    for (auto& row : u)
        for (double& v : row) v = d(rng) * spread / 100;
    return u;
}

} // namespace

TEST_CASE("simulated answers")
{
    const RealMatrix u{{3, 1, 1}, {1, 1, 1}};
    const double third = 1.0 / 3;
    CHECK(simulated_answer(u, 0, std::vector<double>{third, third, third}) == std::vector<int>{0});
    CHECK(simulated_answer(u, 0, std::vector<double>{0, 0.5, 0.5}) == std::vector<int>{0});
    CHECK(simulated_answer(u, 1, std::vector<double>{0, 0.5, 0.5}) == std::vector<int>{0});
    CHECK(simulated_answer(u, 1, std::vector<double>{third, third, third}) == std::vector<int>{0, 1, 2});
    // Two free rooms: the better one by utility.
    CHECK(simulated_answer(RealMatrix{{1, 5, 2}}, 0, std::vector<double>{1, 0, 0}) == std::vector<int>{1});
}

TEST_CASE("simulated oracles satisfy C1 and C2 on every lattice up to 16")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto oracle = simulated_oracle(random_utilities(rng, 3));
        for (int k = 1; k <= 16; ++k) {
            const auto r = validate_conditions(3, oracle, k);
            CHECK(r.c1);
            CHECK(r.c2);
            CHECK(r.samples == static_cast<std::size_t>((k + 1) * (k + 2) / 2));
        }
    }
    const auto two = validate_conditions(2, simulated_oracle({{1, 0}, {0, 1}}), 2);
    CHECK(two.samples == 3);
    CHECK((two.c1 && two.c2));
}

TEST_CASE("an agent stuck on room 2 violates C2 where room 2 is priced")
{
    const AnswerFn stuck = [](std::size_t, const RVec&) { return std::vector<int>{1}; };
    const auto r = validate_conditions(3, stuck, 2);
    CHECK(r.c1);
    CHECK_FALSE(r.c2);
    REQUIRE_FALSE(r.violations.empty());
    for (const auto& v : r.violations) {
        CHECK(v.condition == "C2");
        CHECK(v.point[1] != 0);
        CHECK((v.point[0] == 0 || v.point[2] == 0));
    }
    const AnswerFn mute = [](std::size_t, const RVec&) { return std::vector<int>{}; };
    CHECK_FALSE(validate_conditions(2, mute, 1).c1);
}

TEST_CASE("symmetric pair splits the rent in half")
{
    const RealMatrix u{{1, 0}, {0, 1}};
    const auto c = solve_rental(2, simulated_oracle(u), {}, {}, &u);
    CHECK(c.assignment == std::vector<int>{0, 1});
    CHECK(c.prices[0] + c.prices[1] == 1);
    CHECK(verify_certificate(c, 2, &u, 1e-4));
}

TEST_CASE("diagonal three-agent instance: identity assignment")
{
    const auto c = solve_rental(3, simulated_oracle(diagonal3), {}, {}, &diagonal3);
    CHECK(c.assignment == std::vector<int>{0, 1, 2});
    CHECK(c.prices[0] + c.prices[1] + c.prices[2] == 1);
    const auto p = c.prices.to_doubles();
    for (std::size_t i = 0; i < 3; ++i) CHECK(interior_gap(diagonal3, p, i, c.assignment[i]) <= 1e-4);
}

TEST_CASE("indifferent agent still gets a valid bijection")
{
    const RealMatrix u{{1, 1, 1}, {0.6, 0.2, 0.1}, {0.5, 0.55, 0.1}};
    const auto c = solve_rental(3, simulated_oracle(u), {}, {}, &u);
    CHECK(is_bijection(c.assignment));
    for (double g : c.envy_gaps) CHECK(g <= 1e-4);
}

TEST_CASE("random utilities: certificates re-verify by direct envy evaluation")
{
    std::mt19937_64 rng(77);
    for (std::size_t n : {2u, 3u, 4u}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto u = random_utilities(rng, n);
            RentalOptions opt;
            opt.eps = 1e-3;
            const auto c = solve_rental(n, simulated_oracle(u), opt, {}, &u);
            CHECK(is_bijection(c.assignment));
            Rational total = 0;
            for (const auto& v : c.prices) {
                CHECK(v >= 0);
                total += v;
            }
            CHECK(total == 1);
            const auto p = c.prices.to_doubles();
            const bool interior = std::all_of(p.begin(), p.end(), [](double v) { return v > kFreeTolerance; });
            if (interior)
                for (std::size_t i = 0; i < n; ++i) CHECK(interior_gap(u, p, i, c.assignment[i]) <= 1e-3);
            CHECK(c.cell_diameter <= 5e-4);
        }
    }
}

TEST_CASE("wide utility spreads: a certificate or VerificationFailed, never a false one")
{
    // Near a free room the C2 rule overrides quasi-linear preference, so the
    // closed-cover solution can sit where quasi-linear envy is large.
    std::mt19937_64 rng(77);
    int certified = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = random_utilities(rng, 4, 1.0);
        RentalOptions opt;
        opt.eps = 1e-3;
        try {
            const auto c = solve_rental(4, simulated_oracle(u), opt, {}, &u);
            CHECK(verify_certificate(c, 4, &u, 1e-3));
            ++certified;
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::VerificationFailed);
        }
    }
    CHECK(certified > 0);
}

TEST_CASE("answers are asked once per agent and price vector")
{
    std::map<std::pair<std::size_t, RVec>, int> seen;
    const auto base = simulated_oracle(diagonal3);
    const AnswerFn counting = [&](std::size_t i, const RVec& x) {
        ++seen[{i, x}];
        return base(i, x);
    };
    const auto c = solve_rental(3, counting, {}, {}, &diagonal3);
    for (const auto& [key, count] : seen) CHECK(count == 1);
    CHECK(c.queries == seen.size());
}

TEST_CASE("interactive oracles suspend with the missing query")
{
    const AnswerFn none = [](std::size_t i, const RVec& x) -> std::vector<int> { throw NeedAnswer(i, x); };
    try {
        solve_rental(3, none);
        FAIL("expected a query");
    } catch (const NeedAnswer& q) {
        CHECK(q.agent() == 0);
        CHECK(q.prices().dim() == 3);
    }
}

TEST_CASE("constrained rental")
{
    const RealMatrix sym{{1, 0}, {0, 1}};
    // No constraints: same as the plain solve.
    const auto plain = solve_rental(3, simulated_oracle(diagonal3), {}, {}, &diagonal3);
    CHECK(plain.assignment == std::vector<int>{0, 1, 2});

    const std::vector<LinearConstraint> half{{RVec{rat(1), rat(0)}, rat(1, 2)}};
    const auto c = solve_rental(2, simulated_oracle(sym), {}, half, &sym);
    CHECK(c.prices[0] <= rat(1, 2));
    CHECK(c.assignment == std::vector<int>{0, 1});
    CHECK(verify_certificate(c, 2, &sym, 1e-4));

    // Both prefer room 1 by 1/2: envy-free only at (3/4, 1/4), outside x_1 <= 1/2.
    const RealMatrix rivals{{0.5, 0}, {0.5, 0}};
    for (int k = 0; k <= 200; ++k) {
        const std::vector<double> p{k / 400.0, 1 - k / 400.0};
        for (const auto& a : {std::vector<int>{0, 1}, std::vector<int>{1, 0}}) {
            const auto g = envy_gaps(rivals, p, a);
            CHECK(*std::max_element(g.begin(), g.end()) > 1e-4);
        }
    }
    try {
        solve_rental(2, simulated_oracle(rivals), {}, half, &rivals);
        FAIL("expected no certificate");
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::A2DegreeZero || e.code() == ErrorCode::DegreeVanished ||
               e.code() == ErrorCode::NotFoundAtResolution));
    }

    const std::vector<LinearConstraint> empty{{RVec{rat(1), rat(0)}, rat(-1)}};
    try {
        solve_rental(2, simulated_oracle(sym), {}, empty, &sym);
        FAIL("expected EMPTY_DOMAIN");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyDomain);
    }
}

TEST_CASE("tampered certificates fail verification")
{
    auto c = solve_rental(3, simulated_oracle(diagonal3), {}, {}, &diagonal3);
    CHECK(verify_certificate(c, 3, &diagonal3, 1e-4));
    auto swapped = c;
    std::swap(swapped.assignment[0], swapped.assignment[1]);
    CHECK_FALSE(verify_certificate(swapped, 3, &diagonal3, 1e-4));
    auto doubled = c;
    doubled.assignment[2] = doubled.assignment[0];
    CHECK_FALSE(verify_certificate(doubled, 3, nullptr, 1e-4));
    auto off = c;
    off.prices[0] += rat(1, 1000);
    CHECK_FALSE(verify_certificate(off, 3, nullptr, 1e-4));
}
