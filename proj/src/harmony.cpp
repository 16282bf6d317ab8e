#include "kkm/harmony.hpp"

#include "kkm/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kkm {

std::vector<int> simulated_answer(const RealMatrix& u, std::size_t agent, std::span<const double> x)
{
    require(agent < u.size(), "agent index out of range", "agent");
    const auto& row = u[agent];
    require(row.size() == x.size(), "price vector has the wrong length", "prices");
    std::vector<int> free;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] <= kFreeTolerance) free.push_back(static_cast<int>(j));

    std::vector<int> best;
    double top = -INFINITY;
    const auto consider = [&](int j, double score) {
        if (score > top) {
            top = score;
            best = {j};
        } else if (score == top) {
            best.push_back(j);
        }
    };
    if (!free.empty()) {
        for (int j : free) consider(j, row[j]);
    } else {
        for (std::size_t j = 0; j < x.size(); ++j) consider(static_cast<int>(j), row[j] - x[j]);
    }
    return best;
}

AnswerFn simulated_oracle(RealMatrix u)
{
    return [u = std::move(u)](std::size_t agent, const RVec& prices) {
        return simulated_answer(u, agent, prices.to_doubles());
    };
}

namespace {

// Compositions of k into n parts, in lexicographic order.
void for_each_lattice_point(std::size_t n, int k, const std::function<void(const std::vector<int>&)>& f)
{
    std::vector<int> y(n, 0);
    const auto rec = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == n) {
            y[i] = left;
            f(y);
            return;
        }
        for (int v = left; v >= 0; --v) {
            y[i] = v;
            self(self, i + 1, left - v);
        }
    };
    rec(rec, 0, k);
}

bool valid_answer(const std::vector<int>& rooms, std::size_t n)
{
    if (rooms.empty()) return false;
    for (int r : rooms)
        if (r < 0 || static_cast<std::size_t>(r) >= n) return false;
    return true;
}

} // namespace

ConditionReport validate_conditions(std::size_t n, const AnswerFn& answer, int resolution)
{
    require(n >= 1, "need at least one agent", "n");
    require(resolution >= 1, "resolution must be positive", "resolution");
    ConditionReport report;
    for_each_lattice_point(n, resolution, [&](const std::vector<int>& y) {
        ++report.samples;
        RVec x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = Rational(y[j], resolution);
        for (std::size_t i = 0; i < n; ++i) {
            const auto rooms = answer(i, x);
            if (!valid_answer(rooms, n)) {
                report.c1 = false;
                report.violations.push_back({"C1", i, x});
                continue;
            }
            bool any_free = false, hit = false;
            for (std::size_t j = 0; j < n; ++j) any_free = any_free || y[j] == 0;
            for (int r : rooms) hit = hit || y[r] == 0;
            if (any_free && !hit) {
                report.c2 = false;
                report.violations.push_back({"C2", i, x});
            }
        }
    });
    return report;
}

std::vector<double> envy_gaps(const RealMatrix& u, std::span<const double> prices, std::span<const int> assignment)
{
    std::vector<double> gaps;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const auto [lo, hi] = std::minmax_element(u[i].begin(), u[i].end());
        const double bonus = 1 + (*hi - *lo);
        std::vector<double> score(prices.size());
        for (std::size_t j = 0; j < prices.size(); ++j)
            score[j] = u[i][j] - prices[j] + (prices[j] <= kFreeTolerance ? bonus : 0.0);
        const double best = *std::max_element(score.begin(), score.end());
        gaps.push_back(std::max(0.0, best - score[assignment[i]]));
    }
    return gaps;
}

DivisionCertificate solve_rental(std::size_t n, const AnswerFn& answer, const RentalOptions& options,
                                 std::span<const LinearConstraint> constraints, const RealMatrix* utilities)
{
    require(n >= 1, "need at least one agent", "n");
    require(options.eps > 0 && std::isfinite(options.eps), "eps must be positive", "eps");
    if (utilities) {
        require(utilities->size() == n, "utility matrix needs one row per agent", "utilities");
        for (const auto& row : *utilities) require(row.size() == n, "utility rows need one entry per room", "utilities");
    }
    DivisionCertificate cert;
    cert.eps = options.eps;

    std::map<std::pair<std::size_t, RVec>, std::vector<int>> asked;
    const auto ask = [&](std::size_t i, const RVec& x) -> const std::vector<int>& {
        auto key = std::make_pair(i, x);
        auto it = asked.find(key);
        if (it == asked.end()) {
            auto rooms = answer(i, x);
            std::sort(rooms.begin(), rooms.end());
            rooms.erase(std::unique(rooms.begin(), rooms.end()), rooms.end());
            if (!valid_answer(rooms, n))
                fail(ErrorCode::CoverViolation,
                     "agent " + std::to_string(i) + " gave no valid room at prices " + x.str(), "room");
            it = asked.emplace(std::move(key), std::move(rooms)).first;
        }
        return it->second;
    };
    const RowMap rows = [&](const RVec& x) {
        RealMatrix m(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rooms = ask(i, x);
            for (int r : rooms) m[i][r] = 1.0 / static_cast<double>(rooms.size());
        }
        return m;
    };

    if (n == 1) {
        cert.prices = RVec{Rational(1)};
        ask(0, cert.prices);
        cert.assignment = {0};
        cert.boundary_degree = 1;
    } else {
        const Triangulation domain =
            constraints.empty() ? kuhn_triangulation(static_cast<int>(n), 1)
                                : triangulate_simplex_region(static_cast<int>(n), constraints);
        if (!constraints.empty()) {
            const auto deg = sampled_boundary_degree(domain, n, rows, options.initial_resolution);
            if (deg && *deg == 0)
                fail(ErrorCode::A2DegreeZero,
                     "sampled boundary degree of the answer cover on the constrained region is 0", "constraints");
        }
        PreimageOptions search;
        search.eps = options.eps / 2;
        search.initial_resolution = options.initial_resolution;
        search.max_nodes = options.max_nodes;
        search.stop_on_diameter = true;
        const auto pre = find_barycenter_preimage(domain, n, rows, search);
        double tau = 0;
        cert.prices = pre.point;
        cert.assignment = extract_permutation_adaptive(pre.matrix, tau);
        cert.boundary_degree = pre.boundary_degree;
        // Answers at the returned point itself already match up.
        const bool at_vertex = std::find(pre.cell.begin(), pre.cell.end(), pre.point) != pre.cell.end();
        for (std::size_t a = 0; a < pre.cell.size() && !at_vertex; ++a)
            for (std::size_t b = a + 1; b < pre.cell.size(); ++b) {
                double s = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double d = to_double(pre.cell[a][k] - pre.cell[b][k]);
                    s += d * d;
                }
                cert.cell_diameter = std::max(cert.cell_diameter, std::sqrt(s));
            }
    }
    cert.queries = asked.size();
    if (utilities) {
        cert.envy_gaps = envy_gaps(*utilities, cert.prices.to_doubles(), cert.assignment);
        if (!verify_certificate(cert, n, utilities, options.eps)) {
            const double worst = *std::max_element(cert.envy_gaps.begin(), cert.envy_gaps.end());
            fail(ErrorCode::VerificationFailed,
                 "envy gap " + std::to_string(worst) + " exceeds eps " + std::to_string(options.eps), "eps");
        }
    }
    return cert;
}

bool verify_certificate(const DivisionCertificate& c, std::size_t n, const RealMatrix* u, double eps)
{
    if (c.prices.dim() != n || c.assignment.size() != n) return false;
    Rational total = 0;
    for (const auto& v : c.prices) {
        if (v < 0) return false;
        total += v;
    }
    if (total != 1) return false;
    std::vector<char> seen(n, 0);
    for (int r : c.assignment) {
        if (r < 0 || static_cast<std::size_t>(r) >= n || seen[r]) return false;
        seen[r] = 1;
    }
    if (!u) return true;
    for (double g : envy_gaps(*u, c.prices.to_doubles(), c.assignment))
        if (!(g <= eps)) return false;
    return true;
}

} // namespace kkm
