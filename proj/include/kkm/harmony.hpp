#pragma once

#include "kkm/gale.hpp"

#include <exception>
#include <functional>
#include <string>
#include <vector>

namespace kkm {

/// Prices at or below this count as a free room for simulated agents.
inline constexpr double kFreeTolerance = 1e-9;

/// Rooms (0-based, ascending) that agent `agent` accepts at prices x under
/// utilities u: the best free rooms by u when some room is free, otherwise
/// argmax_j u[agent][j] - x_j.  Ties return every tied room.
std::vector<int> simulated_answer(const RealMatrix& u, std::size_t agent, std::span<const double> x);

/// Answer oracle over exact price vectors.  Interactive oracles throw
/// NeedAnswer for a pair they have not been told about.
using AnswerFn = std::function<std::vector<int>(std::size_t agent, const RVec& prices)>;

AnswerFn simulated_oracle(RealMatrix u);

class NeedAnswer : public std::exception {
public:
    NeedAnswer(std::size_t agent, RVec prices) : agent_(agent), prices_(std::move(prices)) {}
    const char* what() const noexcept override { return "answer needed"; }
    std::size_t agent() const { return agent_; }
    const RVec& prices() const { return prices_; }

private:
    std::size_t agent_;
    RVec prices_;
};

struct ConditionViolation {
    std::string condition;  // "C1" or "C2"
    std::size_t agent = 0;
    RVec point;
};

struct ConditionReport {
    bool c1 = true;
    bool c2 = true;
    std::size_t samples = 0;
    std::vector<ConditionViolation> violations;
};

/// Samples every lattice point y/k of Delta^{n-1}.  C1: each agent answers a
/// nonempty set of valid rooms.  C2: where some price is zero the answer
/// contains a free room.
ConditionReport validate_conditions(std::size_t n, const AnswerFn& answer, int resolution);

struct DivisionCertificate {
    RVec prices;                    // exact, sums to one
    std::vector<int> assignment;    // agent i takes room assignment[i]
    std::vector<double> envy_gaps;  // empty when no utilities are known
    double eps = 0;
    double cell_diameter = 0;
    std::size_t queries = 0;
    int boundary_degree = 0;
};

struct RentalOptions {
    double eps = 1e-4;
    int initial_resolution = 4;
    std::size_t max_nodes = 200'000;
};

/// Rental harmony through the Gale route in sampled mode: row i at a price
/// vector is uniform on agent i's answer set, the search stops at cells of
/// diameter eps / 2 and the assignment is a perfect matching in the
/// interpolated matrix.  With linear constraints the domain is the region
/// they cut from the simplex; EmptyDomain when it is thin and A2DegreeZero
/// when the sampled boundary degree is zero.  With utilities the envy gaps
/// are filled in and checked against eps (VerificationFailed).
DivisionCertificate solve_rental(std::size_t n, const AnswerFn& answer, const RentalOptions& options = {},
                                 std::span<const LinearConstraint> constraints = {},
                                 const RealMatrix* utilities = nullptr);

/// max(0, max_j s_ij - s_i,a(i)) per agent with s_ij = u_ij - p_j, plus a
/// bonus of 1 + (max_j u_ij - min_j u_ij) on free rooms so that argmax s is
/// exactly simulated_answer.
std::vector<double> envy_gaps(const RealMatrix& u, std::span<const double> prices, std::span<const int> assignment);

/// Prices in the simplex, a bijective assignment and (for utilities) every
/// recomputed gap <= eps.
bool verify_certificate(const DivisionCertificate& c, std::size_t n, const RealMatrix* u, double eps);

} // namespace kkm
