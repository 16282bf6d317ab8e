#pragma once

#include "kkm/complexes.hpp"
#include "kkm/degrees.hpp"
#include "kkm/geometry.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kkm {

/// Conjunction of halfspaces normal . x <= offset.
using Polytope = std::vector<LinearConstraint>;

enum class SetKind { Closed, Open };

/// Negative strictly inside the set, positive outside, continuous.  It need
/// not be a true distance; only its sign and zero set are relied upon, and
/// max(0, value) / max(0, -value) stand in for the distances to the set and
/// to its complement.
using SignedDistance = std::function<double(std::span<const double>)>;

/// A member of a cover: a union of polytopes, or a callback when
/// `polytopes` is empty.  Open sets are the interiors of the same shapes
/// (relative to the affine hull of the domain for paired equality rows).
struct CoverSet {
    std::string name;
    SetKind kind = SetKind::Closed;
    std::vector<Polytope> polytopes;
    SignedDistance signed_distance;
};

struct Cover {
    std::vector<CoverSet> sets;
    Triangulation domain;
};

/// Precompiled double-precision view of a cover with exact fallbacks.
class CoverEvaluator {
public:
    explicit CoverEvaluator(const Cover& cover);
    ~CoverEvaluator();
    CoverEvaluator(CoverEvaluator&&) noexcept;
    CoverEvaluator& operator=(CoverEvaluator&&) noexcept;

    std::size_t size() const;
    std::size_t dim() const;
    const Cover& cover() const;

    /// Euclidean distance to the closure of set i.
    double distance(std::size_t i, std::span<const double> x) const;
    /// Distance to the complement of set i (0 outside the set).  For polytope
    /// unions this is the largest inner depth over the pieces, a lower bound
    /// that is positive exactly on the open set.
    double depth(std::size_t i, std::span<const double> x) const;
    /// Exact squared distance to a polytope set; callback sets fall back to
    /// the double value.
    Rational squared_distance_exact(std::size_t i, const RVec& x) const;
    /// Exact membership for polytope sets; sign test for callbacks.
    bool contains(std::size_t i, const RVec& x) const;
    bool contains(std::size_t i, std::span<const double> x) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Euclidean distance from x to {y : A y <= b} by active-set enumeration:
/// the projection is the nearest feasible projection of x onto a flat
/// spanned by linearly independent rows.
double polytope_distance(const Polytope& p, std::span<const double> x);
Rational polytope_squared_distance(const Polytope& p, const RVec& x);

class PartitionOfUnity {
public:
    PartitionOfUnity(const Cover& cover, double eps_pou);
    PartitionOfUnity(std::shared_ptr<const CoverEvaluator> eval, double eps_pou);

    double eps() const { return eps_; }
    const CoverEvaluator& evaluator() const { return *eval_; }

    /// g_i(x): max(0, eps - dist(x, S_i)) for closed sets, dist(x, complement)
    /// for open ones.
    std::vector<double> raw(std::span<const double> x) const;
    /// phi_i(x) = g_i(x) / sum g.  Throws ZeroDenominator when x is farther
    /// than eps from every closed set and outside every open one.
    std::vector<double> weights(std::span<const double> x) const;

private:
    std::shared_ptr<const CoverEvaluator> eval_;
    double eps_;
};

inline constexpr double kDefaultEpsPou = 0.05;

/// Labels each vertex of t by 1 + the index of a set containing it, picking
/// the largest partition-of-unity weight among those sets and the lowest
/// index on ties.  Throws CoverViolation for an uncovered vertex.
Labeling induced_labeling(const Cover& cover, const Triangulation& t, double eps_pou = kDefaultEpsPou);

/// Open-star cover U_L(K): set i is the union of open stars of the vertices
/// labelled i+1.  The callback reports minus the summed barycentric hat
/// functions, so the induced weights are exactly the hats.
Cover star_cover(const Triangulation& k, const Labeling& l);

/// Closed Voronoi cells of `sites` inside `domain`.
Cover voronoi_cover(std::span<const RVec> sites, const Triangulation& domain, std::vector<std::string> names = {});

struct MuReport {
    DegreeReport report;               // at the finest level
    std::vector<int> level_degrees;    // level 0 is the boundary as given
    bool stable = false;               // last two levels agree
    std::string note;
};

/// Degree of the cover restricted to the closed oriented boundary complex
/// `a`, through induced labelings at `refinement_levels` successive
/// barycentric refinements.  With V the labels are mapped positionally onto
/// V's labels and the V-degree is used.  Throws NullHomotopyUndefined when a
/// sampled vertex lies in every set or a balanced cell appears.
MuReport mu_cover(const Cover& cover, const Triangulation& a, const std::optional<PointConfig>& v = std::nullopt,
                  int refinement_levels = 2, double eps_pou = kDefaultEpsPou);

struct KkmViolation {
    RVec point;
    std::vector<int> face;  // 1-based indices of the support
};

struct KkmReport {
    bool ok = true;
    std::size_t samples = 0;
    std::vector<KkmViolation> violations;  // first few only
};

inline constexpr std::size_t kMaxReportedViolations = 16;

/// Checks every lattice point y/k of Delta^{n-1} (n = number of sets)
/// against the sets indexed by its support.
KkmReport validate_kkm(const Cover& cover, int resolution);

struct SearchOptions {
    std::size_t max_nodes = 4'000'000;
};

struct CommonPoint {
    std::vector<double> point;
    std::vector<int> subset;     // 1-based set indices
    std::vector<double> gaps;    // distance to each set of the subset
    std::size_t nodes = 0;
};

/// Best-first branch-and-bound over longest-edge bisections of the cells of
/// cover.domain.  A cell is discarded once some set is provably farther than
/// eps from all of it; pruning decisions near the threshold are redone in
/// exact arithmetic.  Throws NotFoundAtResolution on exhaustion, which is
/// not a proof that the sets are disjoint.
CommonPoint common_point_search(const Cover& cover, std::span<const int> subset, double eps,
                                const SearchOptions& options = {});

} // namespace kkm
