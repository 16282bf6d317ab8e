#pragma once

#include "kkm/covers.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace kkm {

using RealMatrix = std::vector<std::vector<double>>;

/// n covers with n sets each over one domain (a triangulated region of
/// Delta^{n-1} in R^n).
struct GaleInstance {
    std::vector<Cover> covers;
    Triangulation domain;
};

void validate(const GaleInstance& g);

/// Row i of the returned matrix is Phi^i(x), the partition-of-unity vector of
/// cover i.  Rows sum to one.
using RowMap = std::function<RealMatrix(const RVec& x)>;

/// Partition-of-unity rows for a Gale instance.
class GaleMap {
public:
    GaleMap(const GaleInstance& g, double eps_pou);
    RealMatrix rows(std::span<const double> x) const;
    RealMatrix rows(const RVec& x) const { return rows(x.to_doubles()); }
    /// Phi(x) = average of the rows.  Throws CoverViolation where a cover has
    /// a zero denominator.
    std::vector<double> averaged(std::span<const double> x) const;
    double distance(std::size_t cover, std::size_t set, std::span<const double> x) const;
    std::size_t n() const { return pous_.size(); }
    double eps_pou() const { return eps_pou_; }

private:
    std::vector<PartitionOfUnity> pous_;
    double eps_pou_;
};

/// max_j |sum_i m[i][j] - 1| over columns (rows are assumed stochastic).
double column_residual(const RealMatrix& m);

struct PreimageOptions {
    double eps = 1e-6;
    int initial_resolution = 4;
    int max_depth = 50;
    std::size_t max_nodes = 200'000;
    /// Sampled mode: accept once the cell diameter is <= eps and report the
    /// interpolated matrix instead of re-evaluating at the preimage.  The
    /// target is the barycenter displaced by ~1e-9 so that averaged
    /// indicator images do not leave every cell degenerate.
    bool stop_on_diameter = false;
};

struct PreimageResult {
    RVec point;
    RealMatrix matrix;        // rows Phi^i at the point (interpolated in sampled mode)
    double residual = 0;
    std::vector<RVec> cell;   // the final cell
    int boundary_degree = 0;  // PL degree of the averaged map on the initial mesh boundary
    int depth = 0;
    std::size_t nodes = 0;
};

/// Degree of the affine map sending cell vertex k to images[k] (both in R^n,
/// images in the hyperplane sum = 1) around the barycenter of Delta^{n-1}:
/// +-1 when the barycenter is interior to the image, 0 when it is outside.
/// Absent when it lies on the image boundary or the image is flat through it.
std::optional<int> local_degree(std::span<const RVec> cell, std::span<const RVec> images);

/// Degree-guided refinement on the Freudenthal lattice of each domain cell:
/// keep the cells with nonzero or undetermined degree plus a ring of
/// neighbours, halve, repeat.  The ring widens (up to 3) when every kept cell
/// goes to zero.  Throws DegreeVanished when no candidate survives.
PreimageResult find_barycenter_preimage(const Triangulation& domain, std::size_t n, const RowMap& rows,
                                        const PreimageOptions& options);

/// Sum of local degrees (around the displaced sampled-mode target) over the
/// initial lattice of `domain` at `resolution`: the PL degree of the averaged
/// map on the domain boundary.  Absent when a
/// cell is degenerate, so that the sum is not determined.
std::optional<int> sampled_boundary_degree(const Triangulation& domain, std::size_t n, const RowMap& rows,
                                           int resolution);

/// Lexicographically smallest permutation with m[i][pi(i)] > tau for all i.
/// Throws NoPerfectMatching.
std::vector<int> extract_permutation(const RealMatrix& m, double tau);

struct GaleSolution {
    RVec point;
    std::vector<double> p;
    RealMatrix matrix;
    std::vector<int> permutation;  // 0-based: agent i takes set permutation[i]
    std::vector<double> gaps;
    double residual = 0;
    double tau = 0;
    double eps_pou = 0;
    int boundary_degree = 0;
    std::size_t nodes = 0;
};

struct GaleOptions {
    double eps = 1e-6;
    /// Defaults to eps / 2 so positive weights certify gaps below eps.
    std::optional<double> eps_pou;
    PreimageOptions search;
};

/// tau starts at 1/(2 n^2) and halves on matching failure down to 1e-12.
std::vector<int> extract_permutation_adaptive(const RealMatrix& m, double& tau);

GaleSolution gale_solve(const GaleInstance& g, const GaleOptions& options = {});

/// Recomputes the gaps from p, pi and the covers alone.  True when pi is a
/// permutation and every gap is <= eps.
bool verify_gale(const GaleInstance& g, std::span<const double> p, std::span<const int> permutation, double eps,
                 std::vector<double>* gaps = nullptr);

} // namespace kkm
