#pragma once

#include "kkm/complexes.hpp"
#include "kkm/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kkm {

struct SignedCell {
    int index;
    int sign;
};

/// Integer degree of a labeling-induced PL map with its preimage cells.
/// Invariant: degree == sum of cell signs.
struct DegreeReport {
    int degree = 0;
    std::string regular_value;
    std::vector<SignedCell> cells;
};

/// Degree of f_L : |T| -> boundary of Delta^{n-1} for a closed oriented
/// (n-2)-dimensional T.  Counts cells labelled exactly I_n \ {omitted}
/// (omitted defaults to n); each contributes
///   orientation * parity(sort by label) * (-1)^(omitted-1),
/// so that a Sperner labeling of the simplex boundary has degree +1.
DegreeReport degree_labeling(const Triangulation& t, const Labeling& l, int omitted = 0);

/// Degree of x -> (rho(x) - c_V)/|rho(x) - c_V| for a closed oriented
/// (n-1)-dimensional T and V in R^n, by exact ray casting from c_V.
/// Throws BlOnDomain when some cell is balanced-labelled.
DegreeReport degree_labeling_V(const Triangulation& t, const Labeling& l, const PointConfig& v);

/// Degree around `center` of the PL map sending vertex i of the closed
/// complex t to images[i] (images in R^{dim+1}).  Ray directions are drawn
/// from a generator seeded by `seed` and redrawn on degenerate hits.
DegreeReport pl_degree(const Triangulation& t, std::span<const RVec> images, const RVec& center,
                       std::uint64_t seed);

struct SpernerViolation {
    int vertex;
    int label;
    std::vector<int> face;  // 1-based corner indices of the carrier face
};

struct SpernerReport {
    bool ok = true;
    std::vector<SpernerViolation> violations;
};

SpernerReport check_sperner(const Triangulation& t, const Labeling& l);

/// Cells found by a witness scan plus the boundary degree that bounds their
/// number from below (absent when undefined or when T has no boundary).
struct WitnessReport {
    std::vector<int> cells;
    std::optional<int> boundary_degree;
};

WitnessReport find_fully_labeled(const Triangulation& t, const Labeling& l);
WitnessReport find_bl_simplices(const Triangulation& t, const Labeling& l, const PointConfig& v);

struct ComplementaryEdge {
    int u;
    int w;
    bool internal;
};

struct ComplementaryReport {
    std::vector<ComplementaryEdge> edges;
    bool antipodal_boundary = false;
    std::optional<int> boundary_degree;
};

ComplementaryReport find_complementary_edges(const Triangulation& t, const Labeling& l);

/// FNV-1a over the combinatorial data; seeds ray directions.
std::uint64_t input_hash(const Triangulation& t, const Labeling& l);

} // namespace kkm
