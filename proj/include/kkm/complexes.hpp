#pragma once

#include "kkm/rational.hpp"

#include <span>
#include <string>
#include <vector>

namespace kkm {

using Cell = std::vector<int>;

/// Oriented simplicial complex with exact vertex coordinates.  `cells` are the
/// top-dimensional simplices; `orientation[c]` says whether the listed vertex
/// order of cell c agrees (+1) or disagrees (-1) with the complex orientation.
struct Triangulation {
    int dim = 0;
    std::vector<RVec> vertices;
    std::vector<Cell> cells;
    std::vector<int> orientation;

    std::size_t ambient_dim() const { return vertices.empty() ? 0 : vertices.front().dim(); }
    std::vector<RVec> cell_points(std::size_t c) const;
};

/// Vertex labels.  Unsigned labelings draw from I_n = {1..n}; signed ones from
/// {+-1..+-n}.
struct Labeling {
    std::vector<int> labels;
    int n = 0;
    bool is_signed = false;

    int operator[](std::size_t v) const { return labels[v]; }
    std::size_t size() const { return labels.size(); }
};

/// Sign of the vertex frame.  With as many vertices as ambient coordinates the
/// determinant of the vertex matrix is used (simplices living in the
/// hyperplane x_1 + ... + x_n = 1); with dim+1 vertices in R^dim the
/// determinant of edge vectors from the first vertex is used.  0 if flat.
int orientation_sign(std::span<const RVec> vertices);

/// Structural checks; throw StructuralError / InputError on violation.
void validate(const Triangulation& t);
void validate(const Labeling& l, const Triangulation& t);

/// Edgewise (Kuhn/Freudenthal) subdivision at resolution k of the simplex
/// spanned by `corners`; vertices are sum a_i corner_i / k with a_i >= 0 and
/// sum a_i = k.  Orientation follows orientation_sign.
Triangulation edgewise_subdivision(std::span<const RVec> corners, int k);

/// Edgewise subdivision of the standard simplex Delta^{n-1} in R^n.
Triangulation kuhn_triangulation(int n, int k);

/// Boundary facets with induced orientation (outward normal first).
Triangulation boundary(const Triangulation& t);

/// The cube [-1,1]^n cut into k^n grid boxes, each split into n! Freudenthal
/// simplices.  The whole triangulation is invariant under x -> -x.
Triangulation antipodal_ball_triangulation(int n, int k);

/// Barycentric subdivision; used to refine closed boundary complexes.
Triangulation barycentric_subdivision(const Triangulation& t);

/// Copy with every cell orientation negated.
Triangulation reversed(const Triangulation& t);

/// Interior facets whose two cofaces induce equal orientations.
std::vector<Cell> incoherent_facets(const Triangulation& t);

/// True when every (dim-1)-face lies in exactly two cells.
bool is_closed(const Triangulation& t);

/// Unique edges as sorted vertex pairs in lexicographic order.
std::vector<std::pair<int, int>> edges(const Triangulation& t);

/// Index of the vertex at -x for each vertex, or -1 when absent.
std::vector<int> antipodes(const Triangulation& t);

/// Vertex support: 0-based coordinate indices that are nonzero.
std::vector<int> support(const RVec& x);

/// Canonical Sperner labeling of a triangulation with barycentric
/// coordinates: the label is 1 + the smallest index in the vertex support.
Labeling canonical_sperner_labeling(const Triangulation& t, int n);

struct LinearConstraint {
    RVec normal;
    Rational offset;  // normal . x <= offset
};

/// Triangulates {x in Delta^{n-1} : constraints} by pulling from the lowest
/// vertex.  Throws EmptyDomain when the region is not full-dimensional.
Triangulation triangulate_simplex_region(int n, std::span<const LinearConstraint> constraints);

} // namespace kkm
