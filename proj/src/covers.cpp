#include "kkm/covers.hpp"

#include "kkm/error.hpp"
#include "kkm/kernels.hpp"
#include "kkm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace kkm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxActiveSets = 2'000'000;

std::string point_str(std::span<const double> x)
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

void combinations(std::size_t m, std::size_t k, std::size_t start, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out)
{
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < m; ++i) {
        cur.push_back(static_cast<int>(i));
        combinations(m, k, i + 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> active_sets(std::size_t rows, std::size_t dim)
{
    double total = 0, c = 1;
    for (std::size_t k = 1; k <= std::min(rows, dim); ++k) {
        c = c * static_cast<double>(rows - k + 1) / static_cast<double>(k);
        total += c;
    }
    if (total > static_cast<double>(kMaxActiveSets))
        fail(ErrorCode::SizeGuard, "polytope has too many constraints for active-set enumeration", "polytopes");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    for (std::size_t k = 1; k <= std::min(rows, dim); ++k) combinations(rows, k, 0, cur, out);
    return out;
}

template <class T>
struct Rows {
    std::size_t m = 0, d = 0;
    std::vector<T> a, b;
    T dot(std::size_t r, std::span<const T> x) const
    {
        T s = T(0);
        for (std::size_t k = 0; k < d; ++k) s += a[r * d + k] * x[k];
        return s;
    }
};

template <class T>
bool feasible(const Rows<T>& p, std::span<const T> y, const std::vector<double>& slack)
{
    for (std::size_t r = 0; r < p.m; ++r) {
        if constexpr (std::is_same_v<T, double>) {
            if (p.dot(r, y) - p.b[r] > slack[r]) return false;
        } else {
            if (p.dot(r, y) > p.b[r]) return false;
        }
    }
    return true;
}

// Gram solve with a relative singularity threshold for doubles.
template <class T>
std::optional<std::vector<T>> gram_solve(Matrix<T> g, std::vector<T> rhs)
{
    if constexpr (std::is_same_v<T, double>) {
        double scale = 0;
        for (std::size_t i = 0; i < g.rows(); ++i) scale = std::max(scale, std::fabs(g(i, i)));
        const std::size_t n = g.rows();
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::fabs(g(r, col)) > std::fabs(g(piv, col))) piv = r;
            if (std::fabs(g(piv, col)) <= 1e-12 * scale) return std::nullopt;
            if (piv != col) {
                g.swap_rows(piv, col);
                std::swap(rhs[piv], rhs[col]);
            }
            for (std::size_t r = col + 1; r < n; ++r) {
                const double f = g(r, col) / g(col, col);
                for (std::size_t c = col; c < n; ++c) g(r, c) -= f * g(col, c);
                rhs[r] -= f * rhs[col];
            }
        }
        std::vector<double> x(n);
        for (std::size_t i = n; i-- > 0;) {
            double s = rhs[i];
            for (std::size_t c = i + 1; c < n; ++c) s -= g(i, c) * x[c];
            x[i] = s / g(i, i);
        }
        return x;
    } else {
        return solve(std::move(g), std::move(rhs));
    }
}

// Smallest squared distance over feasible projections onto active flats.
template <class T>
std::optional<T> project_sqdist(const Rows<T>& p, const std::vector<std::vector<int>>& subsets, std::span<const T> x,
                                const std::vector<double>& slack)
{
    if (feasible(p, x, slack)) return T(0);
    std::optional<T> best;
    std::vector<T> y(p.d);
    for (const auto& s : subsets) {
        const std::size_t k = s.size();
        Matrix<T> g(k, k);
        std::vector<T> rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                T v = T(0);
                for (std::size_t c = 0; c < p.d; ++c) v += p.a[s[i] * p.d + c] * p.a[s[j] * p.d + c];
                g(i, j) = v;
            }
            rhs[i] = p.dot(s[i], x) - p.b[s[i]];
        }
        auto lambda = gram_solve(std::move(g), std::move(rhs));
        if (!lambda) continue;
        T dist = T(0);
        for (std::size_t c = 0; c < p.d; ++c) {
            T shift = T(0);
            for (std::size_t i = 0; i < k; ++i) shift += (*lambda)[i] * p.a[s[i] * p.d + c];
            y[c] = x[c] - shift;
            dist += shift * shift;
        }
        if (best && !(dist < *best)) continue;
        if (feasible<T>(p, y, slack)) best = dist;
    }
    return best;
}

struct CompiledPolytope {
    Rows<double> rows;
    Rows<Rational> exact;
    std::vector<double> norms;
    std::vector<double> slack;
    std::vector<char> equality;  // member of a pair a.x <= b, -a.x <= -b
    std::vector<std::vector<int>> subsets;
    // Non-equality rows only, for strict membership of open sets.
    std::vector<double> open_a, open_b;
};

CompiledPolytope compile(const Polytope& poly, std::size_t dim)
{
    CompiledPolytope c;
    c.rows.m = c.exact.m = poly.size();
    c.rows.d = c.exact.d = dim;
    for (const auto& h : poly) {
        require(h.normal.dim() == dim, "halfspace normal has the wrong dimension", "polytopes");
        double norm2 = 0;
        for (const auto& v : h.normal) {
            c.exact.a.push_back(v);
            c.rows.a.push_back(to_double(v));
            norm2 += c.rows.a.back() * c.rows.a.back();
        }
        c.exact.b.push_back(h.offset);
        c.rows.b.push_back(to_double(h.offset));
        c.norms.push_back(std::sqrt(norm2));
        c.slack.push_back(1e-12 * (std::sqrt(norm2) + std::fabs(c.rows.b.back())));
    }
    c.equality.assign(poly.size(), 0);
    for (std::size_t r = 0; r < poly.size(); ++r)
        for (std::size_t s = r + 1; s < poly.size(); ++s)
            if (poly[r].offset == -poly[s].offset && poly[r].normal == poly[s].normal * Rational(-1))
                c.equality[r] = c.equality[s] = 1;
    for (std::size_t r = 0; r < poly.size(); ++r) {
        if (c.equality[r]) continue;
        c.open_a.insert(c.open_a.end(), c.rows.a.begin() + r * dim, c.rows.a.begin() + (r + 1) * dim);
        c.open_b.push_back(c.rows.b[r]);
    }
    c.subsets = active_sets(poly.size(), dim);
    return c;
}

double depth_of(const CompiledPolytope& p, std::span<const double> x)
{
    double depth = kInf;
    for (std::size_t r = 0; r < p.rows.m; ++r) {
        const double slack = p.rows.b[r] - p.rows.dot(r, x);
        if (p.equality[r]) {
            if (slack < -p.slack[r]) return 0;
            continue;
        }
        if (p.norms[r] == 0) {
            if (slack <= 0) return 0;
            continue;
        }
        depth = std::min(depth, slack / p.norms[r]);
    }
    return std::max(0.0, depth);
}

bool contains_exact(const CompiledPolytope& p, const RVec& x, SetKind kind)
{
    for (std::size_t r = 0; r < p.exact.m; ++r) {
        const Rational lhs = p.exact.dot(r, x.coords());
        if (lhs > p.exact.b[r]) return false;
        if (kind == SetKind::Open && !p.equality[r] && lhs == p.exact.b[r]) return false;
    }
    return true;
}

std::vector<Rational> exact_coords(const RVec& x) { return {x.begin(), x.end()}; }

} // namespace

struct CoverEvaluator::Impl {
    Cover cover;
    std::size_t dim = 0;
    std::vector<std::vector<CompiledPolytope>> polys;
};

CoverEvaluator::CoverEvaluator(const Cover& cover) : impl_(std::make_unique<Impl>())
{
    impl_->cover = cover;
    require(!cover.sets.empty(), "a cover needs at least one set", "sets");
    impl_->dim = cover.domain.ambient_dim();
    if (impl_->dim == 0) {
        for (const auto& s : cover.sets)
            if (!s.polytopes.empty() && !s.polytopes.front().empty()) impl_->dim = s.polytopes.front().front().normal.dim();
    }
    for (const auto& s : cover.sets) {
        require(!s.polytopes.empty() || static_cast<bool>(s.signed_distance),
                "set '" + s.name + "' has neither polytopes nor a signed distance", "sets");
        std::vector<CompiledPolytope> compiled;
        for (const auto& p : s.polytopes) compiled.push_back(compile(p, impl_->dim));
        impl_->polys.push_back(std::move(compiled));
    }
}

CoverEvaluator::~CoverEvaluator() = default;
CoverEvaluator::CoverEvaluator(CoverEvaluator&&) noexcept = default;
CoverEvaluator& CoverEvaluator::operator=(CoverEvaluator&&) noexcept = default;

std::size_t CoverEvaluator::size() const { return impl_->cover.sets.size(); }
std::size_t CoverEvaluator::dim() const { return impl_->dim; }
const Cover& CoverEvaluator::cover() const { return impl_->cover; }

double CoverEvaluator::distance(std::size_t i, std::span<const double> x) const
{
    const auto& set = impl_->cover.sets[i];
    if (set.polytopes.empty()) return std::max(0.0, set.signed_distance(x));
    double best = kInf;
    for (const auto& p : impl_->polys[i]) {
        auto d2 = project_sqdist<double>(p.rows, p.subsets, x, p.slack);
        if (d2) best = std::min(best, std::sqrt(*d2));
        if (best == 0) break;
    }
    return best;
}

double CoverEvaluator::depth(std::size_t i, std::span<const double> x) const
{
    const auto& set = impl_->cover.sets[i];
    if (set.polytopes.empty()) return std::max(0.0, -set.signed_distance(x));
    double best = 0;
    for (const auto& p : impl_->polys[i]) best = std::max(best, depth_of(p, x));
    return best;
}

Rational CoverEvaluator::squared_distance_exact(std::size_t i, const RVec& x) const
{
    const auto& set = impl_->cover.sets[i];
    if (set.polytopes.empty()) {
        const double d = distance(i, x.to_doubles());
        return from_double(d) * from_double(d);
    }
    const auto coords = exact_coords(x);
    std::optional<Rational> best;
    for (const auto& p : impl_->polys[i]) {
        auto d2 = project_sqdist<Rational>(p.exact, p.subsets, coords, p.slack);
        if (d2 && (!best || *d2 < *best)) best = *d2;
        if (best && *best == 0) break;
    }
    if (!best) fail(ErrorCode::InputError, "set '" + set.name + "' is empty", "sets");
    return *best;
}

bool CoverEvaluator::contains(std::size_t i, const RVec& x) const
{
    const auto& set = impl_->cover.sets[i];
    if (set.polytopes.empty()) return contains(i, x.to_doubles());
    for (const auto& p : impl_->polys[i])
        if (contains_exact(p, x, set.kind)) return true;
    return false;
}

bool CoverEvaluator::contains(std::size_t i, std::span<const double> x) const
{
    const auto& set = impl_->cover.sets[i];
    if (set.polytopes.empty()) {
        const double v = set.signed_distance(x);
        return set.kind == SetKind::Closed ? v <= 0 : v < 0;
    }
    if (set.kind == SetKind::Open) return depth(i, x) > 0;
    for (const auto& p : impl_->polys[i])
        if (feasible<double>(p.rows, x, p.slack)) return true;
    return false;
}

double polytope_distance(const Polytope& p, std::span<const double> x)
{
    const auto c = compile(p, x.size());
    auto d2 = project_sqdist<double>(c.rows, c.subsets, x, c.slack);
    return d2 ? std::sqrt(*d2) : kInf;
}

Rational polytope_squared_distance(const Polytope& p, const RVec& x)
{
    const auto c = compile(p, x.dim());
    const auto coords = exact_coords(x);
    auto d2 = project_sqdist<Rational>(c.exact, c.subsets, coords, c.slack);
    if (!d2) fail(ErrorCode::InputError, "polytope is empty", "polytopes");
    return *d2;
}

PartitionOfUnity::PartitionOfUnity(const Cover& cover, double eps_pou)
    : PartitionOfUnity(std::make_shared<CoverEvaluator>(cover), eps_pou)
{
}

PartitionOfUnity::PartitionOfUnity(std::shared_ptr<const CoverEvaluator> eval, double eps_pou)
    : eval_(std::move(eval)), eps_(eps_pou)
{
    require(eps_pou > 0 && std::isfinite(eps_pou), "eps_pou must be positive", "eps_pou");
}

std::vector<double> PartitionOfUnity::raw(std::span<const double> x) const
{
    std::vector<double> g(eval_->size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (eval_->cover().sets[i].kind == SetKind::Closed)
            g[i] = std::max(0.0, eps_ - eval_->distance(i, x));
        else
            g[i] = eval_->depth(i, x);
    }
    return g;
}

std::vector<double> PartitionOfUnity::weights(std::span<const double> x) const
{
    auto g = raw(x);
    double total = 0;
    for (double v : g) total += v;
    if (!(total > 0)) fail(ErrorCode::ZeroDenominator, "no cover set near " + point_str(x), "point");
    for (double& v : g) v /= total;
    return g;
}

namespace {

std::vector<char> used_vertices(const Triangulation& t)
{
    std::vector<char> used(t.vertices.size(), 0);
    for (const auto& c : t.cells)
        for (int v : c) used[v] = 1;
    return used;
}

Labeling induced(const CoverEvaluator& eval, const PartitionOfUnity& pou, const Triangulation& t)
{
    // Vertices outside every cell (boundary complexes keep them) get label 1.
    Labeling l{std::vector<int>(t.vertices.size(), 1), static_cast<int>(eval.size()), false};
    const auto used = used_vertices(t);
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        if (!used[v]) continue;
        const auto& x = t.vertices[v];
        const auto xd = x.to_doubles();
        const auto g = pou.raw(xd);
        int best = -1;
        for (std::size_t i = 0; i < eval.size(); ++i) {
            if (!eval.contains(i, x)) continue;
            if (best < 0 || g[i] > g[best]) best = static_cast<int>(i);
        }
        if (best < 0) fail(ErrorCode::CoverViolation, "vertex " + x.str() + " is not covered", "sets");
        l.labels[v] = best + 1;
    }
    return l;
}

} // namespace

Labeling induced_labeling(const Cover& cover, const Triangulation& t, double eps_pou)
{
    auto eval = std::make_shared<CoverEvaluator>(cover);
    PartitionOfUnity pou(eval, eps_pou);
    return induced(*eval, pou, t);
}

namespace {

// Cells of a complex in double precision, with barycentric location and
// point-to-cell distances by enumeration of faces.
struct CellIndex {
    std::size_t dim = 0;
    std::vector<std::vector<std::vector<double>>> cells;

    // Affine coordinates of the projection of x onto aff(face) and the
    // squared distance to it.
    std::optional<std::pair<std::vector<double>, double>> project(std::size_t c, const std::vector<int>& face,
                                                                  std::span<const double> x) const
    {
        const auto& pts = cells[c];
        const auto& p0 = pts[face[0]];
        const std::size_t k = face.size() - 1;
        std::vector<double> mu(k);
        if (k > 0) {
            Matrix<double> g(k, k);
            std::vector<double> rhs(k);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) {
                    double s = 0;
                    for (std::size_t d = 0; d < dim; ++d)
                        s += (pts[face[i + 1]][d] - p0[d]) * (pts[face[j + 1]][d] - p0[d]);
                    g(i, j) = s;
                }
                double s = 0;
                for (std::size_t d = 0; d < dim; ++d) s += (pts[face[i + 1]][d] - p0[d]) * (x[d] - p0[d]);
                rhs[i] = s;
            }
            auto sol = gram_solve(std::move(g), std::move(rhs));
            if (!sol) return std::nullopt;
            mu = *sol;
        }
        std::vector<double> lambda(face.size());
        double first = 1;
        for (std::size_t i = 0; i < k; ++i) {
            lambda[i + 1] = mu[i];
            first -= mu[i];
        }
        lambda[0] = first;
        double d2 = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            double y = 0;
            for (std::size_t i = 0; i < face.size(); ++i) y += lambda[i] * pts[face[i]][d];
            d2 += (y - x[d]) * (y - x[d]);
        }
        return std::make_pair(std::move(lambda), d2);
    }

    std::optional<std::vector<double>> barycentric(std::size_t c, std::span<const double> x) const
    {
        std::vector<int> all(cells[c].size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        auto pr = project(c, all, x);
        if (!pr || pr->second > 1e-18) return std::nullopt;
        for (double v : pr->first)
            if (v < -1e-9) return std::nullopt;
        return pr->first;
    }

    double distance(std::size_t c, std::span<const double> x) const
    {
        const std::size_t m = cells[c].size();
        double best = kInf;
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            std::vector<int> face;
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1u << i)) face.push_back(static_cast<int>(i));
            auto pr = project(c, face, x);
            if (!pr) continue;
            bool ok = true;
            for (double v : pr->first) ok = ok && v >= -1e-12;
            if (ok) best = std::min(best, std::sqrt(pr->second));
        }
        return best;
    }
};

} // namespace

Cover star_cover(const Triangulation& k, const Labeling& l)
{
    validate(l, k);
    require(!l.is_signed, "star covers take unsigned labelings", "labeling");
    auto index = std::make_shared<CellIndex>();
    auto labels = std::make_shared<std::vector<std::vector<int>>>();
    index->dim = k.ambient_dim();
    for (const auto& c : k.cells) {
        std::vector<std::vector<double>> pts;
        std::vector<int> lab;
        for (int v : c) {
            pts.push_back(k.vertices[v].to_doubles());
            lab.push_back(l[v]);
        }
        index->cells.push_back(std::move(pts));
        labels->push_back(std::move(lab));
    }
    // Inside the open star: minus the hat sum.  Elsewhere: distance to the
    // closed star, which is zero on its frontier.
    auto signed_distance = [index, labels](std::span<const double> x, int label) {
        for (std::size_t c = 0; c < index->cells.size(); ++c) {
            auto lambda = index->barycentric(c, x);
            if (!lambda) continue;
            double sum = 0;
            for (std::size_t j = 0; j < lambda->size(); ++j)
                if ((*labels)[c][j] == label) sum += std::max(0.0, (*lambda)[j]);
            if (sum > 0) return -sum;
            break;
        }
        double best = kInf;
        for (std::size_t c = 0; c < index->cells.size(); ++c)
            if (std::find((*labels)[c].begin(), (*labels)[c].end(), label) != (*labels)[c].end())
                best = std::min(best, index->distance(c, x));
        return best;
    };
    Cover cover;
    cover.domain = k;
    for (int i = 1; i <= l.n; ++i) {
        CoverSet s;
        s.name = "U" + std::to_string(i);
        s.kind = SetKind::Open;
        s.signed_distance = [signed_distance, i](std::span<const double> x) { return signed_distance(x, i); };
        cover.sets.push_back(std::move(s));
    }
    return cover;
}

Cover voronoi_cover(std::span<const RVec> sites, const Triangulation& domain, std::vector<std::string> names)
{
    require(!sites.empty(), "Voronoi cover needs sites", "sites");
    require(names.empty() || names.size() == sites.size(), "one name per site", "names");
    Cover cover;
    cover.domain = domain;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        Polytope cell;
        for (std::size_t j = 0; j < sites.size(); ++j) {
            if (j == i || sites[j] == sites[i]) continue;
            cell.push_back({(sites[j] - sites[i]) * Rational(2), sites[j].dot(sites[j]) - sites[i].dot(sites[i])});
        }
        CoverSet s;
        s.name = names.empty() ? "V" + std::to_string(i + 1) : names[i];
        s.polytopes.push_back(std::move(cell));
        cover.sets.push_back(std::move(s));
    }
    return cover;
}

MuReport mu_cover(const Cover& cover, const Triangulation& a, const std::optional<PointConfig>& v, int refinement_levels,
                  double eps_pou)
{
    require(refinement_levels >= 1, "at least one refinement level is needed", "refinement_levels");
    auto eval = std::make_shared<CoverEvaluator>(cover);
    PartitionOfUnity pou(eval, eps_pou);
    if (v) require(v->points.size() == eval->size(), "V needs one point per cover set", "V");

    MuReport out;
    out.note = "refinement stability is a heuristic certificate, not a proof";
    Triangulation level = a;
    for (int lv = 0; lv <= refinement_levels; ++lv) {
        if (lv > 0) level = barycentric_subdivision(level);
        const auto used = used_vertices(level);
        for (std::size_t u = 0; u < level.vertices.size(); ++u) {
            if (!used[u]) continue;
            const auto& x = level.vertices[u];
            bool all = true;
            for (std::size_t i = 0; i < eval->size() && all; ++i) all = eval->contains(i, x);
            if (all) fail(ErrorCode::NullHomotopyUndefined, "every set contains the boundary point " + x.str(), "sets");
        }
        Labeling l = induced(*eval, pou, level);
        DegreeReport r;
        if (v) {
            int n = 0;
            bool is_signed = false;
            for (int lab : v->labels) {
                n = std::max(n, std::abs(lab));
                is_signed = is_signed || lab < 0;
            }
            for (auto& lab : l.labels) lab = v->labels[lab - 1];
            l.n = n;
            l.is_signed = is_signed;
            try {
                r = degree_labeling_V(level, l, *v);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::BlOnDomain) throw;
                fail(ErrorCode::NullHomotopyUndefined, std::string("balanced cell on the boundary: ") + e.what(), "sets");
            }
        } else {
            r = degree_labeling(level, l);
        }
        out.level_degrees.push_back(r.degree);
        out.report = std::move(r);
    }
    const auto& d = out.level_degrees;
    out.stable = d[d.size() - 1] == d[d.size() - 2];
    return out;
}

KkmReport validate_kkm(const Cover& cover, int resolution)
{
    require(resolution >= 1, "resolution must be positive", "resolution");
    const CoverEvaluator eval(cover);
    const std::size_t n = eval.size();
    require(eval.dim() == n, "KKM covers live on Delta^{n-1} in R^n with n sets", "sets");

    // Lattice points y/k with y_1 + ... + y_n = k.
    std::vector<RVec> points;
    std::vector<int> y(n, 0);
    const auto emit = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == n) {
            y[i] = left;
            RVec p(n);
            for (std::size_t c = 0; c < n; ++c) p[c] = Rational(y[c], resolution);
            points.push_back(std::move(p));
            return;
        }
        for (int v = left; v >= 0; --v) {
            y[i] = v;
            self(self, i + 1, left - v);
        }
    };
    emit(emit, 0, resolution);
    const std::size_t count = points.size();
    std::vector<double> soa(n * count);
    for (std::size_t p = 0; p < count; ++p)
        for (std::size_t c = 0; c < n; ++c) soa[c * count + p] = to_double(points[p][c]);

    std::vector<std::vector<char>> member(n, std::vector<char>(count, 0));
    std::vector<double> viol(count);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& set = cover.sets[i];
        if (set.polytopes.empty()) {
            for (std::size_t p = 0; p < count; ++p) member[i][p] = eval.contains(i, points[p]);
            continue;
        }
        for (const auto& poly : set.polytopes) {
            const auto c = compile(poly, n);
            const bool open = set.kind == SetKind::Open;
            kernels::HalfspaceView h{open ? c.open_a.data() : c.rows.a.data(), open ? c.open_b.data() : c.rows.b.data(),
                                     open ? c.open_b.size() : c.rows.m, n};
            kernels::max_violation(h, kernels::PointBatch{soa.data(), count}, viol.data());
            double scale = 1;
            for (double b : c.rows.b) scale = std::max(scale, std::fabs(b));
            for (std::size_t p = 0; p < count; ++p) {
                if (member[i][p]) continue;
                if (std::fabs(viol[p]) <= 1e-9 * scale)
                    member[i][p] = contains_exact(c, points[p], set.kind);
                else
                    member[i][p] = viol[p] < 0 && (!open || contains_exact(c, points[p], set.kind));
            }
        }
    }

    KkmReport report;
    report.samples = count;
    for (std::size_t p = 0; p < count; ++p) {
        const auto face = support(points[p]);
        bool ok = false;
        for (int i : face) ok = ok || member[i][p];
        if (ok) continue;
        report.ok = false;
        if (report.violations.size() < kMaxReportedViolations) {
            std::vector<int> one_based;
            for (int i : face) one_based.push_back(i + 1);
            report.violations.push_back({points[p], std::move(one_based)});
        }
    }
    return report;
}

namespace {

struct SearchCell {
    std::vector<std::vector<double>> verts;
    double key;
    std::uint64_t seq;
};

struct CellOrder {
    bool operator()(const SearchCell& a, const SearchCell& b) const
    {
        return a.key != b.key ? a.key > b.key : a.seq > b.seq;
    }
};

double down(double v) { return v <= 0 ? v : std::nextafter(std::nextafter(v, 0.0), 0.0); }
double up(double v) { return std::nextafter(std::nextafter(v, kInf), kInf); }

} // namespace

CommonPoint common_point_search(const Cover& cover, std::span<const int> subset, double eps,
                                const SearchOptions& options)
{
    require(eps > 0 && std::isfinite(eps), "eps must be positive", "eps");
    const CoverEvaluator eval(cover);
    require(!subset.empty(), "subset must be nonempty", "subset");
    std::vector<std::size_t> idx;
    for (int s : subset) {
        require(s >= 1 && static_cast<std::size_t>(s) <= eval.size(), "subset index out of range", "subset");
        idx.push_back(static_cast<std::size_t>(s - 1));
    }
    require(!cover.domain.cells.empty(), "cover has no domain cells", "domain");
    const std::size_t dim = eval.dim();

    std::priority_queue<SearchCell, std::vector<SearchCell>, CellOrder> queue;
    std::uint64_t seq = 0;
    std::size_t nodes = 0, unresolved = 0;
    std::optional<CommonPoint> found;

    // Returns true when the cell survives pruning; fills key and may set found.
    auto evaluate = [&](SearchCell& cell) -> bool {
        ++nodes;
        const std::size_t m = cell.verts.size();
        std::vector<double> c(dim, 0.0);
        for (const auto& v : cell.verts)
            for (std::size_t d = 0; d < dim; ++d) c[d] += v[d];
        for (double& x : c) x /= static_cast<double>(m);
        double r = 0;
        for (const auto& v : cell.verts) {
            double s = 0;
            for (std::size_t d = 0; d < dim; ++d) s += (v[d] - c[d]) * (v[d] - c[d]);
            r = std::max(r, std::sqrt(s));
        }
        std::vector<double> gaps;
        double gap = 0;
        for (std::size_t i : idx) {
            gaps.push_back(eval.distance(i, c));
            gap = std::max(gap, gaps.back());
        }
        if (gap <= eps) {
            found = CommonPoint{c, std::vector<int>(subset.begin(), subset.end()), gaps, nodes};
            return false;
        }
        const double lb = gap - r * (1 + 1e-12);
        if (lb > eps + 1e-9 * (1 + gap)) return false;
        if (lb > eps) {
            // Borderline: redo the bound exactly with outward rounding.
            std::vector<RVec> ev;
            for (const auto& v : cell.verts) ev.push_back(from_doubles(v));
            const RVec ce = centroid(ev);
            Rational r2 = 0;
            for (const auto& v : ev) {
                const RVec dv = v - ce;
                r2 = std::max(r2, dv.dot(dv));
            }
            double worst = 0;
            for (std::size_t i : idx) worst = std::max(worst, down(std::sqrt(down(to_double(eval.squared_distance_exact(i, ce))))));
            if (worst - up(std::sqrt(up(to_double(r2)))) > eps) return false;
        }
        cell.key = gap;
        return true;
    };

    for (std::size_t c = 0; c < cover.domain.cells.size(); ++c) {
        SearchCell cell{{}, 0, seq++};
        for (int v : cover.domain.cells[c]) cell.verts.push_back(cover.domain.vertices[v].to_doubles());
        if (evaluate(cell)) queue.push(std::move(cell));
        if (found) return *found;
    }
    while (!queue.empty()) {
        if (nodes > options.max_nodes)
            fail(ErrorCode::NotFoundAtResolution,
                 "node budget of " + std::to_string(options.max_nodes) + " exhausted without a witness", "eps");
        SearchCell cell = queue.top();
        queue.pop();
        std::size_t ea = 0, eb = 1;
        double longest = -1;
        for (std::size_t a = 0; a < cell.verts.size(); ++a)
            for (std::size_t b = a + 1; b < cell.verts.size(); ++b) {
                double s = 0;
                for (std::size_t d = 0; d < dim; ++d)
                    s += (cell.verts[a][d] - cell.verts[b][d]) * (cell.verts[a][d] - cell.verts[b][d]);
                if (s > longest) {
                    longest = s;
                    ea = a;
                    eb = b;
                }
            }
        if (std::sqrt(longest) < eps / 16) {
            ++unresolved;
            continue;
        }
        std::vector<double> mid(dim);
        for (std::size_t d = 0; d < dim; ++d) mid[d] = 0.5 * (cell.verts[ea][d] + cell.verts[eb][d]);
        for (std::size_t replaced : {ea, eb}) {
            SearchCell child{cell.verts, 0, seq++};
            child.verts[replaced] = mid;
            if (evaluate(child)) queue.push(std::move(child));
            if (found) return *found;
        }
    }
    fail(ErrorCode::NotFoundAtResolution,
         "no common point within eps; " + std::to_string(unresolved) + " cells reached the resolution floor", "eps");
}

} // namespace kkm
