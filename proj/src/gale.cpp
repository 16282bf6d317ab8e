#include "kkm/gale.hpp"

#include "kkm/error.hpp"
#include "kkm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>

namespace kkm {

void validate(const GaleInstance& g)
{
    const std::size_t n = g.covers.size();
    require(n >= 1, "a Gale instance needs at least one cover", "covers");
    require(!g.domain.cells.empty(), "the domain has no cells", "domain");
    require(g.domain.ambient_dim() == n, "the domain must live in R^n for n covers", "domain");
    for (std::size_t i = 0; i < n; ++i)
        require(g.covers[i].sets.size() == n,
                "cover " + std::to_string(i + 1) + " has " + std::to_string(g.covers[i].sets.size()) +
                    " sets, expected " + std::to_string(n),
                "covers");
}

GaleMap::GaleMap(const GaleInstance& g, double eps_pou) : eps_pou_(eps_pou)
{
    validate(g);
    for (const auto& c : g.covers) pous_.emplace_back(c, eps_pou);
}

RealMatrix GaleMap::rows(std::span<const double> x) const
{
    RealMatrix m;
    for (std::size_t i = 0; i < pous_.size(); ++i) {
        try {
            m.push_back(pous_[i].weights(x));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroDenominator) throw;
            fail(ErrorCode::CoverViolation, "cover " + std::to_string(i + 1) + ": " + e.what(), "covers");
        }
    }
    return m;
}

std::vector<double> GaleMap::averaged(std::span<const double> x) const
{
    const auto m = rows(x);
    std::vector<double> out(m.size(), 0.0);
    for (const auto& row : m)
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
    for (double& v : out) v /= static_cast<double>(m.size());
    return out;
}

double GaleMap::distance(std::size_t cover, std::size_t set, std::span<const double> x) const
{
    return pous_[cover].evaluator().distance(set, x);
}

double column_residual(const RealMatrix& m)
{
    double worst = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        double s = 0;
        for (const auto& row : m) s += row[j];
        worst = std::max(worst, std::fabs(s - 1));
    }
    return worst;
}

namespace {

// Rows [image coords 0..n-2; 1] and right side [c; 1].
Matrix<Rational> image_system(std::span<const RVec> images)
{
    const std::size_t n = images.size();
    Matrix<Rational> a(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t r = 0; r + 1 < n; ++r) a(r, k) = images[k][r];
        a(n - 1, k) = 1;
    }
    return a;
}

RVec barycenter(std::size_t n)
{
    RVec c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = Rational(1, static_cast<long>(n));
    return c;
}

// Barycenter moved by about 1e-9 along a fixed direction in the plane
// sum = 1, off the facets spanned by averaged indicator images.
RVec displaced_target(std::size_t n)
{
    RVec w(n);
    Rational mean = 0;
    for (std::size_t j = 0; j < n; ++j) mean += (w[j] = Rational(1, static_cast<long>(j + 2) * (j + 2) + 1));
    mean /= Rational(static_cast<long>(n));
    auto c = barycenter(n);
    for (std::size_t j = 0; j < n; ++j) c[j] += (w[j] - mean) * Rational(1, 1L << 30);
    return c;
}

// Convex weights of the target in the image, when it lies in it.
std::optional<std::vector<Rational>> image_weights(std::span<const RVec> images, const RVec& target)
{
    const std::size_t n = images.size();
    std::vector<RVec> proj;
    for (const auto& im : images) proj.emplace_back(std::vector<Rational>(im.begin(), im.begin() + (n - 1)));
    return convex_combination(proj, RVec(std::vector<Rational>(target.begin(), target.begin() + (n - 1))));
}

std::optional<int> degree_around(std::span<const RVec> cell, std::span<const RVec> images, const RVec& target)
{
    const std::size_t n = images.size();
    require(cell.size() == n && n >= 1, "local degree needs one image per cell vertex", "images");
    if (n == 1) return 1;
    const auto a = image_system(images);
    const Rational det = determinant(a);
    if (det == 0) {
        if (image_weights(images, target)) return std::nullopt;
        return 0;
    }
    std::vector<Rational> rhs(target.begin(), target.begin() + (n - 1));
    rhs.push_back(1);
    const auto lambda = solve(a, rhs);
    bool zero = false;
    for (const auto& l : *lambda) {
        if (l < 0) return 0;
        zero = zero || l == 0;
    }
    if (zero) return std::nullopt;
    return sign(det) * orientation_sign(cell);
}

double cell_diameter(std::span<const RVec> cell)
{
    double d = 0;
    for (std::size_t a = 0; a < cell.size(); ++a)
        for (std::size_t b = a + 1; b < cell.size(); ++b) {
            const auto u = cell[a].to_doubles(), v = cell[b].to_doubles();
            double s = 0;
            for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
            d = std::max(d, std::sqrt(s));
        }
    return d;
}

RVec image_of(const RealMatrix& m)
{
    const std::size_t n = m.size();
    RVec out(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (const auto& row : m) s += row[j];
        out[j] = from_double(s) / Rational(static_cast<long>(n));
    }
    return out;
}

} // namespace

std::optional<int> local_degree(std::span<const RVec> cell, std::span<const RVec> images)
{
    return degree_around(cell, images, barycenter(images.size()));
}

namespace {

// Cells of the Freudenthal triangulation of one domain cell at resolution K,
// in partial-sum coordinates 0 <= z_1 <= ... <= z_d <= K.  Cell (y, pi) has
// vertices y, y + e_pi0, y + e_pi0 + e_pi1, ...
struct LatticeCell {
    std::size_t root = 0;
    std::vector<std::int64_t> y;
    std::vector<int> perm;
    bool operator<(const LatticeCell& o) const { return std::tie(root, y, perm) < std::tie(o.root, o.y, o.perm); }
};

class Lattice {
public:
    Lattice(const Triangulation& domain, std::size_t d) : d_(d)
    {
        for (std::size_t c = 0; c < domain.cells.size(); ++c) roots_.push_back(domain.cell_points(c));
        std::vector<int> p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = static_cast<int>(i);
        do perms_.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
    }

    std::vector<std::vector<std::int64_t>> vertices(const LatticeCell& c) const
    {
        std::vector<std::vector<std::int64_t>> out{c.y};
        for (std::size_t k = 0; k < d_; ++k) {
            auto z = out.back();
            ++z[c.perm[k]];
            out.push_back(std::move(z));
        }
        return out;
    }

    bool valid(const LatticeCell& c, std::int64_t k) const
    {
        for (const auto& z : vertices(c)) {
            if (d_ > 0 && (z[0] < 0 || z[d_ - 1] > k)) return false;
            for (std::size_t i = 1; i < d_; ++i)
                if (z[i - 1] > z[i]) return false;
        }
        return true;
    }

    RVec point(std::size_t root, const std::vector<std::int64_t>& z, std::int64_t k) const
    {
        const auto& corners = roots_[root];
        RVec p(corners[0].dim());
        std::int64_t prev = 0;
        for (std::size_t i = 0; i <= d_; ++i) {
            const std::int64_t next = i < d_ ? z[i] : k;
            if (next != prev) p += corners[i] * Rational(next - prev, k);
            prev = next;
        }
        return p;
    }

    std::vector<RVec> points(const LatticeCell& c, std::int64_t k) const
    {
        std::vector<RVec> out;
        for (const auto& z : vertices(c)) out.push_back(point(c.root, z, k));
        return out;
    }

    std::vector<LatticeCell> all(std::int64_t k) const
    {
        std::vector<LatticeCell> out;
        for (std::size_t r = 0; r < roots_.size(); ++r) {
            std::vector<std::int64_t> y(d_, 0);
            const auto rec = [&](auto&& self, std::size_t i) -> void {
                if (i == d_) {
                    for (const auto& p : perms_) {
                        LatticeCell c{r, y, p};
                        if (valid(c, k)) out.push_back(c);
                    }
                    return;
                }
                for (std::int64_t v = 0; v <= k; ++v) {
                    y[i] = v;
                    self(self, i + 1);
                }
            };
            rec(rec, 0);
        }
        return out;
    }

    // Cells of resolution 2k inside c.
    std::vector<LatticeCell> children(const LatticeCell& c) const
    {
        std::vector<LatticeCell> out;
        const std::int64_t scale = static_cast<std::int64_t>(d_ + 1);
        for (unsigned mask = 0; mask < (1u << d_); ++mask) {
            for (const auto& sigma : perms_) {
                // Centroid of the child relative to 2y, times 2(d+1).
                std::vector<std::int64_t> t(d_);
                for (std::size_t i = 0; i < d_; ++i) t[i] = ((mask >> i) & 1u) * scale;
                for (std::size_t k = 0; k < d_; ++k) t[sigma[k]] += static_cast<std::int64_t>(d_ - k);
                bool inside = t[c.perm[0]] <= 2 * scale && t[c.perm[d_ - 1]] >= 0;
                for (std::size_t k = 1; k < d_ && inside; ++k) inside = t[c.perm[k - 1]] >= t[c.perm[k]];
                if (!inside) continue;
                LatticeCell child{c.root, c.y, sigma};
                for (std::size_t i = 0; i < d_; ++i) child.y[i] = 2 * c.y[i] + ((mask >> i) & 1u);
                out.push_back(std::move(child));
            }
        }
        return out;
    }

    // Cells sharing a vertex with c, c included.
    std::vector<LatticeCell> star(const LatticeCell& c, std::int64_t k) const
    {
        std::vector<LatticeCell> out;
        for (const auto& z : vertices(c)) {
            for (const auto& sigma : perms_) {
                auto base = z;
                for (std::size_t j = 0; j <= d_; ++j) {
                    if (j > 0) --base[sigma[j - 1]];
                    LatticeCell n{c.root, base, sigma};
                    if (valid(n, k)) out.push_back(n);
                }
            }
        }
        return out;
    }

private:
    std::size_t d_;
    std::vector<std::vector<RVec>> roots_;
    std::vector<std::vector<int>> perms_;
};

} // namespace

PreimageResult find_barycenter_preimage(const Triangulation& domain, std::size_t n, const RowMap& rows,
                                        const PreimageOptions& options)
{
    require(options.eps > 0, "eps must be positive", "eps");
    require(options.initial_resolution >= 1, "initial resolution must be positive", "resolution");
    require(domain.ambient_dim() == n && n >= 2, "domain must be a region of Delta^{n-1} in R^n", "domain");
    for (const auto& c : domain.cells) require(c.size() == n, "domain cells must be full-dimensional", "domain");
    const std::size_t d = n - 1;
    const int max_depth = std::min(options.max_depth, 56);
    const Lattice lattice(domain, d);
    const RVec target = options.stop_on_diameter ? displaced_target(n) : barycenter(n);

    std::map<RVec, RealMatrix> cache;
    const auto matrix_at = [&](const RVec& v) -> const RealMatrix& {
        auto it = cache.find(v);
        if (it == cache.end()) it = cache.emplace(v, rows(v)).first;
        return it->second;
    };

    PreimageResult result;
    const auto finish = [&](RVec p, RealMatrix m, std::vector<RVec> cell, int depth) {
        result.point = std::move(p);
        result.residual = column_residual(m);
        result.matrix = std::move(m);
        result.cell = std::move(cell);
        result.depth = depth;
        return result;
    };

    std::string last_failure;
    for (int rings = 1; rings <= 3; ++rings) {
        std::vector<LatticeCell> region = lattice.all(options.initial_resolution);
        for (int level = 0; level <= max_depth; ++level) {
            const std::int64_t k = static_cast<std::int64_t>(options.initial_resolution) << level;
            std::vector<LatticeCell> nonzero, degenerate;
            int total = 0;
            for (const auto& c : region) {
                if (++result.nodes > options.max_nodes)
                    fail(ErrorCode::DegreeVanished,
                         "search budget of " + std::to_string(options.max_nodes) + " cells exhausted at level " +
                             std::to_string(level),
                         "eps");
                const auto pts = lattice.points(c, k);
                std::vector<RVec> images;
                for (const auto& v : pts) images.push_back(image_of(matrix_at(v)));
                const auto deg = degree_around(pts, images, target);
                if (deg && *deg == 0) continue;
                if (deg) total += *deg;
                (deg ? nonzero : degenerate).push_back(c);
            }
            if (level == 0 && rings == 1) result.boundary_degree = total;
            if (nonzero.empty() && degenerate.empty()) {
                last_failure = "every cell reports zero degree at level " + std::to_string(level);
                break;
            }

            // Undetermined cells only matter when no cell has a definite degree.
            const std::vector<LatticeCell>& core = nonzero.empty() ? degenerate : nonzero;
            for (const auto& c : core) {
                const auto pts = lattice.points(c, k);
                for (const auto& v : pts) {
                    const auto& m = matrix_at(v);
                    if (column_residual(m) <= (options.stop_on_diameter ? 1e-12 : options.eps))
                        return finish(v, m, pts, level);
                }
                std::vector<RVec> images;
                for (const auto& v : pts) images.push_back(image_of(matrix_at(v)));
                auto lambda = image_weights(images, target);
                if (!lambda) continue;
                RVec p(n);
                for (std::size_t i = 0; i < n; ++i) p += pts[i] * (*lambda)[i];
                if (options.stop_on_diameter) {
                    if (cell_diameter(pts) > options.eps) continue;
                    RealMatrix m(n, std::vector<double>(n, 0.0));
                    for (std::size_t v = 0; v < n; ++v) {
                        const double w = to_double((*lambda)[v]);
                        const auto& mv = matrix_at(pts[v]);
                        for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t j = 0; j < n; ++j) m[i][j] += w * mv[i][j];
                    }
                    return finish(std::move(p), std::move(m), pts, level);
                }
                auto m = rows(p);
                if (column_residual(m) <= options.eps) return finish(std::move(p), std::move(m), pts, level);
            }

            // Keep the candidates plus `rings` layers of neighbours, then refine.
            std::set<LatticeCell> keep(core.begin(), core.end());
            std::vector<LatticeCell> frontier = core;
            for (int r = 0; r < rings; ++r) {
                std::vector<LatticeCell> next;
                for (const auto& c : frontier)
                    for (auto& nb : lattice.star(c, k))
                        if (keep.insert(nb).second) next.push_back(std::move(nb));
                frontier = std::move(next);
            }
            region.clear();
            for (const auto& c : keep)
                for (auto& ch : lattice.children(c)) region.push_back(std::move(ch));
            if (level == max_depth) last_failure = "depth limit reached without meeting eps";
        }
    }
    fail(ErrorCode::DegreeVanished,
         last_failure + " (boundary degree " + std::to_string(result.boundary_degree) + ")", "covers");
}

std::optional<int> sampled_boundary_degree(const Triangulation& domain, std::size_t n, const RowMap& rows,
                                           int resolution)
{
    require(resolution >= 1, "resolution must be positive", "resolution");
    require(domain.ambient_dim() == n && n >= 2, "domain must be a region of Delta^{n-1} in R^n", "domain");
    const Lattice lattice(domain, n - 1);
    std::map<RVec, RVec> images;
    const RVec target = displaced_target(n);
    int total = 0;
    for (const auto& c : lattice.all(resolution)) {
        const auto pts = lattice.points(c, resolution);
        std::vector<RVec> im;
        for (const auto& v : pts) {
            auto it = images.find(v);
            if (it == images.end()) it = images.emplace(v, image_of(rows(v))).first;
            im.push_back(it->second);
        }
        const auto deg = degree_around(pts, im, target);
        if (!deg) return std::nullopt;
        total += *deg;
    }
    return total;
}

namespace {

bool augment(const RealMatrix& m, double tau, std::size_t row, std::vector<int>& match_col, std::vector<char>& seen,
             const std::vector<char>& blocked_col, std::size_t first_row)
{
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (blocked_col[j] || seen[j] || !(m[row][j] > tau)) continue;
        seen[j] = 1;
        if (match_col[j] < 0 ||
            augment(m, tau, static_cast<std::size_t>(match_col[j]), match_col, seen, blocked_col, first_row)) {
            match_col[j] = static_cast<int>(row);
            return true;
        }
    }
    return false;
}

// Rows first_row.. can be matched into the unblocked columns.
bool completable(const RealMatrix& m, double tau, std::size_t first_row, const std::vector<char>& blocked_col)
{
    std::vector<int> match_col(m.size(), -1);
    for (std::size_t r = first_row; r < m.size(); ++r) {
        std::vector<char> seen(m.size(), 0);
        if (!augment(m, tau, r, match_col, seen, blocked_col, first_row)) return false;
    }
    return true;
}

} // namespace

std::vector<int> extract_permutation(const RealMatrix& m, double tau)
{
    const std::size_t n = m.size();
    require(n >= 1, "matrix must be nonempty", "matrix");
    for (const auto& row : m) {
        require(row.size() == n, "matrix must be square", "matrix");
        for (double v : row) require(v >= 0 && std::isfinite(v), "matrix entries must be nonnegative", "matrix");
    }
    require(tau > 0, "tau must be positive", "tau");
    std::vector<int> pi(n, -1);
    std::vector<char> used(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        bool placed = false;
        for (std::size_t j = 0; j < n && !placed; ++j) {
            if (used[j] || !(m[i][j] > tau)) continue;
            used[j] = 1;
            if (completable(m, tau, i + 1, used)) {
                pi[i] = static_cast<int>(j);
                placed = true;
            } else {
                used[j] = 0;
            }
        }
        if (!placed) fail(ErrorCode::NoPerfectMatching, "no perfect matching above tau = " + std::to_string(tau), "tau");
    }
    return pi;
}

std::vector<int> extract_permutation_adaptive(const RealMatrix& m, double& tau)
{
    const double n = static_cast<double>(m.size());
    for (tau = 1.0 / (2 * n * n); tau >= 1e-12; tau /= 2) {
        try {
            return extract_permutation(m, tau);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoPerfectMatching) throw;
        }
    }
    fail(ErrorCode::NoPerfectMatching, "no perfect matching for any tau down to 1e-12", "matrix");
}

bool verify_gale(const GaleInstance& g, std::span<const double> p, std::span<const int> permutation, double eps,
                 std::vector<double>* gaps)
{
    validate(g);
    const std::size_t n = g.covers.size();
    if (permutation.size() != n || p.size() != n) return false;
    std::vector<char> seen(n, 0);
    for (int j : permutation) {
        if (j < 0 || static_cast<std::size_t>(j) >= n || seen[j]) return false;
        seen[j] = 1;
    }
    bool ok = true;
    std::vector<double> local;
    for (std::size_t i = 0; i < n; ++i) {
        const CoverEvaluator eval(g.covers[i]);
        const double d = eval.distance(static_cast<std::size_t>(permutation[i]), p);
        local.push_back(d);
        ok = ok && d <= eps;
    }
    if (gaps) *gaps = std::move(local);
    return ok;
}

GaleSolution gale_solve(const GaleInstance& g, const GaleOptions& options)
{
    validate(g);
    require(options.eps > 0 && std::isfinite(options.eps), "eps must be positive", "eps");
    const std::size_t n = g.covers.size();
    const double eps_pou = options.eps_pou.value_or(options.eps / 2);
    GaleSolution sol;
    sol.eps_pou = eps_pou;

    if (n == 1) {
        sol.point = g.domain.vertices.front();
        sol.p = sol.point.to_doubles();
        sol.matrix = {{1.0}};
        sol.permutation = {0};
        sol.tau = 0.5;
    } else {
        const GaleMap map(g, eps_pou);
        PreimageOptions search = options.search;
        search.eps = options.eps;
        const auto pre = find_barycenter_preimage(g.domain, n, [&](const RVec& x) { return map.rows(x); }, search);
        sol.point = pre.point;
        sol.p = pre.point.to_doubles();
        sol.matrix = pre.matrix;
        sol.residual = pre.residual;
        sol.boundary_degree = pre.boundary_degree;
        sol.nodes = pre.nodes;
        sol.permutation = extract_permutation_adaptive(sol.matrix, sol.tau);
    }
    if (!verify_gale(g, sol.p, sol.permutation, options.eps, &sol.gaps)) {
        double worst = 0;
        for (double v : sol.gaps) worst = std::max(worst, v);
        fail(ErrorCode::VerificationFailed,
             "membership gap " + std::to_string(worst) + " exceeds eps " + std::to_string(options.eps), "eps");
    }
    return sol;
}

} // namespace kkm
