#include "kkm/balanced.hpp"

#include "kkm/error.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace kkm {

std::optional<BalancedCertificate> is_balanced(std::span<const int> subset, const PointConfig& v)
{
    require(!subset.empty(), "balanced test needs a nonempty subset", "subset");
    std::vector<RVec> pts;
    std::vector<int> labels(subset.begin(), subset.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (int l : labels) {
        const int idx = v.index_of(l);
        require(idx >= 0, "label " + std::to_string(l) + " is not in the configuration", "subset");
        pts.push_back(v.points[idx]);
    }
    auto lambda = convex_combination(pts, v.center);
    if (!lambda) return std::nullopt;
    return BalancedCertificate{std::move(labels), std::move(*lambda)};
}

bool verify_certificate(const BalancedCertificate& cert, const PointConfig& v)
{
    if (cert.subset.size() != cert.coefficients.size() || cert.subset.empty()) return false;
    RVec acc(v.dim());
    Rational total = 0;
    for (std::size_t i = 0; i < cert.subset.size(); ++i) {
        const int idx = v.index_of(cert.subset[i]);
        if (idx < 0 || cert.coefficients[i] < 0) return false;
        acc += v.points[idx] * cert.coefficients[i];
        total += cert.coefficients[i];
    }
    return total == 1 && acc == v.center;
}

std::vector<BalancedCertificate> enumerate_balanced(const PointConfig& v, int max_size)
{
    const std::size_t m = v.size();
    if (m > kMaxEnumeratedPoints)
        fail(ErrorCode::SizeGuard, "enumeration limited to " + std::to_string(kMaxEnumeratedPoints) +
                                       " points, got " + std::to_string(m));
    require(max_size >= 1, "max_size must be positive", "max_size");

    std::vector<std::pair<std::vector<int>, std::uint32_t>> subsets;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        if (std::popcount(mask) > max_size) continue;
        std::vector<int> idx;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1u << i)) idx.push_back(static_cast<int>(i));
        subsets.emplace_back(std::move(idx), mask);
    }
    std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });

    std::vector<BalancedCertificate> out;
    for (const auto& [idx, mask] : subsets) {
        std::vector<RVec> pts;
        std::vector<int> labels;
        for (int i : idx) {
            pts.push_back(v.points[i]);
            labels.push_back(v.labels[i]);
        }
        if (auto lambda = convex_combination(pts, v.center))
            out.push_back({std::move(labels), std::move(*lambda)});
    }
    return out;
}

std::vector<BalancedCertificate> minimal_balanced(const std::vector<BalancedCertificate>& all)
{
    auto contains = [](const std::vector<int>& big, const std::vector<int>& small) {
        return std::all_of(small.begin(), small.end(), [&](int l) {
            return std::find(big.begin(), big.end(), l) != big.end();
        });
    };
    std::vector<BalancedCertificate> out;
    for (const auto& c : all) {
        bool minimal = true;
        for (const auto& o : all) {
            if (o.subset.size() < c.subset.size() && contains(c.subset, o.subset)) {
                minimal = false;
                break;
            }
        }
        if (minimal) out.push_back(c);
    }
    return out;
}

PointConfig simplex_vertex_config(int n)
{
    require(n >= 2, "simplex configuration needs n >= 2", "n");
    std::vector<RVec> pts{RVec(n - 1)};
    for (int i = 0; i < n - 1; ++i) pts.push_back(unit_vector(n - 1, i));
    return make_config(std::move(pts));
}

std::vector<std::vector<int>> kkms_faces(int k)
{
    require(k >= 1, "KKMS configuration needs k >= 1", "k");
    require(k + 1 <= 20, "KKMS configuration too large", "k");
    std::vector<std::vector<int>> faces;
    for (std::uint32_t mask = 1; mask < (1u << (k + 1)); ++mask) {
        std::vector<int> s;
        for (int i = 0; i <= k; ++i)
            if (mask & (1u << i)) s.push_back(i + 1);
        faces.push_back(std::move(s));
    }
    std::sort(faces.begin(), faces.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return faces;
}

PointConfig kkms_config(int k)
{
    const auto faces = kkms_faces(k);
    const auto corners = simplex_vertex_config(k + 1).points;
    std::vector<RVec> pts;
    std::vector<std::string> names;
    for (const auto& f : faces) {
        std::vector<RVec> members;
        for (int i : f) members.push_back(corners[i - 1]);
        pts.push_back(centroid(members));
        std::ostringstream os;
        os << '{';
        for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
        os << '}';
        names.push_back(os.str());
    }
    return make_config(std::move(pts), {}, std::move(names));
}

PointConfig tucker_config(int n)
{
    require(n >= 1, "Tucker configuration needs n >= 1", "n");
    std::vector<RVec> pts;
    std::vector<int> labels;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) {
        pts.push_back(unit_vector(n, i));
        pts.push_back(unit_vector(n, i) * Rational(-1));
        labels.push_back(i + 1);
        labels.push_back(-(i + 1));
        names.push_back("+" + std::to_string(i + 1));
        names.push_back("-" + std::to_string(i + 1));
    }
    return make_config(std::move(pts), std::move(labels), std::move(names));
}

} // namespace kkm
