#pragma once

#include "kkm/geometry.hpp"

#include <optional>
#include <span>
#include <vector>

namespace kkm {

/// A subset B of the configuration labels together with weights lambda >= 0,
/// sum lambda = 1, sum lambda_i v_i = c_V.
struct BalancedCertificate {
    std::vector<int> subset;
    std::vector<Rational> coefficients;
};

std::optional<BalancedCertificate> is_balanced(std::span<const int> subset, const PointConfig& v);

/// Re-checks the reconstruction identity exactly.
bool verify_certificate(const BalancedCertificate& cert, const PointConfig& v);

inline constexpr std::size_t kMaxEnumeratedPoints = 24;

/// Every balanced subset with at most `max_size` labels, ordered by size and
/// then lexicographically by point index.
std::vector<BalancedCertificate> enumerate_balanced(const PointConfig& v, int max_size);

/// Inclusion-minimal members of an enumeration.
std::vector<BalancedCertificate> minimal_balanced(const std::vector<BalancedCertificate>& all);

/// Vert(Delta^{n-1}) realised in R^{n-1} as {0, e_1, ..., e_{n-1}} (labels
/// 1..n), a positively oriented simplex.
PointConfig simplex_vertex_config(int n);

/// The 2^{k+1} - 1 face centers of a k-simplex in R^k, one per nonempty
/// sigma of {1..k+1}, ordered by size then lexicographically.  Labels are
/// 1..m in that order and names spell sigma, e.g. "{1,3}".
PointConfig kkms_config(int k);

/// The faces sigma of kkms_config(k) in label order (1-based members).
std::vector<std::vector<int>> kkms_faces(int k);

/// {+e_1, -e_1, ..., +e_n, -e_n} labelled +1, -1, ..., +n, -n.
PointConfig tucker_config(int n);

} // namespace kkm
