#pragma once

#include "kkm/rational.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace kkm {

/// Small dense row-major matrix.  Sizes here never exceed a few dozen.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    void swap_rows(std::size_t a, std::size_t b)
    {
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

namespace detail {

inline bool is_zero(const Rational& v) { return v == 0; }
inline bool is_zero(double v) { return v == 0.0; }
inline double magnitude(double v) { return std::fabs(v); }

// Rationals pivot on the first nonzero entry; doubles on the largest.
template <class T>
std::optional<std::size_t> choose_pivot(const Matrix<T>& m, std::size_t col, std::size_t from)
{
    if constexpr (std::is_same_v<T, double>) {
        std::size_t best = from;
        double best_mag = 0.0;
        for (std::size_t r = from; r < m.rows(); ++r) {
            if (magnitude(m(r, col)) > best_mag) {
                best_mag = magnitude(m(r, col));
                best = r;
            }
        }
        if (best_mag == 0.0) return std::nullopt;
        return best;
    } else {
        for (std::size_t r = from; r < m.rows(); ++r)
            if (!is_zero(m(r, col))) return r;
        return std::nullopt;
    }
}

} // namespace detail

/// Determinant by Gaussian elimination.  Exact for Rational.
template <class T>
T determinant(Matrix<T> m)
{
    const std::size_t n = m.rows();
    T det = T(1);
    for (std::size_t col = 0; col < n; ++col) {
        auto piv = detail::choose_pivot(m, col, col);
        if (!piv) return T(0);
        if (*piv != col) {
            m.swap_rows(*piv, col);
            det = -det;
        }
        det *= m(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (detail::is_zero(m(r, col))) continue;
            T factor = m(r, col) / m(col, col);
            for (std::size_t c = col; c < n; ++c) m(r, c) -= factor * m(col, c);
        }
    }
    return det;
}

/// Solves the square system `a x = b`; absent when `a` is singular.
template <class T>
std::optional<std::vector<T>> solve(Matrix<T> a, std::vector<T> b)
{
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        auto piv = detail::choose_pivot(a, col, col);
        if (!piv) return std::nullopt;
        if (*piv != col) {
            a.swap_rows(*piv, col);
            std::swap(b[*piv], b[col]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || detail::is_zero(a(r, col))) continue;
            T factor = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
            b[r] -= factor * b[col];
        }
    }
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a(i, i);
    return x;
}

/// Rank of a matrix (exact for Rational, tolerance-free pivoting for double).
template <class T>
std::size_t rank(Matrix<T> m)
{
    std::size_t r = 0;
    for (std::size_t col = 0; col < m.cols() && r < m.rows(); ++col) {
        auto piv = detail::choose_pivot(m, col, r);
        if (!piv) continue;
        m.swap_rows(*piv, r);
        for (std::size_t i = r + 1; i < m.rows(); ++i) {
            if (detail::is_zero(m(i, col))) continue;
            T factor = m(i, col) / m(r, col);
            for (std::size_t c = col; c < m.cols(); ++c) m(i, c) -= factor * m(r, c);
        }
        ++r;
    }
    return r;
}

} // namespace kkm
