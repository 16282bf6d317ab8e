#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kkm {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

/// Exact value of a finite double (every double is a dyadic rational).
Rational from_double(double v);
double to_double(const Rational& r);
int sign(const Rational& r);

/// Dense vector of exact rationals.
class RVec {
public:
    RVec() = default;
    explicit RVec(std::size_t dim) : coords_(dim) {}
    explicit RVec(std::vector<Rational> coords) : coords_(std::move(coords)) {}
    RVec(std::initializer_list<Rational> coords) : coords_(coords) {}

    std::size_t dim() const noexcept { return coords_.size(); }
    Rational& operator[](std::size_t i) { return coords_[i]; }
    const Rational& operator[](std::size_t i) const { return coords_[i]; }
    std::span<const Rational> coords() const noexcept { return coords_; }
    auto begin() const { return coords_.begin(); }
    auto end() const { return coords_.end(); }

    RVec& operator+=(const RVec& o);
    RVec& operator-=(const RVec& o);
    RVec& operator*=(const Rational& s);
    friend RVec operator+(RVec a, const RVec& b) { return a += b; }
    friend RVec operator-(RVec a, const RVec& b) { return a -= b; }
    friend RVec operator*(RVec a, const Rational& s) { return a *= s; }
    friend RVec operator*(const Rational& s, RVec a) { return a *= s; }
    friend bool operator==(const RVec& a, const RVec& b) { return a.coords_ == b.coords_; }
    friend bool operator<(const RVec& a, const RVec& b) { return a.coords_ < b.coords_; }

    Rational dot(const RVec& o) const;
    std::vector<double> to_doubles() const;
    std::string str() const;

private:
    std::vector<Rational> coords_;
};

RVec from_doubles(std::span<const double> v);
RVec unit_vector(std::size_t dim, std::size_t i);

/// Coordinate-wise average of a nonempty list of equal-dimension vectors.
RVec centroid(std::span<const RVec> points);

} // namespace kkm
