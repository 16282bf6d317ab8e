#include "kkm/rational.hpp"

#include "kkm/error.hpp"

#include <cmath>
#include <sstream>

namespace kkm {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InputError: return "INPUT_ERROR";
    case ErrorCode::StructuralError: return "STRUCTURAL_ERROR";
    case ErrorCode::FullyLabeledOnDomain: return "FULLY_LABELED_ON_DOMAIN";
    case ErrorCode::BlOnDomain: return "BL_ON_DOMAIN";
    case ErrorCode::CoverViolation: return "COVER_VIOLATION";
    case ErrorCode::ZeroDenominator: return "ZERO_DENOMINATOR";
    case ErrorCode::NullHomotopyUndefined: return "NULL_HOMOTOPY_UNDEFINED";
    case ErrorCode::NotFoundAtResolution: return "NOT_FOUND_AT_RESOLUTION";
    case ErrorCode::DegreeVanished: return "DEGREE_VANISHED";
    case ErrorCode::NoPerfectMatching: return "NO_PERFECT_MATCHING";
    case ErrorCode::VerificationFailed: return "VERIFICATION_FAILED";
    case ErrorCode::EmptyDomain: return "EMPTY_DOMAIN";
    case ErrorCode::A2DegreeZero: return "A2_DEGREE_ZERO";
    case ErrorCode::SizeGuard: return "SIZE_GUARD";
    case ErrorCode::InternalError: return "INTERNAL_ERROR";
    }
    return "UNKNOWN";
}

Rational from_double(double v)
{
    if (!std::isfinite(v)) fail(ErrorCode::InputError, "non-finite coordinate");
    int exp = 0;
    double mant = std::frexp(v, &exp);
    // 53 mantissa bits fit exactly in an int64 after scaling.
    auto m = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r{Integer(m)};
    if (exp > 0) r *= Rational(Integer(1) << exp);
    else if (exp < 0) r /= Rational(Integer(1) << -exp);
    return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

int sign(const Rational& r) { return r.sign(); }

RVec& RVec::operator+=(const RVec& o)
{
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
}

RVec& RVec::operator-=(const RVec& o)
{
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
}

RVec& RVec::operator*=(const Rational& s)
{
    for (auto& c : coords_) c *= s;
    return *this;
}

Rational RVec::dot(const RVec& o) const
{
    Rational acc = 0;
    for (std::size_t i = 0; i < coords_.size(); ++i) acc += coords_[i] * o.coords_[i];
    return acc;
}

std::vector<double> RVec::to_doubles() const
{
    std::vector<double> out;
    out.reserve(coords_.size());
    for (const auto& c : coords_) out.push_back(to_double(c));
    return out;
}

std::string RVec::str() const
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (i) os << ", ";
        os << coords_[i];
    }
    os << ')';
    return os.str();
}

RVec from_doubles(std::span<const double> v)
{
    std::vector<Rational> c;
    c.reserve(v.size());
    for (double x : v) c.push_back(from_double(x));
    return RVec(std::move(c));
}

RVec unit_vector(std::size_t dim, std::size_t i)
{
    RVec v(dim);
    v[i] = 1;
    return v;
}

RVec centroid(std::span<const RVec> points)
{
    require(!points.empty(), "centroid of an empty point set");
    RVec c(points.front().dim());
    for (const auto& p : points) {
        require(p.dim() == c.dim(), "dimension mismatch in point set");
        c += p;
    }
    c *= Rational(1, static_cast<long>(points.size()));
    return c;
}

} // namespace kkm
