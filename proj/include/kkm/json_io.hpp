#pragma once

#include "kkm/balanced.hpp"
#include "kkm/covers.hpp"
#include "kkm/degrees.hpp"
#include "kkm/error.hpp"
#include "kkm/gale.hpp"
#include "kkm/harmony.hpp"

#include <json.hpp>

#include <string>

namespace kkm {

using Json = nlohmann::ordered_json;

// Parsers throw InputError naming the offending field by its JSON path.

/// [num, den]; members are strings when they do not fit in 64 bits.
Json to_json(const Rational& r);
Rational rational_from_json(const Json& j, const std::string& path);

/// Decimal expansion rounded half-up to `digits` places.
std::string decimal_string(const Rational& r, int digits = 12);

Json to_json(const RVec& v);
RVec rvec_from_json(const Json& j, const std::string& path);

Json to_json(const Triangulation& t);
Triangulation triangulation_from_json(const Json& j, const std::string& path);

/// {"labels": {"<vertex>": label}}; `n` is taken from "n" when present,
/// otherwise from the largest |label|.
Json to_json(const Labeling& l);
Labeling labeling_from_json(const Json& j, std::size_t vertices, const std::string& path);

Json to_json(const PointConfig& v);
PointConfig point_config_from_json(const Json& j, const std::string& path);

Json to_json(const Cover& c);
/// `domain` may be omitted when a default is supplied.
Cover cover_from_json(const Json& j, const std::string& path, const Triangulation* default_domain = nullptr);

Json to_json(const LinearConstraint& c);
LinearConstraint constraint_from_json(const Json& j, const std::string& path);

/// {"domain": triangulation, "covers": [cover without domain...]}.
Json to_json(const GaleInstance& g);
GaleInstance gale_instance_from_json(const Json& j, const std::string& path);

Json to_json(const DegreeReport& r);
Json to_json(const SpernerReport& r);
Json to_json(const WitnessReport& r);
Json to_json(const ComplementaryReport& r);
Json to_json(const BalancedCertificate& c, const PointConfig& v);
Json to_json(const MuReport& r);
Json to_json(const KkmReport& r);
Json to_json(const CommonPoint& c);
Json to_json(const GaleSolution& s);
Json to_json(const ConditionReport& r);
Json to_json(const DivisionCertificate& c);

/// The exact point with a decimal rendering next to it.
Json prices_json(const RVec& prices);

Json error_json(const Error& e);

std::vector<double> doubles_from_json(const Json& j, const std::string& path);
RealMatrix matrix_from_json(const Json& j, const std::string& path);

} // namespace kkm
