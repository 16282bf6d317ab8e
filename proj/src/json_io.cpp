#include "kkm/json_io.hpp"

#include "kkm/error.hpp"

#include <limits>

namespace kkm {

namespace {

using boost::multiprecision::mpz_int;

[[noreturn]] void bad(const std::string& path, const std::string& what)
{
    fail(ErrorCode::InputError, path + ": " + what, path);
}

const Json& member(const Json& j, const char* key, const std::string& path)
{
    if (!j.is_object()) bad(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) bad(path + "." + key, "missing");
    return *it;
}

const Json& array_at(const Json& j, const std::string& path)
{
    if (!j.is_array()) bad(path, "expected an array");
    return j;
}

std::string at(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

Json integer_json(const mpz_int& z)
{
    if (z >= std::numeric_limits<std::int64_t>::min() && z <= std::numeric_limits<std::int64_t>::max())
        return Json(z.convert_to<std::int64_t>());
    return Json(z.str());
}

mpz_int integer_from_json(const Json& j, const std::string& path)
{
    if (j.is_number_integer()) return j.is_number_unsigned() ? mpz_int(j.get<std::uint64_t>()) : mpz_int(j.get<std::int64_t>());
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        const std::size_t start = !s.empty() && (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
            bad(path, "not an integer string");
        return mpz_int(s);
    }
    if (j.is_number()) bad(path, "expected an integer; write fractions as [num, den]");
    bad(path, "expected an integer");
}

int int_from_json(const Json& j, const std::string& path)
{
    if (!j.is_number_integer()) bad(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) bad(path, "out of range");
    return static_cast<int>(v);
}

double double_from_json(const Json& j, const std::string& path)
{
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

std::vector<int> ints_from_json(const Json& j, const std::string& path)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(int_from_json(j[i], at(path, i)));
    return out;
}

Json polytope_json(const Polytope& p)
{
    Json rows = Json::array();
    for (const auto& c : p) rows.push_back(to_json(c));
    return rows;
}

} // namespace

Json to_json(const Rational& r)
{
    return Json::array({integer_json(numerator(r)), integer_json(denominator(r))});
}

Rational rational_from_json(const Json& j, const std::string& path)
{
    if (j.is_array()) {
        if (j.size() != 2) bad(path, "expected [num, den]");
        const auto num = integer_from_json(j[0], path + "[0]");
        const auto den = integer_from_json(j[1], path + "[1]");
        if (den == 0) bad(path + "[1]", "zero denominator");
        return Rational(num, den);
    }
    return Rational(integer_from_json(j, path));
}

std::string decimal_string(const Rational& r, int digits)
{
    mpz_int scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const bool neg = r < 0;
    const Rational a = neg ? Rational(-r) : r;
    // Round half up on the magnitude.
    mpz_int q = (numerator(a) * scale * 2 + denominator(a)) / (denominator(a) * 2);
    const mpz_int whole = q / scale;
    std::string out = (neg && q != 0 ? "-" : "") + whole.str();
    if (digits > 0) {
        std::string frac = mpz_int(q % scale).str();
        frac.insert(frac.begin(), static_cast<std::size_t>(digits) - frac.size(), '0');
        out += "." + frac;
    }
    return out;
}

Json to_json(const RVec& v)
{
    Json out = Json::array();
    for (const auto& x : v) out.push_back(to_json(x));
    return out;
}

RVec rvec_from_json(const Json& j, const std::string& path)
{
    std::vector<Rational> out;
    for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(rational_from_json(j[i], at(path, i)));
    return RVec(std::move(out));
}

Json to_json(const Triangulation& t)
{
    Json vertices = Json::array(), cells = Json::array();
    for (const auto& v : t.vertices) vertices.push_back(to_json(v));
    for (const auto& c : t.cells) cells.push_back(c);
    return Json{{"dim", t.dim}, {"vertices", vertices}, {"cells", cells}, {"orientation", t.orientation}};
}

Triangulation triangulation_from_json(const Json& j, const std::string& path)
{
    Triangulation t;
    t.dim = int_from_json(member(j, "dim", path), path + ".dim");
    const auto& vs = array_at(member(j, "vertices", path), path + ".vertices");
    for (std::size_t i = 0; i < vs.size(); ++i) t.vertices.push_back(rvec_from_json(vs[i], at(path + ".vertices", i)));
    const auto& cs = array_at(member(j, "cells", path), path + ".cells");
    for (std::size_t i = 0; i < cs.size(); ++i) t.cells.push_back(ints_from_json(cs[i], at(path + ".cells", i)));
    if (j.contains("orientation")) {
        t.orientation = ints_from_json(j["orientation"], path + ".orientation");
    } else {
        t.orientation.assign(t.cells.size(), 1);
    }
    try {
        validate(t);
    } catch (const Error& e) {
        fail(ErrorCode::InputError, path + ": " + e.what(), e.field().empty() ? path : path + "." + e.field());
    }
    return t;
}

Json to_json(const Labeling& l)
{
    Json labels = Json::object();
    for (std::size_t v = 0; v < l.size(); ++v) labels[std::to_string(v)] = l[v];
    return Json{{"labels", labels}, {"n", l.n}, {"signed", l.is_signed}};
}

Labeling labeling_from_json(const Json& j, std::size_t vertices, const std::string& path)
{
    const auto& obj = member(j, "labels", path);
    const std::string lp = path + ".labels";
    Labeling l;
    l.labels.assign(vertices, 0);
    std::vector<char> seen(vertices, 0);
    const auto set = [&](long v, const Json& value, const std::string& p) {
        if (v < 0 || static_cast<std::size_t>(v) >= vertices) bad(p, "vertex index out of range");
        l.labels[v] = int_from_json(value, p);
        seen[v] = 1;
    };
    if (obj.is_object()) {
        for (const auto& [key, value] : obj.items()) {
            const std::string p = lp + "." + key;
            if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos)
                bad(p, "keys must be vertex indices");
            set(std::stol(key), value, p);
        }
    } else if (obj.is_array()) {
        for (std::size_t v = 0; v < obj.size(); ++v) set(static_cast<long>(v), obj[v], at(lp, v));
    } else {
        bad(lp, "expected an object of vertex -> label");
    }
    for (std::size_t v = 0; v < vertices; ++v)
        if (!seen[v]) bad(lp + "." + std::to_string(v), "missing label");
    int top = 0;
    bool negative = false;
    for (int a : l.labels) {
        top = std::max(top, std::abs(a));
        negative = negative || a < 0;
    }
    l.n = j.contains("n") ? int_from_json(j["n"], path + ".n") : top;
    l.is_signed = j.contains("signed") ? j["signed"].is_boolean() && j["signed"].get<bool>() : negative;
    for (std::size_t v = 0; v < vertices; ++v) {
        const int a = l.labels[v];
        if (a == 0 || std::abs(a) > l.n || (a < 0 && !l.is_signed))
            bad(lp + "." + std::to_string(v), "label outside " + std::string(l.is_signed ? "+-" : "") + "1.." +
                                                  std::to_string(l.n));
    }
    return l;
}

Json to_json(const PointConfig& v)
{
    Json points = Json::array();
    for (const auto& p : v.points) points.push_back(to_json(p));
    Json out{{"points", points}, {"labels", v.labels}};
    if (!v.names.empty()) out["names"] = v.names;
    out["center"] = to_json(v.center);
    return out;
}

PointConfig point_config_from_json(const Json& j, const std::string& path)
{
    const auto& ps = array_at(member(j, "points", path), path + ".points");
    if (ps.empty()) bad(path + ".points", "empty configuration");
    std::vector<RVec> points;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        points.push_back(rvec_from_json(ps[i], at(path + ".points", i)));
        if (points.back().dim() != points.front().dim()) bad(at(path + ".points", i), "dimension mismatch");
    }
    std::vector<int> labels;
    if (j.contains("labels")) {
        labels = ints_from_json(j["labels"], path + ".labels");
        if (labels.size() != points.size()) bad(path + ".labels", "one label per point");
    }
    std::vector<std::string> names;
    if (j.contains("names")) {
        const auto& ns = array_at(j["names"], path + ".names");
        if (ns.size() != points.size()) bad(path + ".names", "one name per point");
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (!ns[i].is_string()) bad(at(path + ".names", i), "expected a string");
            names.push_back(ns[i].get<std::string>());
        }
    }
    return make_config(std::move(points), std::move(labels), std::move(names));
}

Json to_json(const LinearConstraint& c)
{
    return Json{{"normal", to_json(c.normal)}, {"offset", to_json(c.offset)}};
}

LinearConstraint constraint_from_json(const Json& j, const std::string& path)
{
    return LinearConstraint{rvec_from_json(member(j, "normal", path), path + ".normal"),
                            rational_from_json(member(j, "offset", path), path + ".offset")};
}

Json to_json(const Cover& c)
{
    Json sets = Json::array();
    bool any_open = false;
    for (const auto& s : c.sets) any_open = any_open || s.kind == SetKind::Open;
    for (const auto& s : c.sets) {
        if (s.polytopes.empty()) fail(ErrorCode::InputError, "set '" + s.name + "' is a callback and has no JSON form", "sets");
        Json polys = Json::array();
        for (const auto& p : s.polytopes) polys.push_back(polytope_json(p));
        Json entry{{"name", s.name}, {"polytopes", polys}};
        if ((s.kind == SetKind::Open) != any_open) entry["kind"] = s.kind == SetKind::Open ? "open" : "closed";
        sets.push_back(entry);
    }
    return Json{{"domain", to_json(c.domain)}, {"kind", any_open ? "open" : "closed"}, {"sets", sets}};
}

namespace {

SetKind kind_from_json(const Json& j, const std::string& path)
{
    if (j == "closed") return SetKind::Closed;
    if (j == "open") return SetKind::Open;
    bad(path, "expected \"closed\" or \"open\"");
}

} // namespace

Cover cover_from_json(const Json& j, const std::string& path, const Triangulation* default_domain)
{
    Cover c;
    if (j.is_object() && j.contains("domain")) {
        c.domain = triangulation_from_json(j["domain"], path + ".domain");
    } else if (default_domain) {
        c.domain = *default_domain;
    } else {
        member(j, "domain", path);
    }
    const SetKind kind = j.contains("kind") ? kind_from_json(j["kind"], path + ".kind") : SetKind::Closed;
    const auto& sets = array_at(member(j, "sets", path), path + ".sets");
    if (sets.empty()) bad(path + ".sets", "a cover needs at least one set");
    const std::size_t dim = c.domain.ambient_dim();
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const std::string sp = at(path + ".sets", s);
        CoverSet set;
        set.name = sets[s].contains("name") && sets[s]["name"].is_string() ? sets[s]["name"].get<std::string>()
                                                                           : std::to_string(s + 1);
        set.kind = sets[s].contains("kind") ? kind_from_json(sets[s]["kind"], sp + ".kind") : kind;
        const auto& polys = array_at(member(sets[s], "polytopes", sp), sp + ".polytopes");
        if (polys.empty()) bad(sp + ".polytopes", "a set needs at least one polytope");
        for (std::size_t p = 0; p < polys.size(); ++p) {
            const std::string pp = at(sp + ".polytopes", p);
            Polytope poly;
            for (std::size_t r = 0; r < array_at(polys[p], pp).size(); ++r) {
                poly.push_back(constraint_from_json(polys[p][r], at(pp, r)));
                if (poly.back().normal.dim() != dim) bad(at(pp, r) + ".normal", "dimension does not match the domain");
            }
            set.polytopes.push_back(std::move(poly));
        }
        c.sets.push_back(std::move(set));
    }
    return c;
}

Json to_json(const GaleInstance& g)
{
    Json covers = Json::array();
    for (const auto& c : g.covers) {
        Json cj = to_json(c);
        cj.erase("domain");
        covers.push_back(cj);
    }
    return Json{{"domain", to_json(g.domain)}, {"covers", covers}};
}

GaleInstance gale_instance_from_json(const Json& j, const std::string& path)
{
    GaleInstance g;
    g.domain = triangulation_from_json(member(j, "domain", path), path + ".domain");
    const auto& cs = array_at(member(j, "covers", path), path + ".covers");
    for (std::size_t i = 0; i < cs.size(); ++i) g.covers.push_back(cover_from_json(cs[i], at(path + ".covers", i), &g.domain));
    try {
        validate(g);
    } catch (const Error& e) {
        fail(ErrorCode::InputError, path + ": " + e.what(), path + "." + e.field());
    }
    return g;
}

Json to_json(const DegreeReport& r)
{
    Json cells = Json::array();
    for (const auto& c : r.cells) cells.push_back(Json{{"index", c.index}, {"sign", c.sign}});
    Json out{{"degree", r.degree}, {"cells", cells}};
    if (!r.regular_value.empty()) out["regular_value"] = r.regular_value;
    return out;
}

Json to_json(const SpernerReport& r)
{
    Json vs = Json::array();
    for (const auto& v : r.violations) vs.push_back(Json{{"vertex", v.vertex}, {"label", v.label}, {"face", v.face}});
    return Json{{"ok", r.ok}, {"violations", vs}};
}

Json to_json(const WitnessReport& r)
{
    Json out{{"cells", r.cells}, {"count", r.cells.size()}};
    out["boundary_degree"] = r.boundary_degree ? Json(*r.boundary_degree) : Json(nullptr);
    return out;
}

Json to_json(const ComplementaryReport& r)
{
    Json edges = Json::array();
    std::size_t internal = 0;
    for (const auto& e : r.edges) {
        edges.push_back(Json{{"u", e.u}, {"w", e.w}, {"internal", e.internal}});
        internal += e.internal;
    }
    Json out{{"edges", edges}, {"internal", internal}, {"antipodal_boundary", r.antipodal_boundary}};
    out["boundary_degree"] = r.boundary_degree ? Json(*r.boundary_degree) : Json(nullptr);
    return out;
}

Json to_json(const BalancedCertificate& c, const PointConfig& v)
{
    Json names = Json::array(), coeffs = Json::array();
    for (std::size_t i = 0; i < c.subset.size(); ++i) {
        const int idx = v.index_of(c.subset[i]);
        names.push_back(idx >= 0 && static_cast<std::size_t>(idx) < v.names.size() ? v.names[idx]
                                                                                   : std::to_string(c.subset[i]));
        coeffs.push_back(to_json(c.coefficients[i]));
    }
    return Json{{"subset", c.subset}, {"names", names}, {"coefficients", coeffs}};
}

Json to_json(const MuReport& r)
{
    Json out = to_json(r.report);
    out["level_degrees"] = r.level_degrees;
    out["stable"] = r.stable;
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

Json to_json(const KkmReport& r)
{
    Json vs = Json::array();
    for (const auto& v : r.violations) vs.push_back(Json{{"point", to_json(v.point)}, {"face", v.face}});
    return Json{{"ok", r.ok}, {"samples", r.samples}, {"violations", vs}};
}

Json to_json(const CommonPoint& c)
{
    return Json{{"point", c.point}, {"subset", c.subset}, {"gaps", c.gaps}, {"nodes", c.nodes}};
}

Json to_json(const GaleSolution& s)
{
    return Json{{"p", s.p},
                {"matrix", s.matrix},
                {"permutation", s.permutation},
                {"gaps", s.gaps},
                {"point", to_json(s.point)},
                {"tau", s.tau},
                {"eps_pou", s.eps_pou},
                {"residual", s.residual},
                {"boundary_degree", s.boundary_degree},
                {"nodes", s.nodes}};
}

Json to_json(const ConditionReport& r)
{
    Json vs = Json::array();
    for (const auto& v : r.violations)
        vs.push_back(Json{{"condition", v.condition}, {"agent", v.agent}, {"point", to_json(v.point)}});
    return Json{{"c1", r.c1}, {"c2", r.c2}, {"samples", r.samples}, {"violations", vs}};
}

Json prices_json(const RVec& prices)
{
    Json dec = Json::array();
    for (const auto& x : prices) dec.push_back(decimal_string(x));
    return Json{{"exact", to_json(prices)}, {"decimal", dec}};
}

Json to_json(const DivisionCertificate& c)
{
    Json out{{"prices", prices_json(c.prices)}, {"assignment", c.assignment}};
    out["envy_gaps"] = c.envy_gaps.empty() ? Json(nullptr) : Json(c.envy_gaps);
    out["eps"] = c.eps;
    out["cell_diameter"] = c.cell_diameter;
    out["queries"] = c.queries;
    out["boundary_degree"] = c.boundary_degree;
    return out;
}

Json error_json(const Error& e)
{
    Json err{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (!e.field().empty()) err["field"] = e.field();
    return Json{{"error", err}};
}

std::vector<double> doubles_from_json(const Json& j, const std::string& path)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(double_from_json(j[i], at(path, i)));
    return out;
}

RealMatrix matrix_from_json(const Json& j, const std::string& path)
{
    RealMatrix out;
    for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(doubles_from_json(j[i], at(path, i)));
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].size() != out.size()) bad(at(path, i), "expected a square matrix");
    return out;
}

} // namespace kkm
