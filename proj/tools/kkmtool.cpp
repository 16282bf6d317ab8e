// kkmtool: command-line front end.  JSON on stdout, diagnostics on stderr.
// Exit codes: 0 success, 1 verification failure or negative search outcome,
// 2 input error.

#include "kkm/balanced.hpp"
#include "kkm/covers.hpp"
#include "kkm/degrees.hpp"
#include "kkm/error.hpp"
#include "kkm/gale.hpp"
#include "kkm/harmony.hpp"
#include "kkm/json_io.hpp"
#include "kkm/service.hpp"
#include "kkm/session.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace kkm;

namespace {

struct Common {
    double eps = 1e-6;
    int resolution = 16;
    std::uint64_t seed = 1;
    std::string out;
};

Json read_json(const std::string& path, const std::string& field)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InputError, "cannot open " + path, field);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        fail(ErrorCode::InputError, path + ": " + e.what(), field);
    }
}

// A file path, or inline JSON when the argument starts with '[' or '{'.
Json json_arg(const std::string& arg, const std::string& field)
{
    if (!arg.empty() && (arg.front() == '[' || arg.front() == '{')) {
        try {
            return Json::parse(arg);
        } catch (const Json::exception& e) {
            fail(ErrorCode::InputError, std::string("inline JSON: ") + e.what(), field);
        }
    }
    return read_json(arg, field);
}

struct LabeledInput {
    Triangulation t;
    Labeling l;
};

// The labeling document may carry its triangulation under "triangulation".
LabeledInput labeled_input(const std::string& tri_path, const std::string& lab_path)
{
    const Json lab = json_arg(lab_path, "labeling");
    LabeledInput in;
    if (!tri_path.empty()) {
        in.t = triangulation_from_json(json_arg(tri_path, "triangulation"), "triangulation");
    } else if (lab.is_object() && lab.contains("triangulation")) {
        in.t = triangulation_from_json(lab["triangulation"], "labeling.triangulation");
    } else {
        fail(ErrorCode::InputError, "--triangulation is required unless the labeling embeds one", "triangulation");
    }
    in.l = labeling_from_json(lab, in.t.vertices.size(), "labeling");
    return in;
}

PointConfig config_arg(const std::string& arg, int n)
{
    if (arg == "tucker" || arg == "kkms" || arg == "simplex") {
        if (n < 1) fail(ErrorCode::InputError, "--n must be positive for --config " + arg, "n");
        if (arg == "tucker") return tucker_config(n);
        if (arg == "kkms") return kkms_config(n);
        return simplex_vertex_config(n);
    }
    return point_config_from_json(json_arg(arg, "config"), "config");
}

std::vector<int> int_list(const std::string& s, const std::string& field)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail(ErrorCode::InputError, "expected a comma-separated list of integers", field);
        }
    }
    if (out.empty()) fail(ErrorCode::InputError, "empty list", field);
    return out;
}

void emit(const Json& payload, const Common& common)
{
    const std::string text = payload.dump(2);
    std::cout << text << '\n';
    if (!common.out.empty()) {
        std::ofstream f(common.out);
        f << text << '\n';
        if (!f) fail(ErrorCode::InputError, "cannot write " + common.out, "out");
    }
}

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InputError:
    case ErrorCode::StructuralError:
    case ErrorCode::EmptyDomain:
    case ErrorCode::SizeGuard:
        return 2;
    default:
        return 1;
    }
}

// ---- figure -------------------------------------------------------------

std::string svg_figure(const Triangulation& t, const Labeling& l, const std::vector<int>& highlight)
{
    static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    const auto colour = [&](int label) { return palette[(std::abs(label) - 1) % 6]; };
    std::vector<std::pair<double, double>> xy;
    const double pi = std::acos(-1.0);
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        const auto p = t.vertices[v].to_doubles();
        if (t.dim == 1) {
            const double a = 2 * pi * static_cast<double>(v) / static_cast<double>(t.vertices.size());
            xy.emplace_back(std::cos(a), std::sin(a));
        } else if (p.size() == 3) {
            xy.emplace_back(p[1] + p[2] / 2, p[2] * std::sqrt(3.0) / 2);
        } else if (p.size() >= 2) {
            xy.emplace_back(p[0], p[1]);
        } else {
            fail(ErrorCode::InputError, "figure needs a 1- or 2-dimensional triangulation", "triangulation");
        }
    }
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (auto [x, y] : xy) {
        x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    const double size = 480, margin = 24;
    const double scale = (size - 2 * margin) / std::max({x1 - x0, y1 - y0, 1e-12});
    const auto px = [&](std::size_t v) {
        std::ostringstream s;
        s << margin + (xy[v].first - x0) * scale << ',' << size - margin - (xy[v].second - y0) * scale;
        return s.str();
    };
    std::vector<char> hot(t.cells.size(), 0);
    for (int c : highlight) hot[c] = 1;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
        svg << "<polygon points=\"";
        for (int v : t.cells[c]) svg << px(v) << ' ';
        svg << "\" fill=\"" << (hot[c] ? "#ffe08a" : "none") << "\" stroke=\"" << (hot[c] ? "#b8860b" : "#999")
            << "\" stroke-width=\"" << (hot[c] ? 2 : 1) << "\"/>\n";
    }
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        const auto pos = px(v);
        const auto comma = pos.find(',');
        svg << "<circle cx=\"" << pos.substr(0, comma) << "\" cy=\"" << pos.substr(comma + 1) << "\" r=\"5\" fill=\""
            << colour(l[v]) << "\"><title>" << v << ": " << l[v] << "</title></circle>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Degree, KKM, balanced-set and rental-harmony computations"};
    app.require_subcommand(1);
    Common common;
    const auto add_common = [&](CLI::App* cmd) {
        auto* eps = cmd->add_option("--eps", common.eps, "Tolerance (default 1e-6; rent: 1e-4)");
        cmd->add_option("--resolution", common.resolution, "Lattice resolution");
        cmd->add_option("--seed", common.seed, "Seed for generated inputs");
        cmd->add_option("--out", common.out, "Also write the output here");
        return eps;
    };

    std::string tri, lab, config, cover_path, boundary_path, subset, instance_path, solution_path, utilities,
        constraints_path, log_path, data_dir, static_dir, host = "127.0.0.1";
    int omitted = 0, n = 0, levels = 2, max_size = 0, port = 8080;
    double eps_pou = -1;
    bool minimal = false;

    std::function<Json()> action;
    std::function<int(const Json&)> status = [](const Json&) { return 0; };

    auto* degree = app.add_subcommand("degree", "Degree of a labeling on a closed complex");
    add_common(degree);
    degree->add_option("--triangulation", tri);
    degree->add_option("--labeling", lab)->required();
    degree->add_option("--omitted", omitted, "Omitted label (default n)");
    degree->add_option("--config", config, "Point configuration (V-degree)");
    degree->add_option("--n", n);
    degree->callback([&] {
        action = [&] {
            const auto in = labeled_input(tri, lab);
            if (!config.empty()) return to_json(degree_labeling_V(in.t, in.l, config_arg(config, n)));
            return to_json(degree_labeling(in.t, in.l, omitted));
        };
    });

    auto* sperner = app.add_subcommand("sperner-check", "Sperner boundary condition");
    add_common(sperner);
    sperner->add_option("--triangulation", tri);
    sperner->add_option("--labeling", lab)->required();
    sperner->callback([&] {
        action = [&] {
            const auto in = labeled_input(tri, lab);
            return to_json(check_sperner(in.t, in.l));
        };
        status = [](const Json& j) { return j["ok"].get<bool>() ? 0 : 1; };
    });

    auto* fully = app.add_subcommand("fully-labeled", "Fully labeled cells with the boundary-degree bound");
    add_common(fully);
    fully->add_option("--triangulation", tri);
    fully->add_option("--labeling", lab)->required();
    fully->callback([&] {
        action = [&] {
            const auto in = labeled_input(tri, lab);
            return to_json(find_fully_labeled(in.t, in.l));
        };
    });

    auto* bl = app.add_subcommand("bl-simplices", "Cells whose label points are balanced");
    add_common(bl);
    bl->add_option("--triangulation", tri);
    bl->add_option("--labeling", lab)->required();
    bl->add_option("--config", config, "tucker | kkms | simplex | file")->required();
    bl->add_option("--n", n);
    bl->callback([&] {
        action = [&] {
            const auto in = labeled_input(tri, lab);
            return to_json(find_bl_simplices(in.t, in.l, config_arg(config, n)));
        };
    });

    auto* comp = app.add_subcommand("complementary-edges", "Tucker complementary edges");
    add_common(comp);
    comp->add_option("--triangulation", tri);
    comp->add_option("--labeling", lab)->required();
    comp->callback([&] {
        action = [&] {
            const auto in = labeled_input(tri, lab);
            return to_json(find_complementary_edges(in.t, in.l));
        };
    });

    auto* mu = app.add_subcommand("mu-cover", "Degree of a cover on a boundary complex");
    add_common(mu);
    mu->add_option("--cover", cover_path)->required();
    mu->add_option("--boundary", boundary_path, "Closed complex (default: boundary of the cover domain)");
    mu->add_option("--levels", levels, "Barycentric refinement levels");
    mu->add_option("--eps-pou", eps_pou, "Partition-of-unity smoothing");
    mu->add_option("--config", config);
    mu->add_option("--n", n);
    mu->callback([&] {
        action = [&] {
            const auto cover = cover_from_json(json_arg(cover_path, "cover"), "cover");
            const auto a = boundary_path.empty() ? boundary(cover.domain)
                                                 : triangulation_from_json(json_arg(boundary_path, "boundary"), "boundary");
            std::optional<PointConfig> v;
            if (!config.empty()) v = config_arg(config, n);
            return to_json(mu_cover(cover, a, v, levels, eps_pou > 0 ? eps_pou : kDefaultEpsPou));
        };
    });

    auto* kkm = app.add_subcommand("kkm-check", "KKM face condition on the lattice of the simplex");
    add_common(kkm);
    kkm->add_option("--cover", cover_path)->required();
    kkm->callback([&] {
        action = [&] {
            return to_json(validate_kkm(cover_from_json(json_arg(cover_path, "cover"), "cover"), common.resolution));
        };
        status = [](const Json& j) { return j["ok"].get<bool>() ? 0 : 1; };
    });

    auto* common_point = app.add_subcommand("common-point", "Point within eps of every set of a subset");
    add_common(common_point);
    common_point->add_option("--cover", cover_path)->required();
    common_point->add_option("--subset", subset, "1-based set indices, e.g. 1,2,3")->required();
    common_point->callback([&] {
        action = [&] {
            const auto cover = cover_from_json(json_arg(cover_path, "cover"), "cover");
            return to_json(common_point_search(cover, int_list(subset, "subset"), common.eps));
        };
    });

    auto* balanced = app.add_subcommand("balanced", "Balanced collections");
    balanced->require_subcommand(1);
    auto* bal_is = balanced->add_subcommand("is", "Is a label subset balanced?");
    add_common(bal_is);
    bal_is->add_option("--config", config, "tucker | kkms | simplex | file")->required();
    bal_is->add_option("--n", n);
    bal_is->add_option("--subset", subset, "Labels, e.g. 1,-1")->required();
    bal_is->callback([&] {
        action = [&] {
            const auto v = config_arg(config, n);
            const auto labels = int_list(subset, "subset");
            for (int a : labels)
                if (v.index_of(a) < 0) fail(ErrorCode::InputError, "label " + std::to_string(a) + " not in config", "subset");
            const auto cert = is_balanced(labels, v);
            Json out{{"balanced", cert.has_value()}};
            if (cert) out["certificate"] = to_json(*cert, v);
            return out;
        };
    });
    auto* bal_enum = balanced->add_subcommand("enumerate", "All (or minimal) balanced subsets");
    add_common(bal_enum);
    bal_enum->add_option("--config", config, "tucker | kkms | simplex | file")->required();
    bal_enum->add_option("--n", n);
    bal_enum->add_option("--max-size", max_size, "Largest subset size (default all)");
    bal_enum->add_flag("--minimal", minimal, "Inclusion-minimal collections only");
    bal_enum->callback([&] {
        action = [&] {
            const auto v = config_arg(config, n);
            auto all = enumerate_balanced(v, max_size > 0 ? max_size : static_cast<int>(v.size()));
            if (minimal) all = minimal_balanced(all);
            Json list = Json::array();
            for (const auto& c : all) list.push_back(to_json(c, v));
            return Json{{"count", all.size()}, {"collections", list}};
        };
    });

    auto* gale = app.add_subcommand("gale", "n covers, one permutation");
    gale->require_subcommand(1);
    auto* gale_solve_cmd = gale->add_subcommand("solve", "Solve a Gale instance");
    add_common(gale_solve_cmd);
    gale_solve_cmd->add_option("--instance", instance_path)->required();
    gale_solve_cmd->add_option("--eps-pou", eps_pou, "Partition-of-unity smoothing (default eps/2)");
    gale_solve_cmd->callback([&] {
        action = [&] {
            const auto g = gale_instance_from_json(json_arg(instance_path, "instance"), "instance");
            GaleOptions opt;
            opt.eps = common.eps;
            if (eps_pou > 0) opt.eps_pou = eps_pou;
            return to_json(gale_solve(g, opt));
        };
    });
    auto* gale_verify = gale->add_subcommand("verify", "Re-check a solution against the covers");
    add_common(gale_verify);
    gale_verify->add_option("--instance", instance_path)->required();
    gale_verify->add_option("--solution", solution_path)->required();
    gale_verify->callback([&] {
        action = [&] {
            const auto g = gale_instance_from_json(json_arg(instance_path, "instance"), "instance");
            const auto s = json_arg(solution_path, "solution");
            if (!s.is_object() || !s.contains("p") || !s.contains("permutation"))
                fail(ErrorCode::InputError, "solution needs p and permutation", "solution");
            const auto p = doubles_from_json(s["p"], "solution.p");
            std::vector<int> perm;
            for (const auto& v : s["permutation"]) {
                if (!v.is_number_integer()) fail(ErrorCode::InputError, "permutation entries must be integers", "solution.permutation");
                perm.push_back(v.get<int>());
            }
            std::vector<double> gaps;
            const bool ok = verify_gale(g, p, perm, common.eps, &gaps);
            return Json{{"ok", ok}, {"gaps", gaps}};
        };
        status = [](const Json& j) { return j["ok"].get<bool>() ? 0 : 1; };
    });

    auto* rent = app.add_subcommand("rent", "Rental harmony");
    rent->require_subcommand(1);
    const auto utilities_of = [&](std::size_t agents) {
        if (utilities.empty()) {
            if (agents == 0) fail(ErrorCode::InputError, "--utilities or --n is required", "utilities");
            std::mt19937_64 rng(common.seed);
            std::uniform_int_distribution<int> d(0, 100);
            RealMatrix u(agents, std::vector<double>(agents));
            for (auto& row : u)
                for (double& x : row) x = d(rng) / (100.0 * static_cast<double>(agents + 1));
            return u;
        }
        return matrix_from_json(json_arg(utilities, "utilities"), "utilities");
    };
    const auto constraints_of = [&] {
        std::vector<LinearConstraint> cs;
        if (constraints_path.empty()) return cs;
        const auto j = json_arg(constraints_path, "constraints");
        if (!j.is_array()) fail(ErrorCode::InputError, "expected an array of {normal, offset}", "constraints");
        for (std::size_t i = 0; i < j.size(); ++i)
            cs.push_back(constraint_from_json(j[i], "constraints[" + std::to_string(i) + "]"));
        return cs;
    };
    auto* rent_solve = rent->add_subcommand("solve", "Solve for simulated housemates");
    auto* rent_solve_eps = add_common(rent_solve);
    rent_solve->add_option("--utilities", utilities, "n x n matrix (file or inline JSON)");
    rent_solve->add_option("--n", n, "Random utilities from --seed when no matrix is given");
    rent_solve->add_option("--constraints", constraints_path, "Linear constraints on prices");
    rent_solve->callback([&] {
        if (rent_solve_eps->count() == 0) common.eps = RentalOptions{}.eps;
        action = [&] {
            const auto u = utilities_of(static_cast<std::size_t>(std::max(n, 0)));
            const auto cs = constraints_of();
            RentalOptions opt;
            opt.eps = common.eps;
            const auto cert = solve_rental(u.size(), simulated_oracle(u), opt, cs, &u);
            Json out = to_json(cert);
            out["verified"] = verify_certificate(cert, u.size(), &u, common.eps);
            return out;
        };
        status = [](const Json& j) { return j["verified"].get<bool>() ? 0 : 1; };
    });
    auto* rent_sim = rent->add_subcommand("simulate", "Drive an interactive session with simulated answers");
    auto* rent_sim_eps = add_common(rent_sim);
    rent_sim->add_option("--utilities", utilities, "n x n matrix (file or inline JSON)");
    rent_sim->add_option("--n", n, "Random utilities from --seed when no matrix is given");
    rent_sim->add_option("--log", log_path, "Write the session event log here");
    rent_sim->callback([&] {
        if (rent_sim_eps->count() == 0) common.eps = RentalOptions{}.eps;
        action = [&] {
            const auto u = utilities_of(static_cast<std::size_t>(std::max(n, 0)));
            SessionConfig c;
            c.n = u.size();
            for (std::size_t i = 0; i < c.n; ++i) c.room_names.push_back("Room " + std::to_string(i + 1));
            c.eps = common.eps;
            if (!log_path.empty()) std::filesystem::remove(log_path);
            std::optional<std::filesystem::path> log;
            if (!log_path.empty()) log = log_path;
            Session s("sim", c, log);
            while (const auto q = s.pending())
                s.answer(Json{{"agent", q->agent}, {"rooms", simulated_answer(u, q->agent, q->prices.to_doubles())},
                              {"query", q->seq}});
            const auto result = s.result();
            const auto replayed = Session::replay(log ? Session::read_log(*log) : s.events())->result();
            Json out{{"result", *result}, {"queries", s.state()["answers"].size()}};
            out["replay_identical"] = replayed && replayed->dump() == result->dump();
            if (result->contains("assignment")) {
                DivisionCertificate cert;
                cert.prices = rvec_from_json((*result)["prices"]["exact"], "prices");
                cert.assignment = (*result)["assignment"].get<std::vector<int>>();
                out["envy_gaps"] = envy_gaps(u, cert.prices.to_doubles(), cert.assignment);
                out["verified"] = verify_certificate(cert, u.size(), &u, common.eps);
            } else {
                out["verified"] = false;
            }
            return out;
        };
        status = [](const Json& j) { return j["replay_identical"].get<bool>() && j["verified"].get<bool>() ? 0 : 1; };
    });
    auto* serve_cmd = rent->add_subcommand("serve", "HTTP session service");
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--data-dir", data_dir, "Session logs (JSON lines)");
    serve_cmd->add_option("--static", static_dir, "UI bundle served at /");
    serve_cmd->callback([&] {
        action = [&]() -> Json {
            std::optional<std::filesystem::path> dir;
            if (!data_dir.empty()) dir = data_dir;
            SessionStore store(dir);
            ServiceOptions opt;
            if (!static_dir.empty()) opt.static_dir = static_dir;
            std::cerr << "listening on " << host << ':' << port << '\n';
            if (!serve(host, port, store, opt)) fail(ErrorCode::InputError, "cannot listen on port " + std::to_string(port), "port");
            return Json{{"stopped", true}};
        };
    });

    auto* figure = app.add_subcommand("figure", "SVG of a labeled triangulation, fully labeled cells highlighted");
    add_common(figure);
    figure->add_option("--triangulation", tri);
    figure->add_option("--labeling", lab)->required();
    figure->add_option("--svg", solution_path, "SVG path")->required();
    figure->callback([&] {
        action = [&] {
            const auto in = labeled_input(tri, lab);
            std::vector<int> hot;
            if (in.t.dim == 2) hot = find_fully_labeled(in.t, in.l).cells;
            std::ofstream f(solution_path);
            f << svg_figure(in.t, in.l, hot);
            if (!f) fail(ErrorCode::InputError, "cannot write " + solution_path, "svg");
            return Json{{"svg", solution_path}, {"highlighted", hot}};
        };
    });

    std::string example_name;
    int k = 2;
    auto* example = app.add_subcommand("example", "Print a built-in instance as JSON");
    add_common(example);
    example->add_option("name", example_name,
                        "cycle19 | constant | sperner | red-white-blue | kkms-faces | diagonal3")
        ->required();
    example->add_option("--n", n, "Dimension parameter (sperner)");
    example->add_option("--k", k, "Subdivision (sperner)");
    example->callback([&] {
        action = [&]() -> Json {
            if (example_name == "cycle19" || example_name == "constant") {
                const std::vector<int> labels = example_name == "cycle19"
                                                    ? std::vector<int>{1, 2, 2, 1, 2, 3, 1, 2, 3, 2, 1, 1, 2, 2, 3, 1, 2, 3, 1}
                                                    : std::vector<int>(12, 1);
                Triangulation t;
                t.dim = 1;
                const int m = static_cast<int>(labels.size());
                for (int i = 0; i < m; ++i) {
                    t.vertices.push_back(RVec{Rational(i)});
                    t.cells.push_back({i, (i + 1) % m});
                    t.orientation.push_back(1);
                }
                Json out = to_json(Labeling{labels, 3, false});
                out["triangulation"] = to_json(t);
                return out;
            }
            if (example_name == "sperner") {
                if (n < 2) n = 3;
                const auto t = kuhn_triangulation(n, k);
                Json out = to_json(canonical_sperner_labeling(t, n));
                out["triangulation"] = to_json(t);
                return out;
            }
            if (example_name == "red-white-blue" || example_name == "kkms-faces") {
                const auto domain = kuhn_triangulation(3, 1);
                std::vector<RVec> sites;
                std::vector<std::string> names;
                const auto faces = example_name == "kkms-faces" ? kkms_faces(2)
                                                                 : std::vector<std::vector<int>>{{1}, {2}, {3}};
                for (const auto& f : faces) {
                    RVec c(3);
                    std::string name;
                    for (int i : f) {
                        c[i - 1] = Rational(1, static_cast<int>(f.size()));
                        name += std::to_string(i);
                    }
                    sites.push_back(c);
                    names.push_back(name);
                }
                const auto cover = voronoi_cover(sites, domain, names);
                if (example_name == "kkms-faces") return to_json(cover);
                return to_json(GaleInstance{{cover, cover, cover}, domain});
            }
            if (example_name == "diagonal3") return Json{{10, 1, 1}, {1, 10, 1}, {1, 1, 10}};
            fail(ErrorCode::InputError, "unknown example " + example_name, "name");
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::string field = "argv";
        if (const auto dash = msg.find("--"); dash != std::string::npos) {
            const auto end = msg.find_first_of(" :,", dash);
            field = msg.substr(dash + 2, end == std::string::npos ? std::string::npos : end - dash - 2);
        }
        std::cerr << msg << '\n';
        std::cout << error_json(Error(ErrorCode::InputError, msg, field)).dump(2) << '\n';
        return 2;
    }

    try {
        const Json result = action();
        emit(result, common);
        return status(result);
    } catch (const Error& e) {
        std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
        std::cout << error_json(e).dump(2) << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        std::cout << error_json(Error(ErrorCode::InternalError, e.what())).dump(2) << '\n';
        return 1;
    }
}
