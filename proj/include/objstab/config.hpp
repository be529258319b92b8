#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "objstab/driver.hpp"
#include "objstab/families.hpp"
#include "objstab/harmonic.hpp"

namespace objstab {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& pointer, const std::string& what)
        : std::runtime_error(pointer + ": " + what) {}
};

/// Family block: lets the CLI rebuild the run for overridden parameters.
struct FamilySpec {
    std::string name; // "chain" | "nanotube51"
    double a = 0;
    double alpha = 0;
    enum class XPolicy { Explicit, Ideal, Relaxed } x_policy = XPolicy::Explicit;
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
};

struct RunConfig {
    ProblemSetup setup;
    std::optional<FamilySpec> family;
    SweepConfig sweep;
    ToleranceConfig tolerance;
    std::string out_dir = "out";
    std::optional<DualDomain> user_dual; // user-supplied R and K_rho
    json echo;                           // the fully defaulted document, for artifact metadata
};

namespace cfgdetail {

inline void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& ptr) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError(ptr + "/" + it.key(), "unknown key");
}

inline double number_at(const json& j, const std::string& key, const std::string& ptr,
                        std::optional<double> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(ptr + "/" + key, "missing required number");
    }
    if (!j[key].is_number()) throw ConfigError(ptr + "/" + key, "expected a number");
    return j[key].get<double>();
}

inline int int_at(const json& j, const std::string& key, const std::string& ptr,
                  std::optional<int> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(ptr + "/" + key, "missing required integer");
    }
    if (!j[key].is_number_integer()) throw ConfigError(ptr + "/" + key, "expected an integer");
    return j[key].get<int>();
}

inline Eigen::VectorXd vector_at(const json& j, const std::string& ptr, int expected = -1) {
    if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(ptr + "/" + std::to_string(i), "expected a number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    if (expected >= 0 && v.size() != expected)
        throw ConfigError(ptr, "expected " + std::to_string(expected) + " entries, got " +
                                   std::to_string(v.size()));
    return v;
}

inline Eigen::MatrixXd matrix_at(const json& j, const std::string& ptr, int rows = -1, int cols = -1) {
    if (!j.is_array() || j.empty()) throw ConfigError(ptr, "expected a nonempty array of rows");
    const std::size_t r = j.size(), c = j[0].is_array() ? j[0].size() : 0;
    if (c == 0) throw ConfigError(ptr, "expected rows to be arrays");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c)
            throw ConfigError(ptr + "/" + std::to_string(i), "ragged matrix row");
        for (std::size_t k = 0; k < c; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
    if ((rows >= 0 && m.rows() != rows) || (cols >= 0 && m.cols() != cols))
        throw ConfigError(ptr, "matrix has wrong shape");
    return m;
}

inline GroupWord word_at(const json& j, const GroupDescriptor& G, const std::string& ptr) {
    reject_unknown(j, {"z", "q"}, ptr);
    if (!j.contains("z") || !j.contains("q")) throw ConfigError(ptr, "word needs z and q");
    std::vector<std::int64_t> z;
    for (const auto& e : j["z"]) z.push_back(e.get<std::int64_t>());
    int q = j["q"].get<int>();
    if (static_cast<int>(z.size()) != G.d2)
        throw ConfigError(ptr + "/z", "expected " + std::to_string(G.d2) + " exponents");
    if (q < 0 || q >= G.point_order()) throw ConfigError(ptr + "/q", "point index out of range");
    return G.word(std::move(z), q);
}

inline json word_to_json(const GroupWord& w) {
    json j;
    j["z"] = json::array();
    for (Eigen::Index i = 0; i < w.z.size(); ++i) j["z"].push_back(w.z[i]);
    j["q"] = w.q;
    return j;
}

inline Isometry isometry_at(const json& j, int d, const std::string& ptr) {
    reject_unknown(j, {"rot", "trans"}, ptr);
    if (!j.contains("rot") || !j.contains("trans")) throw ConfigError(ptr, "isometry needs rot and trans");
    return Isometry(matrix_at(j["rot"], ptr + "/rot", d, d), vector_at(j["trans"], ptr + "/trans", d));
}

inline GroupDescriptor structure_group(const json& s, const std::string& ptr) {
    reject_unknown(s, {"d", "d1", "d2", "m0", "translation_generators", "point_part",
                       "action_matrices", "x0"}, ptr);
    int d = int_at(s, "d", ptr), d1 = int_at(s, "d1", ptr), d2 = int_at(s, "d2", ptr);
    if (d1 + d2 != d) throw ConfigError(ptr + "/d1", "d1 + d2 != d");
    int m0 = int_at(s, "m0", ptr, 1);
    std::vector<Isometry> tg, pp;
    if (s.contains("translation_generators"))
        for (std::size_t i = 0; i < s["translation_generators"].size(); ++i)
            tg.push_back(isometry_at(s["translation_generators"][i], d,
                                     ptr + "/translation_generators/" + std::to_string(i)));
    if (!s.contains("point_part") || s["point_part"].empty())
        throw ConfigError(ptr + "/point_part", "at least the identity is required");
    for (std::size_t i = 0; i < s["point_part"].size(); ++i)
        pp.push_back(isometry_at(s["point_part"][i], d, ptr + "/point_part/" + std::to_string(i)));
    std::optional<std::vector<Eigen::MatrixXd>> act;
    if (s.contains("action_matrices")) {
        std::vector<Eigen::MatrixXd> a;
        for (std::size_t i = 0; i < s["action_matrices"].size(); ++i)
            a.push_back(matrix_at(s["action_matrices"][i],
                                  ptr + "/action_matrices/" + std::to_string(i), d2, d2));
        act = std::move(a);
    }
    try {
        return GroupDescriptor(d, d1, d2, std::move(tg), std::move(pp), act, m0);
    } catch (const std::exception& e) {
        throw ConfigError(ptr, e.what());
    }
}

inline SitePotential potential_at(const json& p, const GroupDescriptor& G, const std::string& ptr) {
    reject_unknown(p, {"terms"}, ptr);
    if (!p.contains("terms") || !p["terms"].is_array() || p["terms"].empty())
        throw ConfigError(ptr + "/terms", "at least one term required");
    SitePotential V(G.d);
    for (std::size_t i = 0; i < p["terms"].size(); ++i) {
        const json& t = p["terms"][i];
        const std::string tp = ptr + "/terms/" + std::to_string(i);
        std::string type = t.value("type", "");
        if (type == "pair") {
            reject_unknown(t, {"type", "preset", "neighbor", "weight", "c", "p", "r0"}, tp);
            std::string preset = t.value("preset", "");
            RadialFunction v;
            if (preset == "lennard_jones") v = RadialFunction::lennard_jones();
            else if (preset == "inverse_power")
                v = RadialFunction::inverse_power(number_at(t, "c", tp), number_at(t, "p", tp));
            else if (preset == "harmonic") v = RadialFunction::harmonic(number_at(t, "r0", tp, 1.0));
            else throw ConfigError(tp + "/preset", "unknown pair preset '" + preset + "'");
            if (!t.contains("neighbor")) throw ConfigError(tp, "pair term needs a neighbor word");
            V.add_pair({word_at(t["neighbor"], G, tp + "/neighbor"), v, t.value("weight", 1.0)});
        } else if (type == "cosine3") {
            reject_unknown(t, {"type", "offset", "neighbors"}, tp);
            if (!t.contains("neighbors") || t["neighbors"].size() < 2)
                throw ConfigError(tp + "/neighbors", "cosine3 needs at least two neighbors");
            Cosine3Term c;
            c.offset = t.value("offset", 0.5);
            for (std::size_t k = 0; k < t["neighbors"].size(); ++k)
                c.neighbors.push_back(word_at(t["neighbors"][k], G, tp + "/neighbors/" + std::to_string(k)));
            V.add_cosine3(std::move(c));
        } else {
            throw ConfigError(tp + "/type", "unknown term type '" + type + "'");
        }
    }
    return V;
}

inline std::vector<GroupWord> words_at(const json& arr, const GroupDescriptor& G, const std::string& ptr) {
    std::vector<GroupWord> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(word_at(arr[i], G, ptr + "/" + std::to_string(i)));
    return out;
}

inline Eigen::MatrixXcd complex_matrix_at(const json& j, const std::string& ptr, int n) {
    reject_unknown(j, {"re", "im"}, ptr);
    if (!j.contains("re")) throw ConfigError(ptr + "/re", "missing real part");
    Eigen::MatrixXd re = matrix_at(j["re"], ptr + "/re", n, n);
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(n, n);
    if (j.contains("im")) im = matrix_at(j["im"], ptr + "/im", n, n);
    return re.cast<std::complex<double>>() + std::complex<double>(0, 1) * im.cast<std::complex<double>>();
}

/// User-supplied base representation of TF: one unitary matrix per
/// translation generator; a word (z, q in F) evaluates to the z-power
/// product. Requires trivial F, matching the automatic flow's scope.
inline TFRep user_rho_at(const json& j, const GroupDescriptor& G, const std::string& ptr) {
    reject_unknown(j, {"dim", "generators"}, ptr);
    int dim = int_at(j, "dim", ptr);
    if (dim < 1) throw ConfigError(ptr + "/dim", "dimension must be positive");
    if (!j.contains("generators") || static_cast<int>(j["generators"].size()) != G.d2)
        throw ConfigError(ptr + "/generators", "need one unitary matrix per translation generator");
    if (!G.f_trivial())
        throw ConfigError(ptr, "user representations need a trivial projection kernel F");
    auto gens = std::make_shared<std::vector<Eigen::MatrixXcd>>();
    auto geninv = std::make_shared<std::vector<Eigen::MatrixXcd>>();
    for (int i = 0; i < G.d2; ++i) {
        Eigen::MatrixXcd M = complex_matrix_at(j["generators"][static_cast<std::size_t>(i)],
                                               ptr + "/generators/" + std::to_string(i), dim);
        if ((M.adjoint() * M - Eigen::MatrixXcd::Identity(dim, dim)).norm() > 1e-10)
            throw ConfigError(ptr + "/generators/" + std::to_string(i), "matrix is not unitary");
        gens->push_back(M);
        geninv->push_back(M.adjoint());
    }
    for (int i = 0; i < G.d2; ++i)
        for (int j2 = i + 1; j2 < G.d2; ++j2)
            if (((*gens)[static_cast<std::size_t>(i)] * (*gens)[static_cast<std::size_t>(j2)] -
                 (*gens)[static_cast<std::size_t>(j2)] * (*gens)[static_cast<std::size_t>(i)]).norm() > 1e-10)
                throw ConfigError(ptr + "/generators", "generator matrices must commute");
    TFRep rho;
    rho.dim = dim;
    rho.eval = [gens, geninv, dim](const GroupDescriptor& g, const GroupWord& w) {
        if (!g.in_TF(w)) throw std::invalid_argument("user rho: word not in TF");
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(dim, dim);
        for (Eigen::Index i = 0; i < w.z.size(); ++i) {
            const auto& M = w.z[i] >= 0 ? (*gens)[static_cast<std::size_t>(i)]
                                        : (*geninv)[static_cast<std::size_t>(i)];
            for (std::int64_t n = 0; n < std::llabs(w.z[i]); ++n) out = out * M;
        }
        return out;
    };
    return rho;
}

} // namespace cfgdetail

/// Rebuild the full setup for a family at possibly overridden parameters.
inline ProblemSetup family_setup(const FamilySpec& fam) {
    if (fam.name == "chain") return chain_setup(fam.a);
    if (fam.name == "nanotube51") {
        Eigen::Vector3d x = fam.x;
        if (fam.x_policy == FamilySpec::XPolicy::Ideal) x = nanotube_ideal_x(fam.a);
        else if (fam.x_policy == FamilySpec::XPolicy::Relaxed) {
            auto r = relax_nanotube_x(fam.a, fam.alpha, nanotube_ideal_x(fam.a));
            x = Eigen::Vector3d(r.params[0], r.params[1], r.params[2]);
        }
        return nanotube_setup({fam.a, fam.alpha, x});
    }
    throw ConfigError("/family/name", "unknown family '" + fam.name + "'");
}

inline RunConfig parse_config_json(const json& root) {
    using namespace cfgdetail;
    reject_unknown(root, {"family", "structure", "potential", "range", "dual", "sweep",
                          "tolerance", "output"}, "");
    RunConfig rc;

    if (root.contains("family")) {
        const json& f = root["family"];
        reject_unknown(f, {"name", "a", "alpha", "x"}, "/family");
        FamilySpec fam;
        fam.name = f.value("name", "");
        fam.a = number_at(f, "a", "/family");
        if (fam.name == "nanotube51") {
            fam.alpha = number_at(f, "alpha", "/family");
            if (!f.contains("x")) throw ConfigError("/family/x", "nanotube needs x, \"ideal\" or \"relaxed\"");
            if (f["x"].is_string()) {
                std::string xs = f["x"].get<std::string>();
                if (xs == "ideal") fam.x_policy = FamilySpec::XPolicy::Ideal;
                else if (xs == "relaxed") fam.x_policy = FamilySpec::XPolicy::Relaxed;
                else throw ConfigError("/family/x", "expected coordinates, \"ideal\" or \"relaxed\"");
            } else {
                Eigen::VectorXd x = vector_at(f["x"], "/family/x", 3);
                fam.x_policy = FamilySpec::XPolicy::Explicit;
                fam.x = x;
            }
        } else if (fam.name != "chain") {
            throw ConfigError("/family/name", "unknown family '" + fam.name + "'");
        }
        rc.family = fam;
    }

    if (root.contains("structure")) {
        GroupDescriptor G = structure_group(root["structure"], "/structure");
        if (!root["structure"].contains("x0"))
            throw ConfigError("/structure/x0", "missing reference point");
        Eigen::VectorXd x0 = vector_at(root["structure"]["x0"], "/structure/x0", G.d);
        Structure s(std::move(G), std::move(x0));
        if (!root.contains("potential")) throw ConfigError("/potential", "missing block");
        SitePotential V = potential_at(root["potential"], s.group, "/potential");
        rc.setup.s = std::move(s);
        rc.setup.V = std::move(V);
        if (root.contains("range")) {
            const json& r = root["range"];
            reject_unknown(r, {"R", "Rprime", "Rsecond"}, "/range");
            if (!r.contains("R")) throw ConfigError("/range/R", "missing range set");
            rc.setup.R = words_at(r["R"], rc.setup.s.group, "/range/R");
            if (r.contains("Rprime")) rc.setup.Rprime = words_at(r["Rprime"], rc.setup.s.group, "/range/Rprime");
            if (r.contains("Rsecond")) rc.setup.Rsecond = words_at(r["Rsecond"], rc.setup.s.group, "/range/Rsecond");
        } else {
            throw ConfigError("/range", "missing block");
        }
    } else if (rc.family) {
        rc.setup = family_setup(*rc.family);
    } else {
        throw ConfigError("/structure", "either a structure block or a family block is required");
    }

    if (root.contains("dual")) {
        const json& d = root["dual"];
        reject_unknown(d, {"mode", "classes"}, "/dual");
        std::string mode = d.value("mode", "auto");
        if (mode == "user") {
            if (!d.contains("classes") || !d["classes"].is_array() || d["classes"].empty())
                throw ConfigError("/dual/classes", "user mode needs at least one class");
            DualDomain dual;
            for (std::size_t i = 0; i < d["classes"].size(); ++i) {
                const json& cj = d["classes"][i];
                const std::string ptr = "/dual/classes/" + std::to_string(i);
                reject_unknown(cj, {"K", "rho", "label"}, ptr);
                RepClass cls;
                cls.label = cj.value("label", "user_" + std::to_string(i));
                cls.rho = cj.contains("rho") ? user_rho_at(cj["rho"], rc.setup.s.group, ptr + "/rho")
                                             : TFRep::trivial();
                if (!cj.contains("K")) throw ConfigError(ptr + "/K", "user class needs a K block");
                reject_unknown(cj["K"], {"extent"}, ptr + "/K");
                cls.K.dual_basis = rc.setup.s.group.dual_lattice_basis();
                cls.K.extent = vector_at(cj["K"]["extent"], ptr + "/K/extent", rc.setup.s.group.d2);
                cls.grho.translation_lattice = rc.setup.s.group.dual_lattice_basis();
                dual.reps.push_back(std::move(cls));
            }
            rc.user_dual = std::move(dual);
        } else if (mode != "auto") {
            throw ConfigError("/dual/mode", "expected \"auto\" or \"user\"");
        }
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        reject_unknown(s, {"grid", "refine", "floor", "exclusion", "mode", "threads"}, "/sweep");
        rc.sweep.grid_points = int_at(s, "grid", "/sweep", 1024);
        rc.sweep.refinement_depth = int_at(s, "refine", "/sweep", 6);
        rc.sweep.divergence_floor = number_at(s, "floor", "/sweep", -1e8);
        rc.sweep.exclusion_rel = number_at(s, "exclusion", "/sweep", 0.5);
        rc.sweep.threads = int_at(s, "threads", "/sweep", 0);
        std::string mode = s.value("mode", "extended");
        if (mode == "strict") rc.sweep.mode = SweepConfig::Mode::StrictSkip;
        else if (mode == "extended") rc.sweep.mode = SweepConfig::Mode::ExtendedLoewner;
        else throw ConfigError("/sweep/mode", "expected \"strict\" or \"extended\"");
        if (rc.sweep.grid_points < 2) throw ConfigError("/sweep/grid", "grid must be at least 2");
    }

    if (root.contains("tolerance")) {
        const json& t = root["tolerance"];
        reject_unknown(t, {"structural", "rank_rel", "criticality", "psd_rel", "route_agree",
                           "seminorm_agree", "kernel_prune"}, "/tolerance");
        rc.tolerance.structural = number_at(t, "structural", "/tolerance", rc.tolerance.structural);
        rc.tolerance.rank_rel = number_at(t, "rank_rel", "/tolerance", rc.tolerance.rank_rel);
        rc.tolerance.criticality = number_at(t, "criticality", "/tolerance", rc.tolerance.criticality);
        rc.tolerance.psd_rel = number_at(t, "psd_rel", "/tolerance", rc.tolerance.psd_rel);
        rc.tolerance.route_agree = number_at(t, "route_agree", "/tolerance", rc.tolerance.route_agree);
        rc.tolerance.seminorm_agree = number_at(t, "seminorm_agree", "/tolerance", rc.tolerance.seminorm_agree);
        rc.tolerance.kernel_prune = number_at(t, "kernel_prune", "/tolerance", rc.tolerance.kernel_prune);
    }

    if (root.contains("output")) {
        reject_unknown(root["output"], {"dir"}, "/output");
        rc.out_dir = root["output"].value("dir", "out");
    }

    // echo with defaults materialized
    json echo = root;
    echo["sweep"]["grid"] = rc.sweep.grid_points;
    echo["sweep"]["refine"] = rc.sweep.refinement_depth;
    echo["sweep"]["floor"] = rc.sweep.divergence_floor;
    echo["sweep"]["exclusion"] = rc.sweep.exclusion_rel;
    echo["sweep"]["mode"] =
        rc.sweep.mode == SweepConfig::Mode::StrictSkip ? "strict" : "extended";
    echo["output"]["dir"] = rc.out_dir;
    json phi = json::array();
    for (const auto& w : rc.setup.R) phi.push_back(cfgdetail::word_to_json(w));
    echo["range"]["R"] = phi;
    rc.echo = std::move(echo);
    return rc;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("", std::string("JSON parse error: ") + e.what());
    }
    return parse_config_json(root);
}

} // namespace objstab
