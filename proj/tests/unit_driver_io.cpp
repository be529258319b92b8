#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "objstab/cli.hpp"

using namespace objstab;
namespace fs = std::filesystem;

namespace {

std::string config_dir() {
    if (const char* env = std::getenv("OBJSTAB_CONFIG_DIR")) return env;
    return "configs";
}

std::string fresh_out_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("objstab_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

NanotubeParams relaxed_tube() {
    static NanotubeParams cached = [] {
        auto r = relax_nanotube({nanotube_a0(), nanotube_alpha0(), nanotube_ideal_x(nanotube_a0())});
        return NanotubeParams{r.params[0], r.params[1],
                              Eigen::Vector3d(r.params[2], r.params[3], r.params[4])};
    }();
    return cached;
}

} // namespace

// ---------------------------------------------------------------------------
// driver

TEST_CASE("chain curve shape at a = 1.22") {
    auto setup = chain_setup(1.22);
    auto dual = dual_domain(setup.group());
    auto f = compute_fV(setup.s, setup.V);
    auto kern = seminorm_kernels(setup.s, setup.R);
    SweepConfig cfg;
    cfg.grid_points = 256;
    const double mid = 0.5 / 1.22, cell = (1.0 / 1.22) / cfg.grid_points;

    // R branch: positive with a single interior minimum at the zone boundary
    auto cR = lambda_curve(setup.group(), f, kern, false, dual.reps[0].rho, dual.reps[0].K, cfg);
    CHECK(cR.divergences.empty());
    REQUIRE(cR.minimum.is_finite());
    CHECK(cR.minimum.value > 0);
    CHECK(std::abs(cR.minimizing_k[0] - mid) < 2 * cell);

    // 0,0 branch: positive, largest at the zone boundary, infimum toward the
    // folded endpoints; both branches symmetric under k -> l* - k
    auto c0 = lambda_curve(setup.group(), f, kern, true, dual.reps[0].rho, dual.reps[0].K, cfg);
    CHECK(c0.divergences.empty());
    REQUIRE(c0.minimum.is_finite());
    CHECK(c0.minimum.value > 0);
    double kmin = std::min(c0.minimizing_k[0], 1.0 / 1.22 - c0.minimizing_k[0]);
    CHECK(kmin < 8 * cell);
    auto at = [&](const LambdaCurve& c, int j) { return c.points[static_cast<std::size_t>(j)]; };
    for (int j = 1; j < cfg.grid_points / 2; j += 17) {
        CHECK(std::abs(at(c0, j).lambda.value -
                       at(c0, cfg.grid_points - j).lambda.value) < 1e-9);
        CHECK(at(c0, j).lambda.value <= at(c0, cfg.grid_points / 2).lambda.value + 1e-12);
    }
}

TEST_CASE("nanotube rank-deficient wave vectors") {
    NanotubeParams p = relaxed_tube();
    auto setup = nanotube_setup(p);
    auto f = compute_fV(setup.s, setup.V);
    auto kern = seminorm_kernels(setup.s, setup.R);
    SweepConfig cfg;
    const double k2 = p.alpha / (2 * M_PI * p.a);
    for (bool zz : {false, true}) {
        auto at = [&](double kv) {
            Eigen::VectorXd k(1);
            k << kv;
            return evaluate_k(setup.group(), f, kern, zz, TFRep::trivial(), k, cfg);
        };
        CHECK(at(0.0).rank_deficient);
        CHECK(at(k2).rank_deficient);
        CHECK(!at(k2 + 0.05).rank_deficient);
        CHECK(!at(k2 - 0.05).rank_deficient);
        CHECK(!at(0.3).rank_deficient);
    }
    // strict-skip mode marks them skipped; extended mode computes a value
    SweepConfig strict = cfg;
    strict.mode = SweepConfig::Mode::StrictSkip;
    Eigen::VectorXd k(1);
    k << k2;
    auto ps = evaluate_k(setup.group(), f, kern, false, TFRep::trivial(), k, strict);
    CHECK(ps.skipped);
    auto pe = evaluate_k(setup.group(), f, kern, false, TFRep::trivial(), k, cfg);
    CHECK(!pe.skipped);
}

TEST_CASE("upper semicontinuity at the folded endpoint") {
    NanotubeParams p = relaxed_tube();
    p.a += 0.01; // stretched, stable
    auto rx = relax_nanotube_x(p.a, p.alpha, p.x);
    p.x = Eigen::Vector3d(rx.params[0], rx.params[1], rx.params[2]);
    auto setup = nanotube_setup(p);
    auto f = compute_fV(setup.s, setup.V);
    auto kern = seminorm_kernels(setup.s, setup.R);
    SweepConfig cfg;
    auto at = [&](double kv) {
        Eigen::VectorXd k(1);
        k << kv;
        return evaluate_k(setup.group(), f, kern, false, TFRep::trivial(), k, cfg).lambda;
    };
    ExtendedReal v0 = at(0.0);
    ExtendedReal vnear = at(1e-6);
    if (v0.is_finite() && vnear.is_finite()) CHECK(v0.value >= vnear.value - 1e-6);
    else CHECK(v0.is_plus_inf());
}

TEST_CASE("stability constants: chain sign structure (coarse grid)") {
    SweepConfig cfg;
    cfg.grid_points = 256;
    auto run = [&](double a) {
        auto setup = chain_setup(a);
        return stability_constants(setup, dual_domain(setup.group()), cfg);
    };
    auto stable = run(1.20);
    CHECK(stable.lambda_R.is_finite());
    CHECK(stable.lambda_R.value > 0);
    CHECK(stable.lambda_R00.value > 0);
    CHECK(stable.verdict == StabilityReport::Verdict::StableR00);

    auto compressed = run(1.00);
    CHECK(compressed.lambda_R.is_minus_inf());
    CHECK(compressed.lambda_R00.is_finite());
    CHECK(compressed.lambda_R00.value < 0);
    CHECK(compressed.verdict == StabilityReport::Verdict::Unstable);
    REQUIRE(!compressed.curves_R[0].divergences.empty());
    const auto& trail = compressed.curves_R[0].divergences.front().trail;
    CHECK(trail.size() >= 3);
}

TEST_CASE("supercell oracle") {
    auto setup = chain_setup(1.2);
    auto dual = dual_domain(setup.group());
    SweepConfig cfg;
    cfg.grid_points = 512;
    auto rep = stability_constants(setup, dual, cfg);
    REQUIRE(rep.lambda_R.is_finite());
    for (int N : {4, 8, 16, 32}) {
        auto sc = supercell_lambda(setup, N, false);
        REQUIRE(sc.is_finite());
        // restriction of the infimum
        CHECK(sc.value >= rep.lambda_R.value - 1e-8);
        auto fm = fourier_min_over_lattice(setup, dual, N, false);
        REQUIRE(fm.is_finite());
        CHECK(std::abs(sc.value - fm.value) < 1e-8 * (1 + std::abs(fm.value)));
    }
    CHECK_THROWS(supercell_lambda(setup, 8192, false));

    // N = 1 tube slice reduces to the single k = 0 pencil
    auto tube = nanotube_setup(relaxed_tube());
    auto sc1 = supercell_lambda(tube, 1, false);
    auto f = compute_fV(tube.s, tube.V);
    auto kern = seminorm_kernels(tube.s, tube.R);
    auto p0 = evaluate_k(tube.group(), f, kern, false, TFRep::trivial(),
                         Eigen::VectorXd::Zero(1), SweepConfig{});
    REQUIRE(sc1.is_finite());
    REQUIRE(p0.lambda.is_finite());
    CHECK(std::abs(sc1.value - p0.lambda.value) < 1e-8 * (1 + std::abs(sc1.value)));
}

TEST_CASE("rayleigh audit") {
    auto setup = chain_setup(1.2);
    SweepConfig cfg;
    cfg.grid_points = 512;
    auto rep = stability_constants(setup, dual_domain(setup.group()), cfg);
    auto check = rayleigh_check(setup, rep, 50);
    CHECK(check.passed);
    CHECK(check.trials == 50);

    // kernel field: both sides vanish
    auto f = compute_fV(setup.s, setup.V);
    auto kern = seminorm_kernels(setup.s, setup.R);
    RealField c(setup.group(), 1, 2, 1);
    c.set(setup.group().word({0}, 0), Eigen::Vector2d(0.4, -0.2));
    CHECK(std::abs(quadratic_form_convolution(setup.group(), f, c, c)) < 1e-12);
    CHECK(seminorm_eval(setup.s, kern, c, false).value < 1e-12);
}

TEST_CASE("grid refinement is monotone under doubling") {
    auto setup = chain_setup(1.26);
    auto dual = dual_domain(setup.group());
    SweepConfig cfg;
    double prev = std::numeric_limits<double>::infinity();
    for (int grid : {64, 128, 256, 512}) {
        cfg.grid_points = grid;
        auto rep = stability_constants(setup, dual, cfg);
        REQUIRE(rep.lambda_R00.is_finite());
        CHECK(rep.lambda_R00.value <= prev + 1e-9);
        prev = rep.lambda_R00.value;
    }
}

TEST_CASE("scale sweep and zero crossing") {
    SweepConfig cfg;
    cfg.grid_points = 256;
    std::vector<double> as;
    for (int i = 0; i < 6; ++i) as.push_back(1.16 + 0.03 * i);
    auto rows = scale_sweep([](double a) { return chain_setup(a); }, as, cfg);
    REQUIRE(rows.size() == as.size());
    for (const auto& r : rows) CHECK(!r.failed);
    // lambda_R00 changes sign inside the window containing a**
    bool sign_change = false;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i].lambda_R00.is_finite() && rows[i + 1].lambda_R00.is_finite() &&
            (rows[i].lambda_R00.value < 0) != (rows[i + 1].lambda_R00.value < 0))
            sign_change = true;
    CHECK(sign_change);

    // golden-section on the closed-form energy locates a*
    double lo = 1.0, hi = 1.3;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    while (hi - lo > 1e-9) {
        if (chain_energy_closed_form(c) < chain_energy_closed_form(d)) hi = d;
        else lo = c;
        c = hi - gr * (hi - lo);
        d = lo + gr * (hi - lo);
    }
    CHECK(std::abs(0.5 * (lo + hi) - std::pow(16.0 / 7.0, 1.0 / 6.0)) < 1e-6);
}

TEST_CASE("square space group: 2-D wave-vector domain") {
    // harmonic springs to the four nearest neighbors of the square lattice
    Eigen::VectorXd e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    GroupDescriptor Z2(2, 0, 2,
                       {Isometry(Eigen::MatrixXd::Identity(2, 2), e1),
                        Isometry(Eigen::MatrixXd::Identity(2, 2), e2)},
                       {Isometry::identity(2)});
    ProblemSetup setup;
    setup.s = Structure(Z2, Eigen::VectorXd::Zero(2));
    setup.V = SitePotential(2);
    for (auto z : {std::vector<std::int64_t>{1, 0}, std::vector<std::int64_t>{0, 1}})
        setup.V.add_pair({Z2.word(z, 0), RadialFunction::harmonic(1.0), 1.0});
    setup.R = {Z2.word({0, 0}, 0), Z2.word({1, 0}, 0), Z2.word({0, 1}, 0),
               Z2.word({1, 1}, 0), Z2.word({2, 0}, 0), Z2.word({0, 2}, 0)};

    auto flags = check_property(setup.s, setup.R, {Z2.word({1, 0}, 0), Z2.word({0, 1}, 0)},
                                {Z2.word({0, 0}, 0), Z2.word({1, 0}, 0), Z2.word({0, 1}, 0)});
    CHECK(flags.property1);
    CHECK(flags.property2);

    auto dual = dual_domain(Z2);
    REQUIRE(dual.reps[0].K.dimension() == 2);
    auto f = compute_fV(setup.s, setup.V);
    auto kern = seminorm_kernels(setup.s, setup.R);
    SweepConfig cfg;
    cfg.grid_points = 64; // 8x8 box grid, contains L*/4
    auto curve = lambda_curve(Z2, f, kern, false, dual.reps[0].rho, dual.reps[0].K, cfg);
    CHECK(curve.points.size() >= 64);
    auto sc = supercell_lambda(setup, 4, false);
    REQUIRE(sc.is_finite());
    if (curve.minimum.is_finite()) CHECK(sc.value >= curve.minimum.value - 1e-8);
}

TEST_CASE("restricted relaxation of the twist angle") {
    NanotubeParams p = relaxed_tube();
    auto alpha_at = [&](double a) {
        auto energy = [&](const Eigen::VectorXd& v) {
            NanotubeParams q{a, v[0], Eigen::Vector3d(v[1], v[2], v[3])};
            if (!nanotube_in_U(q)) return 1e50;
            auto s = nanotube_setup(q);
            SiteConfiguration y0 = reference_configuration(s.s, s.V);
            return s.V.energy(y0);
        };
        Eigen::VectorXd x0(4);
        x0 << p.alpha, p.x[0], p.x[1], p.x[2];
        NelderMeadOptions opt;
        opt.initial_scale = 0.01;
        opt.diameter_tol = 1e-9;
        return nelder_mead(energy, x0, opt).x[0];
    };
    double am = alpha_at(p.a - 0.004), a0 = alpha_at(p.a), ap = alpha_at(p.a + 0.004);
    CHECK(std::abs(a0 - p.alpha) < 2e-3);
    CHECK(std::abs(am - p.alpha) < 0.05);
    CHECK(std::abs(ap - p.alpha) < 0.05);
}

// ---------------------------------------------------------------------------
// config parsing

TEST_CASE("bundled chain config parses") {
    auto rc = parse_config(config_dir() + "/chain.json");
    REQUIRE(rc.family.has_value());
    CHECK(rc.family->name == "chain");
    CHECK(rc.family->a == doctest::Approx(1.2));
    CHECK(rc.setup.s.group.d == 2);
    CHECK(rc.setup.R.size() == 3);
    CHECK(rc.sweep.grid_points == 1024);
    CHECK(rc.sweep.mode == SweepConfig::Mode::ExtendedLoewner);

    // echo re-parses to the same setup
    auto rc2 = parse_config_json(rc.echo);
    CHECK(rc2.setup.s.group.d == rc.setup.s.group.d);
    CHECK(rc2.setup.R.size() == rc.setup.R.size());
    for (std::size_t i = 0; i < rc.setup.R.size(); ++i) CHECK(rc2.setup.R[i] == rc.setup.R[i]);
}

TEST_CASE("bundled nanotube config encodes the published sets") {
    auto rc = parse_config(config_dir() + "/nanotube51.json");
    const auto& G = rc.setup.s.group;
    CHECK(G.d == 3);
    CHECK(G.point_order() == 2);
    // neighbors {tp, t^6 p, t^7 p}
    auto range = rc.setup.V.range();
    REQUIRE(range.size() == 3);
    CHECK(range[0] == G.word({1}, 1));
    CHECK(range[1] == G.word({6}, 1));
    CHECK(range[2] == G.word({7}, 1));
    // R = {t^-1, id, t, t^2, t^-1 p, p, tp} in phi order
    REQUIRE(rc.setup.R.size() == 7);
    CHECK(rc.setup.R[0] == G.word({-1}, 0));
    CHECK(rc.setup.R[3] == G.word({2}, 0));
    CHECK(rc.setup.R[6] == G.word({1}, 1));
    // the family regenerates the same structure at the file's parameters
    auto regen = family_setup(*rc.family);
    CHECK((regen.s.x0 - rc.setup.s.x0).norm() < 1e-12);
    CHECK((regen.s.group.translation_generators[0].rot -
           G.translation_generators[0].rot).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("config rejection paths") {
    json bad = json::parse(R"({"structure": {"d": 3, "d1": 2, "d2": 2,
        "point_part": [{"rot": [[1,0,0],[0,1,0],[0,0,1]], "trans": [0,0,0]}], "x0": [0,0,0]}})");
    try {
        parse_config_json(bad);
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/structure/d1") != std::string::npos);
    }

    json unknown = json::parse(R"({"family": {"name": "chain", "a": 1.2}, "typo_key": 1})");
    try {
        parse_config_json(unknown);
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
    }

    json noterms = json::parse(R"({"structure": {"d": 1, "d1": 0, "d2": 1,
        "translation_generators": [{"rot": [[1]], "trans": [1.0]}],
        "point_part": [{"rot": [[1]], "trans": [0]}], "x0": [0]},
        "potential": {"terms": []}, "range": {"R": [{"z": [0], "q": 0}]}})");
    CHECK_THROWS_AS(parse_config_json(noterms), ConfigError);
}

// ---------------------------------------------------------------------------
// csv / svg

TEST_CASE("decimal format round-trips doubles") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
        double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 30) - 15);
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_extended(ExtendedReal::minus_inf()) == "-inf");
    CHECK(format_extended(ExtendedReal::plus_inf()) == "inf");
}

TEST_CASE("csv writer determinism") {
    auto build = [] {
        CsvWriter csv;
        csv.meta("tool", version_string());
        csv.header({"a", "b"});
        csv.row({format_double(1.0 / 3.0), format_double(2.0 / 7.0)});
        return csv.str();
    };
    CHECK(build() == build());
    CHECK(build().find("# tool = ") == 0);
}

TEST_CASE("svg emission") {
    PlotSeries s{"branch", "#1f77b4", {{0.0, 1.0}, {1.0, 2.0}}};
    std::string doc = emit_svg({s}, PlotMarkers{}, "k", "lambda", "two points");
    CHECK(doc.find("<svg") == 0);
    CHECK(doc.find("</svg>") != std::string::npos);
    std::size_t count = 0;
    for (std::size_t pos = 0; (pos = doc.find("<polyline", pos)) != std::string::npos; ++pos) ++count;
    CHECK(count == 1);
    CHECK(doc == emit_svg({s}, PlotMarkers{}, "k", "lambda", "two points"));
    CHECK_THROWS(emit_svg({}, PlotMarkers{}, "x", "y", "empty"));
}

// ---------------------------------------------------------------------------
// cli

TEST_CASE("cli subcommands and exit codes") {
    const std::string chain_cfg = config_dir() + "/chain.json";
    const std::string tube_cfg = config_dir() + "/nanotube51.json";

    CliOptions opt;
    opt.config_path = chain_cfg;
    opt.out_dir = fresh_out_dir("cli");
    opt.grid = 256;

    std::ostringstream log;
    opt.subcommand = "validate";
    CHECK(run_cli(opt, log) == 0);

    opt.subcommand = "critical";
    CHECK(run_cli(opt, log) == 0); // translation group is always critical

    opt.subcommand = "dual";
    CHECK(run_cli(opt, log) == 0);

    opt.subcommand = "stability";
    opt.a = 1.20;
    CHECK(run_cli(opt, log) == 0);
    opt.a = 1.30;
    CHECK(run_cli(opt, log) == 1);
    opt.a.reset();

    opt.subcommand = "curve";
    opt.a = 1.22;
    CHECK(run_cli(opt, log) == 0);
    CHECK(fs::exists(fs::path(*opt.out_dir) / "curve.csv"));
    CHECK(fs::exists(fs::path(*opt.out_dir) / "curve.svg"));

    // determinism: identical config and version give byte-identical CSV
    std::string first = slurp(*opt.out_dir + "/curve.csv");
    CHECK(run_cli(opt, log) == 0);
    CHECK(slurp(*opt.out_dir + "/curve.csv") == first);
    std::string svg1 = slurp(*opt.out_dir + "/curve.svg");
    CHECK(run_cli(opt, log) == 0);
    CHECK(slurp(*opt.out_dir + "/curve.svg") == svg1);
    opt.a.reset();

    // ideal nanotube is not a critical point
    CliOptions topt;
    topt.config_path = tube_cfg;
    topt.out_dir = fresh_out_dir("cli_tube");
    topt.subcommand = "critical";
    topt.ideal = true;
    CHECK(run_cli(topt, log) == 2);

    // config errors
    CliOptions bad;
    bad.subcommand = "validate";
    bad.config_path = "/nonexistent/nope.json";
    CHECK(run_cli(bad, log) == 4);
}

TEST_CASE("cli seminorm subcommand exports kernels and runs the oracle") {
    CliOptions opt;
    opt.subcommand = "seminorm";
    opt.config_path = config_dir() + "/nanotube51.json";
    opt.out_dir = fresh_out_dir("cli_seminorm");
    std::ostringstream log;
    CHECK(run_cli(opt, log) == 0);
    CHECK(fs::exists(fs::path(*opt.out_dir) / "seminorm_gR.csv"));
    CHECK(fs::exists(fs::path(*opt.out_dir) / "seminorm_gR00.csv"));
    CHECK(log.str().find("dual-route check") != std::string::npos);

    // critical exports the Hessian kernel as CSV
    opt.subcommand = "critical";
    opt.config_path = config_dir() + "/chain.json";
    CHECK(run_cli(opt, log) == 0);
    std::string body = slurp(*opt.out_dir + "/critical_fV.csv");
    CHECK(body.find("z0,q,m00") != std::string::npos);
    CHECK(std::count(body.begin(), body.end(), '\n') >= 5 + 2); // 5 support words + meta
}

TEST_CASE("user-supplied dual block reproduces the automatic result") {
    auto rc_auto = parse_config(config_dir() + "/chain.json");
    json doc = rc_auto.echo;
    doc["dual"] = json::parse(R"({"mode": "user", "classes": [
        {"label": "trivial", "K": {"extent": [1.0]},
         "rho": {"dim": 1, "generators": [{"re": [[1.0]]}]}}]})");
    auto rc_user = parse_config_json(doc);
    REQUIRE(rc_user.user_dual.has_value());
    SweepConfig cfg;
    cfg.grid_points = 128;
    auto rep_auto = stability_constants(rc_auto.setup, dual_domain(rc_auto.setup.s.group), cfg);
    auto rep_user = stability_constants(rc_user.setup, *rc_user.user_dual, cfg);
    REQUIRE(rep_auto.lambda_R.is_finite());
    REQUIRE(rep_user.lambda_R.is_finite());
    CHECK(std::abs(rep_auto.lambda_R.value - rep_user.lambda_R.value) < 1e-12);

    // non-unitary generators are rejected
    doc["dual"]["classes"][0]["rho"]["generators"][0]["re"] = json::parse("[[2.0]]");
    CHECK_THROWS_AS(parse_config_json(doc), ConfigError);
}

TEST_CASE("cli sweep subcommand") {
    CliOptions opt;
    opt.subcommand = "sweep";
    opt.config_path = config_dir() + "/chain.json";
    opt.out_dir = fresh_out_dir("cli_sweep");
    opt.grid = 128;
    opt.a_min = 1.18;
    opt.a_max = 1.30;
    opt.a_steps = 4;
    std::ostringstream log;
    CHECK(run_cli(opt, log) == 0);
    CHECK(fs::exists(fs::path(*opt.out_dir) / "sweep.csv"));
    CHECK(fs::exists(fs::path(*opt.out_dir) / "sweep.svg"));
    CHECK(log.str().find("zero crossing lambda_R00") != std::string::npos);
}

TEST_CASE("cli binary smoke") {
    const char* bin = std::getenv("OBJSTAB_CLI_BIN");
    if (!bin) return; // only wired up under ctest
    std::string out = fresh_out_dir("cli_bin");
    std::string cmd = std::string(bin) + " critical " + config_dir() +
                      "/nanotube51.json --ideal --out " + out + " > " + out + "/log.txt 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    CHECK(WEXITSTATUS(rc) == 2);
    cmd = std::string(bin) + " stability " + config_dir() + "/chain.json --a 1.2 --grid 256 --out " +
          out + " >> " + out + "/log.txt 2>&1";
    rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    CHECK(WEXITSTATUS(rc) == 0);
}
