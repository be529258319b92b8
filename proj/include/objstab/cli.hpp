#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "objstab/config.hpp"
#include "objstab/csv.hpp"
#include "objstab/driver.hpp"
#include "objstab/svg.hpp"

namespace objstab {

inline const char* version_string() { return "objstab 0.1.0"; }

struct CliOptions {
    std::string subcommand;
    std::string config_path;
    std::optional<double> a, alpha;
    std::optional<int> grid;
    std::string seminorm = "both";   // R | R00 | both
    std::optional<std::string> mode; // strict | extended
    std::optional<std::string> out_dir;
    bool oracle = false;
    bool ideal = false;   // nanotube: force the ideal reference point
    bool relax_x = false; // nanotube: relax x at fixed (a, alpha)
    // sweep ranges
    double a_min = 0, a_max = 0;
    int a_steps = 0;
};

namespace clidetail {

inline void write_metadata(CsvWriter& csv, const RunConfig& rc) {
    csv.meta("tool", version_string());
    csv.meta("grid", std::to_string(rc.sweep.grid_points));
    csv.meta("refine", std::to_string(rc.sweep.refinement_depth));
    csv.meta("mode", rc.sweep.mode == SweepConfig::Mode::StrictSkip ? "strict" : "extended");
    csv.meta("divergence_floor", format_double(rc.sweep.divergence_floor));
    csv.meta("tol.structural", format_double(rc.tolerance.structural));
    csv.meta("tol.rank_rel", format_double(rc.tolerance.rank_rel));
    csv.meta("tol.criticality", format_double(rc.tolerance.criticality));
    csv.meta("tol.psd_rel", format_double(rc.tolerance.psd_rel));
    std::ostringstream phi;
    for (std::size_t i = 0; i < rc.setup.R.size(); ++i)
        phi << (i ? " " : "") << rc.setup.R[i].str();
    csv.meta("phi_order", phi.str());
    std::ostringstream reps;
    InducedRep ind(rc.setup.s.group, Eigen::VectorXd::Zero(rc.setup.s.group.d2));
    for (std::size_t i = 0; i < ind.coset_representatives().size(); ++i)
        reps << (i ? " " : "") << ind.coset_representatives()[i].str();
    csv.meta("coset_reps", reps.str());
}

inline DualDomain resolve_dual(const RunConfig& rc) {
    if (rc.user_dual) return *rc.user_dual;
    return dual_domain(rc.setup.s.group);
}

/// Matrix-valued kernel rows: z-exponents, q, then the entries row-major.
inline void export_word_kernel(const std::string& path, const RunConfig& rc,
                               const std::vector<std::pair<GroupWord, Eigen::MatrixXd>>& entries) {
    CsvWriter csv;
    write_metadata(csv, rc);
    std::vector<std::string> head;
    for (int i = 0; i < rc.setup.s.group.d2; ++i) head.push_back("z" + std::to_string(i));
    head.push_back("q");
    if (!entries.empty())
        for (Eigen::Index r = 0; r < entries.front().second.rows(); ++r)
            for (Eigen::Index c2 = 0; c2 < entries.front().second.cols(); ++c2)
                head.push_back("m" + std::to_string(r) + std::to_string(c2));
    csv.header(head);
    for (const auto& [w, M] : entries) {
        std::vector<std::string> row;
        for (Eigen::Index i = 0; i < w.z.size(); ++i) row.push_back(std::to_string(w.z[i]));
        row.push_back(std::to_string(w.q));
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c2 = 0; c2 < M.cols(); ++c2) row.push_back(format_double(M(r, c2)));
        csv.row(row);
    }
    csv.save(path);
}

inline void export_curves(const RunConfig& rc, const StabilityReport& rep, const std::string& base) {
    CsvWriter csv;
    write_metadata(csv, rc);
    csv.header({"rho", "k", "lambda_R", "lambda_R00", "rankB_R", "rankB_R00", "flags"});
    std::vector<PlotSeries> series(2);
    series[0] = {"lambda_R", "#1f77b4", {}};
    series[1] = {"lambda_R00", "#ff7f0e", {}};
    PlotMarkers markers{"#d62728", {}};
    for (std::size_t r = 0; r < rep.curves_R.size(); ++r) {
        const auto& cr = rep.curves_R[r];
        const auto& c0 = rep.curves_R00[r];
        // grid points of the two sweeps line up pairwise before refinement
        std::size_t n = std::min(cr.points.size(), c0.points.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = cr.points[i];
            const auto& q = c0.points[i];
            if (p.refined || q.refined) continue;
            std::string flags;
            if (p.rank_deficient) flags += "RD_R;";
            if (q.rank_deficient) flags += "RD_R00;";
            if (p.skipped || q.skipped) flags += "skipped;";
            csv.row({std::to_string(r), format_double(p.k.size() ? p.k[0] : 0.0),
                     format_extended(p.lambda), format_extended(q.lambda),
                     std::to_string(p.rank_B), std::to_string(q.rank_B), flags});
            double k = p.k.size() ? p.k[0] : 0.0;
            series[0].points.emplace_back(k, p.lambda.is_finite()
                                                 ? p.lambda.value
                                                 : std::numeric_limits<double>::quiet_NaN());
            series[1].points.emplace_back(k, q.lambda.is_finite()
                                                 ? q.lambda.value
                                                 : std::numeric_limits<double>::quiet_NaN());
            if (p.rank_deficient || q.rank_deficient) markers.xs.push_back(k);
        }
        for (const auto& ev : cr.divergences)
            if (ev.at_k.size()) markers.xs.push_back(ev.at_k[0]);
    }
    csv.save(base + ".csv");
    save_svg(base + ".svg",
             emit_svg(series, markers, "k", "lambda_min", "stability constants over K"));
}

inline ProblemSetup apply_overrides(RunConfig& rc, const CliOptions& opt) {
    if (rc.family) {
        FamilySpec fam = *rc.family;
        if (opt.a) fam.a = *opt.a;
        if (opt.alpha) fam.alpha = *opt.alpha;
        if (opt.ideal) fam.x_policy = FamilySpec::XPolicy::Ideal;
        else if (opt.relax_x) fam.x_policy = FamilySpec::XPolicy::Relaxed;
        rc.family = fam;
        return family_setup(fam);
    }
    if (opt.a || opt.alpha || opt.ideal || opt.relax_x)
        throw ConfigError("/family", "parameter overrides need a family block in the config");
    return rc.setup;
}

} // namespace clidetail

/// Dispatch a parsed command line; returns the process exit code.
/// 0 stable / success, 1 unstable, 2 not critical, 3 computation error,
/// 4 config error.
inline int run_cli(const CliOptions& opt, std::ostream& out = std::cout) {
    using namespace clidetail;
    RunConfig rc;
    try {
        rc = parse_config(opt.config_path);
        if (opt.grid) rc.sweep.grid_points = *opt.grid;
        if (opt.mode) {
            if (*opt.mode == "strict") rc.sweep.mode = SweepConfig::Mode::StrictSkip;
            else if (*opt.mode == "extended") rc.sweep.mode = SweepConfig::Mode::ExtendedLoewner;
            else throw ConfigError("/sweep/mode", "expected strict or extended");
        }
        if (opt.out_dir) rc.out_dir = *opt.out_dir;
        rc.setup = apply_overrides(rc, opt);
    } catch (const std::exception& e) {
        out << "config error: " << e.what() << "\n";
        return 4;
    }

    try {
        std::filesystem::create_directories(rc.out_dir);
        const std::string base = rc.out_dir + "/" + opt.subcommand;

        if (opt.subcommand == "validate") {
            ValidationReport rep = validate_structure(rc.setup.s, 0.0, rc.tolerance);
            out << "daff = " << rep.daff << "\n";
            auto flags = check_property(rc.setup.s, rc.setup.R, rc.setup.Rprime, rc.setup.Rsecond,
                                        rc.tolerance);
            out << "Property 1: " << (flags.property1 ? "holds" : "FAILS") << "\n";
            out << "Property 2: " << (flags.property2 ? "holds" : "FAILS") << "\n";
            for (const auto& msg : flags.failures) out << "  " << msg << "\n";
            if (!rep.ok()) {
                for (const auto& is : rep.issues) out << "FAIL " << is.check << ": " << is.detail << "\n";
                return 3;
            }
            out << "structure valid\n";
            return (flags.property1 && (rc.setup.Rprime.empty() || flags.property2)) ? 0 : 3;
        }

        if (opt.subcommand == "critical") {
            CriticalityReport crit = compute_eV(rc.setup.s, rc.setup.V, rc.tolerance);
            out << "e_V = [";
            for (int i = 0; i < crit.e_V.size(); ++i) out << (i ? ", " : "") << format_double(crit.e_V[i]);
            out << "]\n||e_V|| = " << format_double(crit.norm) << "\n";
            out << (crit.is_critical ? "critical point" : "not a critical point") << "\n";
            HessianKernel f = compute_fV(rc.setup.s, rc.setup.V, rc.tolerance);
            std::vector<std::pair<GroupWord, Eigen::MatrixXd>> rows;
            for (const auto& w : f.support()) rows.emplace_back(w, f.value(w));
            export_word_kernel(base + "_fV.csv", rc, rows);
            return crit.is_critical ? 0 : 2;
        }

        if (opt.subcommand == "seminorm") {
            SeminormKernels kern = seminorm_kernels(rc.setup.s, rc.setup.R, rc.tolerance);
            std::vector<std::pair<GroupWord, Eigen::MatrixXd>> gr, gr00;
            for (std::size_t i = 0; i < kern.R.size(); ++i) {
                gr.emplace_back(kern.R[i], kern.gR[i]);
                gr00.emplace_back(kern.R[i], kern.gR00[i]);
            }
            export_word_kernel(base + "_gR.csv", rc, gr);
            export_word_kernel(base + "_gR00.csv", rc, gr00);
            out << "rank P = " << kern.proj.rank_P << ", rank P0 = " << kern.proj.rank_P0 << "\n";
            // dual-route oracle on random periodic fields
            std::mt19937 rng(4242);
            double worst = 0;
            const int trials = 50;
            for (int t = 0; t < trials; ++t) {
                int N = rc.setup.s.group.m0 * (1 + static_cast<int>(rng() % 6));
                RealField u = random_displacement_field(rc.setup.s.group, N, rng);
                for (bool zz : {false, true}) {
                    auto sv = seminorm_eval(rc.setup.s, kern, u, zz, rc.tolerance);
                    worst = std::max(worst, sv.discrepancy / (1 + sv.value));
                }
            }
            out << "dual-route check: worst relative discrepancy " << format_double(worst)
                << " over " << trials << " random fields\n";
            out << "wrote " << base << "_gR.csv and " << base << "_gR00.csv\n";
            return worst <= rc.tolerance.seminorm_agree ? 0 : 3;
        }

        if (opt.subcommand == "dual") {
            DualDomain dual = resolve_dual(rc);
            for (std::size_t i = 0; i < dual.reps.size(); ++i) {
                const auto& cls = dual.reps[i];
                out << "rho[" << i << "] = " << cls.label << "\n";
                out << "  point rotations on k: " << cls.grho.point_rotations.size() << "\n";
                out << "  k-lattice basis:\n" << cls.grho.translation_lattice << "\n";
                out << "  K extent (fractional): " << cls.K.extent.transpose()
                    << (cls.K.mirror_folded ? "  (mirror-folded)" : "") << "\n";
            }
            return 0;
        }

        if (opt.subcommand == "curve" || opt.subcommand == "stability") {
            DualDomain dual = resolve_dual(rc);
            StabilityReport rep = stability_constants(rc.setup, dual, rc.sweep, rc.tolerance);
            export_curves(rc, rep, base);
            out << "lambda_R = " << rep.lambda_R.str() << "\n";
            out << "lambda_R00 = " << rep.lambda_R00.str() << "\n";
            out << "||e_V|| = " << format_double(rep.crit.norm) << "\n";
            out << "verdict = " << rep.verdict_str() << "\n";
            if (!rep.lambda_meaningful)
                out << "note: e_V != 0, lambda values are diagnostics only, "
                       "not meaningful as stability constants\n";
            for (const auto& c : {&rep.curves_R, &rep.curves_R00})
                for (const auto& cur : *c)
                    for (const auto& ev : cur.divergences)
                        out << "divergence: " << ev.note << " (" << ev.trail.size()
                            << " trail points)\n";
            if (opt.oracle) {
                RayleighCheck rch = rayleigh_check(rc.setup, rep, 50, 20240u, rc.tolerance);
                out << "oracle rayleigh: " << (rch.passed ? "pass" : "FAIL") << " over "
                    << rch.trials << " trials\n";
                if (rc.setup.s.group.d2 == 1) {
                    ExtendedReal sc = supercell_lambda(rc.setup, 8, false, rc.tolerance);
                    ExtendedReal fm = fourier_min_over_lattice(rc.setup, dual, 8, false, rc.tolerance);
                    bool agree = (sc.is_finite() == fm.is_finite()) &&
                                 (!sc.is_finite() || std::abs(sc.value - fm.value) <=
                                                         1e-8 * (1 + std::abs(sc.value)));
                    out << "oracle supercell(8): " << sc.str() << " fourier: " << fm.str() << " "
                        << (agree ? "agree" : "DISAGREE") << "\n";
                    if (!agree || !rch.passed) return 3;
                } else if (!rch.passed) {
                    return 3;
                }
            }
            if (opt.subcommand == "curve") return 0;
            if (rep.verdict == StabilityReport::Verdict::NotCritical) return 2;
            bool stable;
            if (opt.seminorm == "R")
                stable = rep.verdict == StabilityReport::Verdict::StableR ||
                         rep.verdict == StabilityReport::Verdict::StableR00;
            else if (opt.seminorm == "R00")
                stable = rep.verdict == StabilityReport::Verdict::StableR00;
            else
                stable = rep.verdict == StabilityReport::Verdict::StableR00;
            return stable ? 0 : 1;
        }

        if (opt.subcommand == "sweep") {
            if (!rc.family) throw ConfigError("/family", "sweep needs a family block");
            if (opt.a_steps < 2 || !(opt.a_max > opt.a_min))
                throw ConfigError("", "sweep needs --a-min, --a-max and --a-steps >= 2");
            std::vector<double> as;
            for (int i = 0; i < opt.a_steps; ++i)
                as.push_back(opt.a_min + (opt.a_max - opt.a_min) * i / (opt.a_steps - 1));
            FamilySpec fam = *rc.family;
            auto family = [&](double a) {
                FamilySpec f2 = fam;
                f2.a = a;
                return family_setup(f2);
            };
            auto rows = scale_sweep(family, as, rc.sweep, rc.tolerance);
            CsvWriter csv;
            write_metadata(csv, rc);
            csv.header({"a", "lambda_R", "lambda_R00", "eV_norm", "energy", "error"});
            std::vector<PlotSeries> series(2);
            series[0] = {"lambda_R", "#1f77b4", {}};
            series[1] = {"lambda_R00", "#ff7f0e", {}};
            for (const auto& r : rows) {
                csv.row({format_double(r.a), format_extended(r.lambda_R),
                         format_extended(r.lambda_R00), format_double(r.eV_norm),
                         format_double(r.energy), r.error});
                if (!r.failed) {
                    series[0].points.emplace_back(r.a, r.lambda_R.is_finite()
                                                           ? r.lambda_R.value
                                                           : std::numeric_limits<double>::quiet_NaN());
                    series[1].points.emplace_back(r.a, r.lambda_R00.is_finite()
                                                           ? r.lambda_R00.value
                                                           : std::numeric_limits<double>::quiet_NaN());
                }
            }
            csv.save(base + ".csv");
            save_svg(base + ".svg", emit_svg(series, PlotMarkers{}, "a", "lambda",
                                             "stability constants over the scale factor"));
            // zero crossings by bisection on each lambda column
            for (bool zz : {false, true}) {
                for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
                    const ExtendedReal &l = zz ? rows[i].lambda_R00 : rows[i].lambda_R,
                                       &r = zz ? rows[i + 1].lambda_R00 : rows[i + 1].lambda_R;
                    if (!l.is_finite() || !r.is_finite()) continue;
                    if ((l.value < 0) == (r.value < 0)) continue;
                    auto fz = [&](double a) {
                        auto rep = stability_constants(family(a), dual_domain(family(a).s.group),
                                                       rc.sweep, rc.tolerance);
                        ExtendedReal v = zz ? rep.lambda_R00 : rep.lambda_R;
                        return v.is_finite() ? v.value : -1e30;
                    };
                    auto root = bisect_zero(fz, rows[i].a, rows[i + 1].a);
                    if (root)
                        out << "zero crossing lambda_" << (zz ? "R00" : "R") << " at a = "
                            << format_double(*root) << "\n";
                }
            }
            out << "wrote " << base << ".csv and .svg\n";
            return 0;
        }

        if (opt.subcommand == "relax") {
            if (!rc.family) throw ConfigError("/family", "relax needs a family block");
            if (rc.family->name == "chain") {
                auto r = relax_chain(rc.family->a);
                out << "a* = " << format_double(r.params[0]) << "\n";
                out << "E  = " << format_double(r.energy) << "\n";
                out << "||e_V|| = " << format_double(r.eV_norm) << "\n";
                return r.converged ? 0 : 3;
            }
            FamilySpec fam = *rc.family;
            Eigen::Vector3d x0 = fam.x_policy == FamilySpec::XPolicy::Explicit
                                     ? fam.x
                                     : nanotube_ideal_x(fam.a);
            auto r = relax_nanotube({fam.a, fam.alpha, x0});
            out << "a*     = " << format_double(r.params[0]) << "\n";
            out << "alpha* = " << format_double(r.params[1]) << "\n";
            out << "x*     = (" << format_double(r.params[2]) << ", " << format_double(r.params[3])
                << ", " << format_double(r.params[4]) << ")\n";
            out << "E      = " << format_double(r.energy) << "\n";
            out << "||e_V|| = " << format_double(r.eV_norm) << "\n";
            return r.converged ? 0 : 3;
        }

        out << "unknown subcommand '" << opt.subcommand << "'\n";
        return 4;
    } catch (const ConfigError& e) {
        out << "config error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        out << "computation error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace objstab
