#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "objstab/families.hpp"
#include "objstab/fields.hpp"
#include "objstab/harmonic.hpp"
#include "objstab/hessian.hpp"
#include "objstab/pencil.hpp"
#include "objstab/seminorm.hpp"

namespace objstab {

struct SweepConfig {
    int grid_points = 1024;       // per K_rho dimension
    int refinement_depth = 6;     // bisection levels around minima / flagged k
    double divergence_floor = -1e8;
    double exclusion_rel = 0.5;   // exclusion radius around rank-deficient k, in grid cells
    enum class Mode { StrictSkip, ExtendedLoewner };
    Mode mode = Mode::ExtendedLoewner;
    int threads = 0;              // 0: hardware concurrency, capped by OBJSTAB_THREADS
};

struct CurvePoint {
    Eigen::VectorXd k;
    ExtendedReal lambda;
    int rank_B = 0;
    int full_rank = 0;
    bool rank_deficient = false;
    bool skipped = false;   // strict-skip mode at a rank-deficient k
    bool refined = false;   // added by local refinement
};

struct DivergenceEvidence {
    Eigen::VectorXd at_k;
    std::vector<std::pair<double, double>> trail; // (offset from k, lambda)
    std::string note;
};

struct LambdaCurve {
    std::vector<CurvePoint> points;             // sorted by k for d2 = 1
    std::vector<DivergenceEvidence> divergences;
    ExtendedReal minimum = ExtendedReal::plus_inf();
    Eigen::VectorXd minimizing_k;
    double final_cell = 0;       // grid resolution after refinement
    double last_refine_delta = 0;

    bool divergent() const { return !divergences.empty(); }
    ExtendedReal value() const { return divergent() ? ExtendedReal::minus_inf() : minimum; }
};

namespace detail {

inline int sweep_thread_count(const SweepConfig& cfg) {
    int n = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("OBJSTAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

template <class F>
void parallel_for(std::size_t count, int threads, F&& f) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            f(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Scale anchor for the rank decision: an upper bound on sigma_max of the
/// transformed seminorm kernel, independent of k.
inline double seminorm_fourier_scale(const SeminormKernels& kern, bool zero_zero) {
    double s = 0;
    for (std::size_t i = 0; i < kern.R.size(); ++i) s += kern.block(i, zero_zero).norm();
    return s;
}

/// One pencil evaluation at wave vector k.
inline CurvePoint evaluate_k(const GroupDescriptor& G, const HessianKernel& f,
                             const SeminormKernels& kern, bool zero_zero, const TFRep& rho,
                             const Eigen::VectorXd& k, const SweepConfig& cfg,
                             const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    InducedRep rep(G, k, rho);
    MatrixXcd A = fourier_l1(f, rep);
    MatrixXcd B = fourier_l1(kern, zero_zero, rep);
    LoewnerResult lr = lambda_min(A, B, tol, seminorm_fourier_scale(kern, zero_zero));
    CurvePoint pt;
    pt.k = k;
    pt.rank_B = lr.rank_B;
    pt.full_rank = static_cast<int>(B.cols());
    pt.rank_deficient = lr.rank_B < pt.full_rank;
    if (pt.rank_deficient && cfg.mode == SweepConfig::Mode::StrictSkip) {
        pt.skipped = true;
        pt.lambda = ExtendedReal::plus_inf(); // ignored in minima
    } else {
        pt.lambda = lr.value;
    }
    return pt;
}

/// Sweep of lambda_min(f_V^(Ind chi_k rho), g^(Ind chi_k rho)) over K_rho,
/// with local refinement around the minimum and divergence probing around
/// rank-deficient points. d2 <= 1 uses the exact interval; d2 = 2 a grid over
/// the dual-basis box.
inline LambdaCurve lambda_curve(const GroupDescriptor& G, const HessianKernel& f,
                                const SeminormKernels& kern, bool zero_zero, const TFRep& rho,
                                const KDomain& K, const SweepConfig& cfg,
                                const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    LambdaCurve out;
    const int threads = detail::sweep_thread_count(cfg);
    auto eval = [&](const Eigen::VectorXd& k) {
        return evaluate_k(G, f, kern, zero_zero, rho, k, cfg, tol);
    };

    if (K.dimension() == 0) {
        out.points.push_back(eval(Eigen::VectorXd::Zero(0)));
        const auto& p = out.points.front();
        if (!p.skipped) {
            out.minimum = p.lambda;
            out.minimizing_k = p.k;
            if (p.lambda.is_minus_inf())
                out.divergences.push_back({p.k, {}, "extended Loewner value -inf at the point"});
        }
        return out;
    }
    if (K.dimension() > 2)
        throw std::runtime_error("lambda_curve: only d2 <= 2 wave-vector domains are implemented");

    // grid
    std::vector<Eigen::VectorXd> ks;
    if (K.dimension() == 1) {
        const double hi = K.extent[0];
        for (int j = 0; j <= cfg.grid_points; ++j) {
            Eigen::VectorXd k = K.dual_basis * Eigen::VectorXd::Constant(1, hi * j / cfg.grid_points);
            ks.push_back(k);
        }
    } else {
        const int m = std::max(8, static_cast<int>(std::lround(std::sqrt(double(cfg.grid_points)))));
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                Eigen::VectorXd frac(2);
                frac << K.extent[0] * i / m, K.extent[1] * j / m;
                ks.push_back(K.dual_basis * frac);
            }
    }
    out.points.resize(ks.size());
    detail::parallel_for(ks.size(), threads, [&](std::size_t i) { out.points[i] = eval(ks[i]); });

    const double cell = (K.dimension() == 1)
                            ? (K.dual_basis * Eigen::VectorXd::Constant(1, K.extent[0])).norm() / cfg.grid_points
                            : (K.dual_basis * K.extent).norm() / std::sqrt(double(cfg.grid_points));
    out.final_cell = cell;

    auto better = [](const CurvePoint& a, const CurvePoint& b) {
        if (a.skipped) return false;
        if (b.skipped) return true;
        return a.lambda < b.lambda;
    };

    // local refinement around the best grid point
    std::size_t besti = 0;
    for (std::size_t i = 1; i < out.points.size(); ++i)
        if (better(out.points[i], out.points[besti])) besti = i;
    CurvePoint best = out.points[besti];
    if (!best.skipped && best.lambda.is_finite() && K.dimension() == 1) {
        Eigen::VectorXd dir = K.dual_basis.col(0).normalized();
        const double lo = 0, hi = (K.dual_basis * Eigen::VectorXd::Constant(1, K.extent[0])).norm();
        const double prev = best.lambda.value;
        // bracket refinement around the grid minimum; the bracket keeps a
        // possible pole between grid points inside while halving, and keeps
        // digging past the configured depth while the value dives pole-like
        double kl = std::max(lo, best.k.norm() - cell);
        double kr = std::min(hi, best.k.norm() + cell);
        double km = 0.5 * (kl + kr);
        CurvePoint pm = eval(dir * km);
        pm.refined = true;
        out.points.push_back(pm);
        if (better(pm, best)) best = pm;
        std::vector<std::pair<double, double>> dig;
        dig.emplace_back(kr - kl, best.lambda.value);
        const int max_extra = 60;
        std::vector<double> history{best.lambda.is_finite() ? best.lambda.value : 0.0};
        for (int it = 0; it < cfg.refinement_depth + max_extra; ++it) {
            const double q1 = 0.5 * (kl + km), q2 = 0.5 * (km + kr);
            CurvePoint p1 = eval(dir * q1), p2 = eval(dir * q2);
            p1.refined = p2.refined = true;
            out.points.push_back(p1);
            out.points.push_back(p2);
            if (better(p1, best)) best = p1;
            if (better(p2, best)) best = p2;
            // trisection step: keep the sampled interior minimum inside
            if (better(p1, pm) && !better(p2, p1)) {
                kr = km; km = q1; pm = p1;
            } else if (better(p2, pm)) {
                kl = km; km = q2; pm = p2;
            } else {
                kl = q1; kr = q2;
            }
            out.final_cell = kr - kl;
            if (!best.lambda.is_finite()) break;
            dig.emplace_back(kr - kl, best.lambda.value);
            history.push_back(best.lambda.value);
            if (it >= cfg.refinement_depth - 1) {
                if (best.lambda.value < cfg.divergence_floor) break;
                // keep digging while the value dives pole-like over a
                // two-level window
                const std::size_t h2 = history.size() >= 3 ? history.size() - 3 : 0;
                const bool pole_like = best.lambda.value < -1.0 &&
                                       best.lambda.value < 1.5 * history[h2];
                if (!pole_like) break;
            }
        }
        out.last_refine_delta = best.lambda.is_finite() ? std::abs(best.lambda.value - prev) : 0;
        if (best.lambda.is_finite() && best.lambda.value < cfg.divergence_floor) {
            DivergenceEvidence ev;
            ev.at_k = best.k;
            ev.trail = dig;
            ev.note = "refinement drove the minimum below the divergence floor";
            out.divergences.push_back(std::move(ev));
        }
    }
    if (!best.skipped) {
        out.minimum = best.lambda;
        out.minimizing_k = best.k;
    }

    // divergence probes around flagged points (rank-deficient or -inf)
    if (K.dimension() == 1) {
        const double hi = (K.dual_basis * Eigen::VectorXd::Constant(1, K.extent[0])).norm();
        Eigen::VectorXd dir = K.dual_basis.col(0).normalized();
        std::vector<double> flagged;
        for (const auto& p : out.points) {
            if (!p.rank_deficient && !p.lambda.is_minus_inf()) continue;
            double kv = p.k.norm();
            bool seen = false;
            for (double f2 : flagged)
                if (std::abs(f2 - kv) < 0.25 * cell) { seen = true; break; }
            if (!seen) flagged.push_back(kv);
        }
        SweepConfig probe_cfg = cfg;
        probe_cfg.mode = SweepConfig::Mode::ExtendedLoewner;
        for (double kstar : flagged) {
            for (double sgn : {+1.0, -1.0}) {
                DivergenceEvidence ev;
                ev.at_k = dir * kstar;
                bool monotone = true;
                double lastv = std::numeric_limits<double>::infinity();
                // geometric approach; stop as soon as the floor is crossed
                // monotonically or monotonicity breaks
                for (int j = 1; j <= cfg.refinement_depth + 10; ++j) {
                    double off = sgn * cell * std::pow(2.0, -j);
                    double kc = kstar + off;
                    if (kc < 0 || kc > hi) continue;
                    CurvePoint p = evaluate_k(G, f, kern, zero_zero, rho, dir * kc, probe_cfg, tol);
                    if (!p.lambda.is_finite()) continue;
                    ev.trail.emplace_back(off, p.lambda.value);
                    if (p.lambda.value > lastv + 1e-6 * (1.0 + std::abs(lastv))) { monotone = false; break; }
                    lastv = p.lambda.value;
                    if (lastv < cfg.divergence_floor) break;
                }
                if (ev.trail.size() >= 3 && monotone && lastv < cfg.divergence_floor) {
                    ev.note = "monotone divergence approaching k = " + std::to_string(kstar);
                    out.divergences.push_back(std::move(ev));
                }
            }
        }
        // extended mode can certify -inf directly at a flagged point
        for (const auto& p : out.points)
            if (p.lambda.is_minus_inf())
                out.divergences.push_back({p.k, {}, "extended Loewner value -inf at the point"});
    }
    return out;
}

struct StabilityReport {
    enum class Verdict { StableR00, StableR, Unstable, NotCritical };
    ExtendedReal lambda_R = ExtendedReal::plus_inf();
    ExtendedReal lambda_R00 = ExtendedReal::plus_inf();
    CriticalityReport crit;
    Verdict verdict = Verdict::Unstable;
    bool lambda_meaningful = true; // false when e_V != 0
    std::vector<LambdaCurve> curves_R, curves_R00; // one per rho
    int min_rho_R = 0, min_rho_R00 = 0;
    Eigen::VectorXd min_k_R, min_k_R00;

    std::string verdict_str() const {
        switch (verdict) {
            case Verdict::StableR00: return "stable_R00";
            case Verdict::StableR: return "stable_R";
            case Verdict::Unstable: return "unstable";
            case Verdict::NotCritical: return "not_critical";
        }
        return "";
    }
};

/// Full stability run: criticality, kernels, per-rho sweeps for both
/// seminorms, infimum with divergence evidence, verdict.
inline StabilityReport stability_constants(const ProblemSetup& setup, const DualDomain& dual,
                                           const SweepConfig& cfg,
                                           const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    StabilityReport rep;
    rep.crit = compute_eV(setup.s, setup.V, tol);
    rep.lambda_meaningful = rep.crit.is_critical;

    HessianKernel f = compute_fV(setup.s, setup.V, tol);
    SeminormKernels kern = seminorm_kernels(setup.s, setup.R, tol);

    auto run = [&](bool zero_zero, std::vector<LambdaCurve>& curves, ExtendedReal& lambda,
                   int& min_rho, Eigen::VectorXd& min_k) {
        lambda = ExtendedReal::plus_inf();
        for (std::size_t r = 0; r < dual.reps.size(); ++r) {
            LambdaCurve c = lambda_curve(setup.s.group, f, kern, zero_zero, dual.reps[r].rho,
                                         dual.reps[r].K, cfg, tol);
            ExtendedReal v = c.value();
            if (v < lambda) {
                lambda = v;
                min_rho = static_cast<int>(r);
                min_k = c.minimizing_k;
            }
            curves.push_back(std::move(c));
        }
    };
    run(false, rep.curves_R, rep.lambda_R, rep.min_rho_R, rep.min_k_R);
    run(true, rep.curves_R00, rep.lambda_R00, rep.min_rho_R00, rep.min_k_R00);

    if (!rep.crit.is_critical) rep.verdict = StabilityReport::Verdict::NotCritical;
    else if (rep.lambda_R00.is_finite() ? rep.lambda_R00.value > 0 : rep.lambda_R00.is_plus_inf())
        rep.verdict = StabilityReport::Verdict::StableR00;
    else if (rep.lambda_R.is_finite() ? rep.lambda_R.value > 0 : rep.lambda_R.is_plus_inf())
        rep.verdict = StabilityReport::Verdict::StableR;
    else
        rep.verdict = StabilityReport::Verdict::Unstable;
    return rep;
}

// ---------------------------------------------------------------------------
// Supercell oracle: direct minimum generalized eigenvalue on the full
// T^N-periodic displacement space.

inline ExtendedReal supercell_lambda(const ProblemSetup& setup, int N, bool zero_zero,
                                     const ToleranceConfig& tol = ToleranceConfig::defaults(),
                                     std::size_t max_dofs = 4096) {
    const auto& G = setup.s.group;
    HessianKernel f = compute_fV(setup.s, setup.V, tol);
    SeminormKernels kern = seminorm_kernels(setup.s, setup.R, tol);
    auto reps = G.coset_reps(N);
    const int d = G.d;
    const std::size_t n = reps.size() * static_cast<std::size_t>(d);
    if (n > max_dofs) throw std::runtime_error("supercell_lambda: supercell exceeds the memory cap");

    Eigen::MatrixXd H(n, n);
    for (std::size_t i = 0; i < reps.size(); ++i)
        for (std::size_t j = 0; j < reps.size(); ++j)
            H.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d) =
                hessian_block(G, f, reps[j], reps[i], N);

    // Gram matrix of the seminorm on T^N-periodic fields
    const Eigen::MatrixXd& P = zero_zero ? kern.proj.P0 : kern.proj.P;
    Eigen::MatrixXd Gram = Eigen::MatrixXd::Zero(n, n);
    const std::size_t nr = kern.R.size();
    for (const auto& g : reps) {
        Eigen::MatrixXd Sg = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nr) * d, n);
        for (std::size_t i = 0; i < nr; ++i) {
            std::size_t ci = G.coset_index(G.compose(g, kern.R[i]), N);
            Sg.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(ci) * d, d, d) =
                Eigen::MatrixXd::Identity(d, d);
        }
        Gram += Sg.transpose() * P * Sg;
    }
    Gram /= static_cast<double>(reps.size());

    // B with B^H B = Gram; H and Gram carry the same 1/|C_N| scaling.
    // Gram eigenvalues are thresholded before the square root: roundoff of
    // size eps*||Gram|| would otherwise surface as sqrt(eps) pseudo-rank.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Gram + Gram.transpose()));
    Eigen::VectorXd ev = es.eigenvalues();
    const double evmax = ev.size() ? ev.maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] < 1e-12 * evmax) ev[i] = 0.0;
    ev = ev.cwiseSqrt();
    Eigen::MatrixXd B = ev.asDiagonal() * es.eigenvectors().transpose();

    LoewnerResult lr = lambda_min(H.cast<Complex>().eval(), B.cast<Complex>().eval(), tol);
    return lr.value;
}

/// Minimum of the Fourier route restricted to the discrete dual slice L*/N.
inline ExtendedReal fourier_min_over_lattice(const ProblemSetup& setup, const DualDomain& dual,
                                             int N, bool zero_zero,
                                             const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    const auto& G = setup.s.group;
    if (G.d2 != 1) throw std::runtime_error("fourier_min_over_lattice: implemented for d2 = 1");
    HessianKernel f = compute_fV(setup.s, setup.V, tol);
    SeminormKernels kern = seminorm_kernels(setup.s, setup.R, tol);
    SweepConfig cfg;
    cfg.mode = SweepConfig::Mode::ExtendedLoewner;
    ExtendedReal best = ExtendedReal::plus_inf();
    for (const auto& cls : dual.reps) {
        const double lstar = G.dual_lattice_basis()(0, 0);
        for (int j = 0; j < N; ++j) {
            Eigen::VectorXd k(1);
            k << lstar * j / N;
            CurvePoint p = evaluate_k(G, f, kern, zero_zero, cls.rho, k, cfg, tol);
            if (p.lambda < best) best = p.lambda;
        }
    }
    return best;
}

/// Rayleigh-quotient audit of a reported finite lambda against random
/// periodic fields: E''(u,u) >= lambda * ||u||^2 - slack.
struct RayleighCheck {
    bool passed = true;
    double worst_violation = 0;
    int trials = 0;
};

inline RayleighCheck rayleigh_check(const ProblemSetup& setup, const StabilityReport& rep,
                                    int trials, unsigned seed = 12345,
                                    const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    RayleighCheck out;
    const auto& G = setup.s.group;
    HessianKernel f = compute_fV(setup.s, setup.V, tol);
    SeminormKernels kern = seminorm_kernels(setup.s, setup.R, tol);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> npick(1, 16);
    for (int t = 0; t < trials; ++t) {
        int N = G.m0 * npick(rng);
        RealField u = random_displacement_field(G, N, rng);
        double e2 = quadratic_form_convolution(G, f, u, u);
        double unorm2 = std::pow(field_norm(u), 2);
        for (bool zz : {false, true}) {
            const ExtendedReal& lam = zz ? rep.lambda_R00 : rep.lambda_R;
            if (!lam.is_finite()) continue;
            double sn = seminorm_eval(setup.s, kern, u, zz, tol).value;
            double lhs = e2;
            double rhs = lam.value * sn * sn - 1e-8 * (1.0 + unorm2);
            if (lhs < rhs) {
                out.passed = false;
                out.worst_violation = std::max(out.worst_violation, rhs - lhs);
            }
        }
        ++out.trials;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nelder-Mead relaxation

struct NelderMeadOptions {
    double initial_scale = 0.05;
    double diameter_tol = 1e-10;
    double fspread_tol = 1e-12;
    int max_iterations = 20000;
    int restarts = 3;
    double restart_shrink = 0.5;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f = 0;
    bool converged = false;
    int iterations = 0;
    int restarts_used = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd x0, NelderMeadOptions opt = {}) {
    const int n = static_cast<int>(x0.size());
    NelderMeadResult out;
    out.x = x0;
    out.f = f(x0);

    double scale = opt.initial_scale;
    for (int restart = 0; restart <= opt.restarts; ++restart) {
        std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(n + 1), out.x);
        std::vector<double> fs(static_cast<std::size_t>(n + 1));
        for (int i = 0; i < n; ++i) {
            double h = scale * std::max(1.0, std::abs(out.x[i]));
            xs[static_cast<std::size_t>(i + 1)][i] += h;
        }
        for (int i = 0; i <= n; ++i) fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);

        auto order = [&]() {
            std::vector<int> idx(static_cast<std::size_t>(n + 1));
            for (int i = 0; i <= n; ++i) idx[static_cast<std::size_t>(i)] = i;
            std::sort(idx.begin(), idx.end(), [&](int a, int b) {
                return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)];
            });
            std::vector<Eigen::VectorXd> x2;
            std::vector<double> f2;
            for (int i : idx) {
                x2.push_back(xs[static_cast<std::size_t>(i)]);
                f2.push_back(fs[static_cast<std::size_t>(i)]);
            }
            xs = std::move(x2);
            fs = std::move(f2);
        };

        int it = 0;
        for (; it < opt.max_iterations; ++it) {
            order();
            double diam = 0;
            for (int i = 1; i <= n; ++i) diam = std::max(diam, (xs[static_cast<std::size_t>(i)] - xs[0]).norm());
            double spread = std::abs(fs[static_cast<std::size_t>(n)] - fs[0]);
            if (diam < opt.diameter_tol && spread < opt.fspread_tol) break;

            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i) centroid += xs[static_cast<std::size_t>(i)];
            centroid /= n;

            const Eigen::VectorXd& worst = xs[static_cast<std::size_t>(n)];
            Eigen::VectorXd xr = centroid + (centroid - worst);
            double fr = f(xr);
            if (fr < fs[0]) {
                Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);
                double fe = f(xe);
                if (fe < fr) { xs[static_cast<std::size_t>(n)] = xe; fs[static_cast<std::size_t>(n)] = fe; }
                else { xs[static_cast<std::size_t>(n)] = xr; fs[static_cast<std::size_t>(n)] = fr; }
            } else if (fr < fs[static_cast<std::size_t>(n - 1)]) {
                xs[static_cast<std::size_t>(n)] = xr;
                fs[static_cast<std::size_t>(n)] = fr;
            } else {
                Eigen::VectorXd xc = centroid + 0.5 * ((fr < fs[static_cast<std::size_t>(n)] ? xr : worst) - centroid);
                double fc = f(xc);
                if (fc < std::min(fr, fs[static_cast<std::size_t>(n)])) {
                    xs[static_cast<std::size_t>(n)] = xc;
                    fs[static_cast<std::size_t>(n)] = fc;
                } else {
                    for (int i = 1; i <= n; ++i) {
                        xs[static_cast<std::size_t>(i)] = xs[0] + 0.5 * (xs[static_cast<std::size_t>(i)] - xs[0]);
                        fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
                    }
                }
            }
        }
        order();
        out.iterations += it;
        out.restarts_used = restart;
        bool improved = fs[0] < out.f - 1e-15;
        out.x = xs[0];
        out.f = fs[0];
        out.converged = it < opt.max_iterations;
        scale *= opt.restart_shrink;
        if (!improved && restart > 0) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parametrized families for relaxation

struct RelaxationResult {
    Eigen::VectorXd params;
    double energy = 0;
    double eV_norm = 0;
    bool converged = false;
    bool feasible = true;
};

/// Chain: single parameter a.
inline RelaxationResult relax_chain(double a_init = 1.1) {
    auto energy = [](const Eigen::VectorXd& p) {
        if (p[0] <= 0.1) return 1e50;
        return chain_energy_closed_form(p[0]);
    };
    Eigen::VectorXd x0(1);
    x0 << a_init;
    NelderMeadOptions opt;
    opt.initial_scale = 0.05;
    auto r = nelder_mead(energy, x0, opt);
    RelaxationResult out;
    out.params = r.x;
    out.energy = r.f;
    out.converged = r.converged;
    ProblemSetup setup = chain_setup(r.x[0]);
    out.eV_norm = compute_eV(setup.s, setup.V).norm;
    return out;
}

namespace detail {

inline double nanotube_energy(const NanotubeParams& p) {
    if (!nanotube_in_U(p)) return 1e50;
    ProblemSetup setup = nanotube_setup(p);
    SiteConfiguration y0 = reference_configuration(setup.s, setup.V);
    return setup.V.energy(y0);
}

/// Newton steps on x at fixed (a, alpha): gradient is e_V, Hessian the
/// finite pair sum of (rot(g)-I)^T d2V (rot(h)-I).
inline bool newton_polish_x(NanotubeParams& p, int max_steps = 40) {
    for (int it = 0; it < max_steps; ++it) {
        ProblemSetup setup = nanotube_setup(p);
        const auto& G = setup.s.group;
        SiteConfiguration y0 = reference_configuration(setup.s, setup.V);
        Eigen::RowVectorXd ev = Eigen::RowVectorXd::Zero(3);
        for (const auto& g : setup.V.range())
            ev += setup.V.partial_grad(y0, g) *
                  (G.realize(g).rot - Eigen::MatrixXd::Identity(3, 3));
        if (ev.norm() < 1e-12) return true;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3, 3);
        for (const auto& g : setup.V.range()) {
            Eigen::MatrixXd rg = G.realize(g).rot - Eigen::MatrixXd::Identity(3, 3);
            for (const auto& h : setup.V.range()) {
                Eigen::MatrixXd rh = G.realize(h).rot - Eigen::MatrixXd::Identity(3, 3);
                H += rg.transpose() * setup.V.partial_hess(y0, g, h) * rh;
            }
        }
        Eigen::VectorXd step = H.fullPivLu().solve(-ev.transpose());
        double t = 1.0;
        double e0 = nanotube_energy(p);
        for (int half = 0; half < 30; ++half) {
            NanotubeParams q = p;
            q.x += t * step;
            if (nanotube_in_U(q) && nanotube_energy(q) <= e0 + 1e-14) { p = q; break; }
            t *= 0.5;
            if (half == 29) return false;
        }
    }
    ProblemSetup setup = nanotube_setup(p);
    return compute_eV(setup.s, setup.V).norm <= 1e-8;
}

} // namespace detail

/// Five-parameter nanotube relaxation (a, alpha, x) from an initial guess,
/// Nelder-Mead with restarts and a Newton polish of x.
inline RelaxationResult relax_nanotube(const NanotubeParams& init) {
    auto energy = [](const Eigen::VectorXd& v) {
        NanotubeParams p{v[0], v[1], Eigen::Vector3d(v[2], v[3], v[4])};
        return detail::nanotube_energy(p);
    };
    Eigen::VectorXd x0(5);
    x0 << init.a, init.alpha, init.x[0], init.x[1], init.x[2];
    NelderMeadOptions opt;
    opt.initial_scale = 0.02;
    opt.diameter_tol = 1e-10;
    opt.fspread_tol = 1e-12;
    auto r = nelder_mead(energy, x0, opt);

    NanotubeParams p{r.x[0], r.x[1], Eigen::Vector3d(r.x[2], r.x[3], r.x[4])};
    bool polished = detail::newton_polish_x(p);
    RelaxationResult out;
    out.params.resize(5);
    out.params << p.a, p.alpha, p.x[0], p.x[1], p.x[2];
    out.energy = detail::nanotube_energy(p);
    out.feasible = nanotube_in_U(p);
    ProblemSetup setup = nanotube_setup(p);
    out.eV_norm = compute_eV(setup.s, setup.V).norm;
    out.converged = r.converged && polished && out.feasible;
    return out;
}

/// x_a = argmin_x E at fixed (a, alpha), for sampling the relaxed family.
inline RelaxationResult relax_nanotube_x(double a, double alpha, const Eigen::Vector3d& x_init) {
    auto energy = [&](const Eigen::VectorXd& v) {
        NanotubeParams p{a, alpha, Eigen::Vector3d(v[0], v[1], v[2])};
        return detail::nanotube_energy(p);
    };
    Eigen::VectorXd x0(3);
    x0 << x_init[0], x_init[1], x_init[2];
    NelderMeadOptions opt;
    opt.initial_scale = 0.02;
    auto r = nelder_mead(energy, x0, opt);
    NanotubeParams p{a, alpha, Eigen::Vector3d(r.x[0], r.x[1], r.x[2])};
    bool polished = detail::newton_polish_x(p);
    RelaxationResult out;
    out.params.resize(3);
    out.params << p.x[0], p.x[1], p.x[2];
    out.energy = detail::nanotube_energy(p);
    out.feasible = nanotube_in_U(p);
    ProblemSetup setup = nanotube_setup(p);
    out.eV_norm = compute_eV(setup.s, setup.V).norm;
    out.converged = r.converged && polished && out.feasible;
    return out;
}

// ---------------------------------------------------------------------------
// Scale sweeps and zero crossings

struct SweepRow {
    double a = 0;
    ExtendedReal lambda_R, lambda_R00;
    double eV_norm = 0;
    double energy = 0;
    bool failed = false;
    std::string error;
};

inline std::vector<SweepRow> scale_sweep(const std::function<ProblemSetup(double)>& family,
                                         const std::vector<double>& as, const SweepConfig& cfg,
                                         const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    std::vector<SweepRow> rows;
    for (double a : as) {
        SweepRow row;
        row.a = a;
        try {
            ProblemSetup setup = family(a);
            DualDomain dual = dual_domain(setup.s.group);
            StabilityReport rep = stability_constants(setup, dual, cfg, tol);
            row.lambda_R = rep.lambda_R;
            row.lambda_R00 = rep.lambda_R00;
            row.eV_norm = rep.crit.norm;
            SiteConfiguration y0 = reference_configuration(setup.s, setup.V);
            row.energy = setup.V.energy(y0);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Bisection on a sign change of a scalar function of a (40 iterations).
inline std::optional<double> bisect_zero(const std::function<double(double)>& f, double lo, double hi,
                                         int iters = 40, double tol_a = 1e-6) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) == (fhi < 0)) return std::nullopt;
    for (int i = 0; i < iters && hi - lo > tol_a; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
        else { hi = mid; fhi = fm; }
    }
    return 0.5 * (lo + hi);
}

} // namespace objstab
