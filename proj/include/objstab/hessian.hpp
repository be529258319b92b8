#pragma once

#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "objstab/fields.hpp"
#include "objstab/group.hpp"
#include "objstab/potential.hpp"

namespace objstab {

/// y0(g) = g.x0 - x0 assembled over a support that covers the interaction range.
inline SiteConfiguration reference_configuration(const Structure& s, const SitePotential& V) {
    SiteConfiguration y0;
    for (const auto& g : V.range())
        y0.set(g, s.relative_position(g));
    return y0;
}

struct CriticalityReport {
    Eigen::RowVectorXd e_V;
    double norm = 0;
    bool is_critical = false;
    double tolerance = 0;
};

/// e_V = sum_g dV_g(y0) (rot(g) - I); zero iff x-bar is a critical point.
inline CriticalityReport compute_eV(const Structure& s, const SitePotential& V,
                                    const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    SiteConfiguration y0 = reference_configuration(s, V);
    const int d = s.group.d;
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(d);
    for (const auto& g : V.range()) {
        Eigen::MatrixXd rot = s.group.realize(g).rot;
        e += V.partial_grad(y0, g) * (rot - Eigen::MatrixXd::Identity(d, d));
    }
    CriticalityReport rep;
    rep.e_V = e;
    rep.norm = e.norm();
    rep.tolerance = tol.criticality;
    rep.is_critical = rep.norm <= tol.criticality;
    return rep;
}

/// Finitely supported matrix-valued convolution kernel on G, keyed on exact words.
class HessianKernel {
public:
    HessianKernel() = default;
    explicit HessianKernel(int d) : d_(d) {}

    int dim() const { return d_; }

    void accumulate(const GroupWord& g, const Eigen::MatrixXd& m) {
        auto it = entries_.find(g);
        if (it == entries_.end()) entries_.emplace(g, m);
        else it->second += m;
    }

    bool has(const GroupWord& g) const { return entries_.count(g) > 0; }

    Eigen::MatrixXd value(const GroupWord& g) const {
        auto it = entries_.find(g);
        if (it == entries_.end()) return Eigen::MatrixXd::Zero(d_, d_);
        return it->second;
    }

    std::vector<GroupWord> support() const {
        std::vector<GroupWord> s;
        s.reserve(entries_.size());
        for (const auto& [w, m] : entries_) s.push_back(w);
        std::sort(s.begin(), s.end(), word_less);
        return s;
    }

    std::size_t support_size() const { return entries_.size(); }

    /// Drops keys whose entries are uniformly below rel * (global max entry).
    void prune(double rel) {
        double mx = 0;
        for (const auto& [w, m] : entries_) mx = std::max(mx, m.cwiseAbs().maxCoeff());
        if (mx == 0) { entries_.clear(); return; }
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (it->second.cwiseAbs().maxCoeff() < rel * mx) it = entries_.erase(it);
            else ++it;
        }
    }

private:
    int d_ = 0;
    std::unordered_map<GroupWord, Eigen::MatrixXd, GroupWordHash> entries_;
};

/// Four-term assembly of the Hessian kernel f_V over pairs of range words,
/// accumulated on exact word keys.
inline HessianKernel compute_fV(const Structure& s, const SitePotential& V,
                                const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    SiteConfiguration y0 = reference_configuration(s, V);
    const auto& G = s.group;
    const int d = G.d;
    HessianKernel f(d);
    const GroupWord id = G.identity_word();
    for (const auto& h2 : V.range()) {
        Eigen::MatrixXd rot2 = G.realize(h2).rot;
        GroupWord h2inv = G.inverse(h2);
        for (const auto& h1 : V.range()) {
            Eigen::MatrixXd H = V.partial_hess(y0, h2, h1);
            if (H.cwiseAbs().maxCoeff() == 0) continue;
            Eigen::MatrixXd rot1 = G.realize(h1).rot;
            f.accumulate(G.compose(h2inv, h1), rot2.transpose() * H * rot1);
            f.accumulate(h2inv, -(rot2.transpose() * H));
            f.accumulate(h1, -(H * rot1));
            f.accumulate(id, H);
        }
    }
    f.prune(tol.kernel_prune);
    return f;
}

/// (1/|C_N|) sum_{t in T^N} f_V(g2^{-1} g1 t): the partial Hessian block of
/// the configurational energy between the cosets of g1 and g2.
inline Eigen::MatrixXd hessian_block(const GroupDescriptor& G, const HessianKernel& f,
                                     const GroupWord& g1, const GroupWord& g2, int N) {
    if (N <= 0 || N % G.m0 != 0) throw std::invalid_argument("hessian_block: bad N");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(f.dim(), f.dim());
    GroupWord base = G.compose(G.inverse(g2), g1);
    // finite support: w contributes exactly when base^{-1} w lies in T^N
    for (const auto& w : f.support()) {
        GroupWord diff = G.compose(G.inverse(base), w);
        if (diff.q != 0) continue;
        bool integral = true;
        for (Eigen::Index i = 0; i < diff.z.size(); ++i)
            if (diff.z[i] % N != 0) { integral = false; break; }
        if (!integral) continue;
        acc += f.value(w);
    }
    const double cn = static_cast<double>(G.coset_count(N));
    return acc / cn;
}

/// Per-site configurational energy of w = x-bar + u for a T^N-periodic
/// displacement u; evaluates V on deformed relative positions site by site.
inline double energy_per_site(const Structure& s, const SitePotential& V, const RealField& u) {
    const auto& G = s.group;
    const int N = u.period();
    auto reps = G.coset_reps(N);
    double acc = 0;
    for (const auto& g : reps) {
        SiteConfiguration yg;
        Eigen::VectorXd xg = G.act(g, s.x0 + u(g).col(0));
        for (const auto& h : V.range()) {
            GroupWord gh = G.compose(g, h);
            yg.set(h, G.act(gh, s.x0 + u(gh).col(0)) - xg);
        }
        acc += V.energy(yg);
    }
    return acc / static_cast<double>(reps.size());
}

/// E''(x-bar)(u,v) by the direct sum of Lemma-style second differentials.
inline double quadratic_form_direct(const Structure& s, const SitePotential& V,
                                    const RealField& u, const RealField& v) {
    const auto& G = s.group;
    SiteConfiguration y0 = reference_configuration(s, V);
    int N = std::lcm(u.period(), v.period());
    auto reps = G.coset_reps(N);
    const auto& range = V.range();
    const std::size_t nr = range.size();

    std::vector<Eigen::MatrixXd> rot(nr);
    std::vector<std::vector<Eigen::MatrixXd>> H(nr, std::vector<Eigen::MatrixXd>(nr));
    for (std::size_t i = 0; i < nr; ++i) {
        rot[i] = G.realize(range[i]).rot;
        for (std::size_t j = 0; j < nr; ++j) H[i][j] = V.partial_hess(y0, range[i], range[j]);
    }

    double acc = 0;
    for (const auto& g : reps) {
        std::vector<Eigen::VectorXd> zu(nr), zv(nr);
        for (std::size_t i = 0; i < nr; ++i) {
            GroupWord gh = G.compose(g, range[i]);
            zu[i] = rot[i] * u(gh).col(0) - u(g).col(0);
            zv[i] = rot[i] * v(gh).col(0) - v(g).col(0);
        }
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nr; ++j)
                acc += zu[i].dot(H[i][j] * zv[j]);
    }
    return acc / static_cast<double>(reps.size());
}

/// E''(x-bar)(u,v) through the convolution kernel: <f_V * v0, u0>.
inline double quadratic_form_convolution(const GroupDescriptor& G, const HessianKernel& f,
                                         const RealField& u, const RealField& v) {
    int N = std::lcm(u.period(), v.period());
    auto reps = G.coset_reps(N);
    RealField u0 = u.inverted_argument();
    RealField v0 = v.inverted_argument();
    double acc = 0;
    auto supp = f.support();
    for (const auto& g : reps) {
        Eigen::VectorXd conv = Eigen::VectorXd::Zero(f.dim());
        for (const auto& h : supp)
            conv += f.value(h) * v0(G.compose(G.inverse(h), g)).col(0);
        acc += u0(g).col(0).dot(conv);
    }
    return acc / static_cast<double>(reps.size());
}

struct QuadraticFormResult {
    double value = 0;          // convolution route
    double direct = 0;         // direct route
    double discrepancy = 0;
};

/// Both routes; they must agree within tol.route_agree (Lemma-level identity).
inline QuadraticFormResult quadratic_form(const Structure& s, const SitePotential& V,
                                          const HessianKernel& f, const RealField& u,
                                          const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    QuadraticFormResult r;
    r.value = quadratic_form_convolution(s.group, f, u, u);
    r.direct = quadratic_form_direct(s, V, u, u);
    r.discrepancy = std::abs(r.value - r.direct);
    if (r.discrepancy > tol.route_agree * (1.0 + std::abs(r.value)))
        throw std::runtime_error("quadratic_form: direct and convolution routes disagree by " +
                                 std::to_string(r.discrepancy));
    return r;
}

} // namespace objstab
