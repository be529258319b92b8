#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "objstab/group.hpp"

namespace objstab {

/// Relative positions y(g), keyed on words of G \ {id}.
class SiteConfiguration {
public:
    SiteConfiguration() = default;

    void set(const GroupWord& g, Eigen::VectorXd v) {
        if (g.is_identity()) throw std::invalid_argument("site configuration: id is not a valid key");
        values_[g] = std::move(v);
    }

    bool has(const GroupWord& g) const { return values_.count(g) > 0; }

    const Eigen::VectorXd& at(const GroupWord& g) const {
        auto it = values_.find(g);
        if (it == values_.end())
            throw std::out_of_range("site configuration: missing key " + g.str());
        return it->second;
    }

    const std::unordered_map<GroupWord, Eigen::VectorXd, GroupWordHash>& values() const { return values_; }

    std::vector<GroupWord> support_sorted() const {
        std::vector<GroupWord> s;
        s.reserve(values_.size());
        for (const auto& [w, v] : values_) s.push_back(w);
        std::sort(s.begin(), s.end(), word_less);
        return s;
    }

private:
    std::unordered_map<GroupWord, Eigen::VectorXd, GroupWordHash> values_;
};

/// Scalar bond potential v(r) with two derivatives.
struct RadialFunction {
    enum class Kind { LennardJones, InversePower, Harmonic };
    Kind kind = Kind::LennardJones;
    double c = 1.0;  // prefactor (inverse power)
    double p = 6.0;  // exponent (inverse power)
    double r0 = 1.0; // rest length (harmonic)

    static RadialFunction lennard_jones() { return {Kind::LennardJones, 0, 0, 0}; }
    static RadialFunction inverse_power(double c, double p) { return {Kind::InversePower, c, p, 0}; }
    static RadialFunction harmonic(double r0) { return {Kind::Harmonic, 0, 0, r0}; }

    double value(double r) const {
        switch (kind) {
            case Kind::LennardJones: return std::pow(r, -12.0) - std::pow(r, -6.0);
            case Kind::InversePower: return c * std::pow(r, -p);
            case Kind::Harmonic: return (r - r0) * (r - r0);
        }
        return 0;
    }
    double d1(double r) const {
        switch (kind) {
            case Kind::LennardJones: return -12.0 * std::pow(r, -13.0) + 6.0 * std::pow(r, -7.0);
            case Kind::InversePower: return -c * p * std::pow(r, -p - 1.0);
            case Kind::Harmonic: return 2.0 * (r - r0);
        }
        return 0;
    }
    double d2(double r) const {
        switch (kind) {
            case Kind::LennardJones: return 156.0 * std::pow(r, -14.0) - 42.0 * std::pow(r, -8.0);
            case Kind::InversePower: return c * p * (p + 1.0) * std::pow(r, -p - 2.0);
            case Kind::Harmonic: return 2.0;
        }
        return 0;
    }
};

/// Pair interaction weight * v(||y(g0)||) on a single relative word.
struct PairTerm {
    GroupWord neighbor;
    RadialFunction v;
    double weight = 1.0;
};

/// Bond-orientation interaction (cos angle + offset)^2 summed with prefactor
/// 1/2 over ordered pairs of distinct neighbors.
struct Cosine3Term {
    std::vector<GroupWord> neighbors;
    double offset = 0.5;
};

namespace detail {

inline void require_nonzero(const Eigen::VectorXd& v, const GroupWord& g) {
    if (v.norm() <= 1e-300)
        throw std::domain_error("potential: zero bond vector at " + g.str() +
                                " (collapsed configuration)");
}

struct CosineDerivs {
    double c;
    Eigen::VectorXd gx, gy;          // gradients of cos angle
    Eigen::MatrixXd hxx, hxy, hyy;   // second derivatives of cos angle
};

inline CosineDerivs cosine_derivs(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    CosineDerivs out;
    const double nx = x.norm(), ny = y.norm();
    const Eigen::VectorXd xh = x / nx, yh = y / ny;
    const double c = xh.dot(yh);
    out.c = c;
    out.gx = (yh - c * xh) / nx;
    out.gy = (xh - c * yh) / ny;
    const Eigen::Index d = x.size();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    out.hxx = (-(yh - c * xh) * xh.transpose() - xh * (yh - c * xh).transpose() -
               c * (I - xh * xh.transpose())) / (nx * nx);
    out.hyy = (-(xh - c * yh) * yh.transpose() - yh * (xh - c * yh).transpose() -
               c * (I - yh * yh.transpose())) / (ny * ny);
    out.hxy = (I - yh * yh.transpose() - xh * xh.transpose() + c * xh * yh.transpose()) / (nx * ny);
    return out;
}

} // namespace detail

/// Finite-range site potential: a list of built-in terms with analytic first
/// and second partial derivatives in the relative positions y(g).
class SitePotential {
public:
    SitePotential() = default;
    explicit SitePotential(int d) : d_(d) {}

    void add_pair(PairTerm t) {
        add_word(t.neighbor);
        pairs_.push_back(std::move(t));
    }
    void add_cosine3(Cosine3Term t) {
        for (const auto& w : t.neighbors) add_word(w);
        cosines_.push_back(std::move(t));
    }

    int dim() const { return d_; }
    const std::vector<GroupWord>& range() const { return range_; }
    bool in_range(const GroupWord& g) const { return range_set_.count(g) > 0; }
    const std::vector<PairTerm>& pair_terms() const { return pairs_; }
    const std::vector<Cosine3Term>& cosine_terms() const { return cosines_; }

    double energy(const SiteConfiguration& y) const {
        double e = 0;
        for (const auto& t : pairs_) {
            const auto& v = y.at(t.neighbor);
            detail::require_nonzero(v, t.neighbor);
            e += t.weight * t.v.value(v.norm());
        }
        for (const auto& t : cosines_) {
            for (std::size_t i = 0; i < t.neighbors.size(); ++i)
                for (std::size_t j = 0; j < t.neighbors.size(); ++j) {
                    if (i == j) continue;
                    const auto& a = y.at(t.neighbors[i]);
                    const auto& b = y.at(t.neighbors[j]);
                    detail::require_nonzero(a, t.neighbors[i]);
                    detail::require_nonzero(b, t.neighbors[j]);
                    double c = a.dot(b) / (a.norm() * b.norm());
                    double s = c + t.offset;
                    e += 0.5 * s * s;
                }
        }
        return e;
    }

    /// Row vector d_g V(y); zero off the interaction range.
    Eigen::RowVectorXd partial_grad(const SiteConfiguration& y, const GroupWord& g) const {
        Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(d_);
        if (!in_range(g)) return out;
        for (const auto& t : pairs_) {
            if (!(t.neighbor == g)) continue;
            const auto& v = y.at(g);
            detail::require_nonzero(v, g);
            double r = v.norm();
            out += t.weight * t.v.d1(r) * (v / r).transpose();
        }
        for (const auto& t : cosines_) {
            for (std::size_t i = 0; i < t.neighbors.size(); ++i)
                for (std::size_t j = 0; j < t.neighbors.size(); ++j) {
                    if (i == j) continue;
                    const bool gi = t.neighbors[i] == g, gj = t.neighbors[j] == g;
                    if (!gi && !gj) continue;
                    auto cd = detail::cosine_derivs(y.at(t.neighbors[i]), y.at(t.neighbors[j]));
                    double f = cd.c + t.offset;
                    if (gi) out += 0.5 * 2.0 * f * cd.gx.transpose();
                    if (gj) out += 0.5 * 2.0 * f * cd.gy.transpose();
                }
        }
        return out;
    }

    /// Matrix d_g d_h V(y); (i,j) entry is V''(y)(delta_g e_i, delta_h e_j).
    Eigen::MatrixXd partial_hess(const SiteConfiguration& y, const GroupWord& g,
                                 const GroupWord& h) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, d_);
        if (!in_range(g) || !in_range(h)) return out;
        if (g == h) {
            for (const auto& t : pairs_) {
                if (!(t.neighbor == g)) continue;
                const auto& v = y.at(g);
                detail::require_nonzero(v, g);
                double r = v.norm();
                Eigen::VectorXd u = v / r;
                out += t.weight * (t.v.d2(r) * u * u.transpose() +
                       (t.v.d1(r) / r) * (Eigen::MatrixXd::Identity(d_, d_) - u * u.transpose()));
            }
        }
        for (const auto& t : cosines_) {
            for (std::size_t i = 0; i < t.neighbors.size(); ++i)
                for (std::size_t j = 0; j < t.neighbors.size(); ++j) {
                    if (i == j) continue;
                    const bool xg = t.neighbors[i] == g, yg = t.neighbors[j] == g;
                    const bool xh = t.neighbors[i] == h, yh = t.neighbors[j] == h;
                    if (!(xg || yg) || !(xh || yh)) continue;
                    auto cd = detail::cosine_derivs(y.at(t.neighbors[i]), y.at(t.neighbors[j]));
                    double f = cd.c + t.offset;
                    // d^2 (f^2) = 2 grad grad^T + 2 f hess, per slot pair
                    if (xg && xh) out += 0.5 * (2.0 * cd.gx * cd.gx.transpose() + 2.0 * f * cd.hxx);
                    if (xg && yh) out += 0.5 * (2.0 * cd.gx * cd.gy.transpose() + 2.0 * f * cd.hxy);
                    if (yg && xh) out += 0.5 * (2.0 * cd.gy * cd.gx.transpose() + 2.0 * f * cd.hxy.transpose());
                    if (yg && yh) out += 0.5 * (2.0 * cd.gy * cd.gy.transpose() + 2.0 * f * cd.hyy);
                }
        }
        return out;
    }

private:
    int d_ = 0;
    std::vector<PairTerm> pairs_;
    std::vector<Cosine3Term> cosines_;
    std::vector<GroupWord> range_;
    std::unordered_map<GroupWord, int, GroupWordHash> range_set_;

    void add_word(const GroupWord& w) {
        if (w.is_identity())
            throw std::invalid_argument("potential: id cannot be an interaction neighbor");
        if (d_ == 0) throw std::logic_error("potential: dimension not set");
        if (!range_set_.count(w)) {
            range_set_[w] = static_cast<int>(range_.size());
            range_.push_back(w);
        }
    }
};

struct FdReport {
    double max_grad_rel = 0;
    double max_hess_rel = 0;
    GroupWord worst_grad, worst_hess;
};

/// Central-difference oracle over the support: test-side check of the
/// analytic partials, never a production fallback.
inline FdReport fd_check(const SitePotential& V, const SiteConfiguration& y, double step) {
    if (step <= 0) throw std::invalid_argument("fd_check: step must be positive");
    FdReport rep;
    const int d = V.dim();
    auto perturbed = [&](const GroupWord& g, int i, double eps) {
        SiteConfiguration yc = y;
        Eigen::VectorXd v = y.at(g);
        v[i] += eps;
        yc.set(g, v);
        return V.energy(yc);
    };
    for (const auto& g : V.range()) {
        Eigen::RowVectorXd an = V.partial_grad(y, g);
        Eigen::RowVectorXd fd(d);
        for (int i = 0; i < d; ++i)
            fd[i] = (perturbed(g, i, step) - perturbed(g, i, -step)) / (2 * step);
        double rel = (an - fd).norm() / (1.0 + an.norm());
        if (rel > rep.max_grad_rel) { rep.max_grad_rel = rel; rep.worst_grad = g; }
    }
    auto grad_perturbed = [&](const GroupWord& h, int j, double eps) {
        SiteConfiguration yc = y;
        Eigen::VectorXd v = y.at(h);
        v[j] += eps;
        yc.set(h, v);
        std::unordered_map<GroupWord, Eigen::RowVectorXd, GroupWordHash> gr;
        for (const auto& g : V.range()) gr[g] = V.partial_grad(yc, g);
        return gr;
    };
    for (const auto& h : V.range())
        for (int j = 0; j < d; ++j) {
            auto gp = grad_perturbed(h, j, step);
            auto gm = grad_perturbed(h, j, -step);
            for (const auto& g : V.range()) {
                Eigen::MatrixXd an = V.partial_hess(y, g, h);
                Eigen::VectorXd fd = (gp[g] - gm[g]).transpose() / (2 * step);
                double rel = (an.col(j) - fd).norm() / (1.0 + an.norm());
                if (rel > rep.max_hess_rel) { rep.max_hess_rel = rel; rep.worst_hess = g; }
            }
        }
    return rep;
}

} // namespace objstab
