#pragma once

#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "objstab/fields.hpp"
#include "objstab/group.hpp"

namespace objstab {

enum class RigidKind { Trans, Rot, Rot0, Rot00, Iso, Iso0, Iso00 };

struct PropertyFlags {
    bool property1 = false;
    bool property2 = false;
    std::vector<std::string> failures;
};

namespace detail {

inline Eigen::MatrixXd stacked_orbit_points(const Structure& s, const std::vector<GroupWord>& R) {
    Eigen::MatrixXd M(s.group.d, static_cast<Eigen::Index>(R.size()));
    for (std::size_t i = 0; i < R.size(); ++i)
        M.col(static_cast<Eigen::Index>(i)) = s.relative_position(R[i]);
    return M;
}

inline int matrix_rank(const Eigen::MatrixXd& M, double rel) {
    if (M.size() == 0 || M.cwiseAbs().maxCoeff() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > rel * sv[0]) ++r;
    return r;
}

/// Basis of the skew class used by the given rigid kind; d1/d2 split from the
/// descriptor. Spanning sets may be redundant, rank reduction happens later.
inline std::vector<Eigen::MatrixXd> skew_class_basis(int d, int d1, int d2, RigidKind kind) {
    std::vector<Eigen::MatrixXd> out;
    auto unit = [&](int i, int j) {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
        S(i, j) = 1;
        S(j, i) = -1;
        return S;
    };
    switch (kind) {
        case RigidKind::Rot:
        case RigidKind::Iso:
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) out.push_back(unit(i, j));
            break;
        case RigidKind::Rot0:
        case RigidKind::Iso0:
            // S3 = 0: skew in the d1 block plus arbitrary coupling d1 x d2
            for (int i = 0; i < d1; ++i)
                for (int j = i + 1; j < d1; ++j) out.push_back(unit(i, j));
            for (int i = 0; i < d1; ++i)
                for (int j = d1; j < d; ++j) out.push_back(unit(i, j));
            break;
        case RigidKind::Rot00:
        case RigidKind::Iso00:
            // S = S1 + 0_{d2}: skew in the d1 block only
            for (int i = 0; i < d1; ++i)
                for (int j = i + 1; j < d1; ++j) out.push_back(unit(i, j));
            break;
        case RigidKind::Trans:
            break;
    }
    (void)d2;
    return out;
}

} // namespace detail

/// Property 1: id in R and the centered R-orbit spans the orbit's affine hull.
/// Property 2: a witness pair (R', R'') with id in R', R'' Property 1, R'R'' in R.
inline PropertyFlags check_property(const Structure& s, const std::vector<GroupWord>& R,
                                    const std::vector<GroupWord>& Rprime,
                                    const std::vector<GroupWord>& Rsecond,
                                    const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    PropertyFlags out;
    const auto& G = s.group;
    auto contains = [](const std::vector<GroupWord>& set, const GroupWord& w) {
        for (const auto& v : set) if (v == w) return true;
        return false;
    };

    const int daff = orbit_affine_dimension(s);
    if (!contains(R, G.identity_word()))
        out.failures.push_back("property1: id not in R");
    else if (detail::matrix_rank(detail::stacked_orbit_points(s, R), tol.rank_rel) != daff)
        out.failures.push_back("property1: centered R-orbit does not span the affine hull (rank < " +
                               std::to_string(daff) + ")");
    else
        out.property1 = true;

    if (!Rprime.empty() || !Rsecond.empty()) {
        bool ok = true;
        // id belongs to R' by definition; adjoin it if the input omits it
        std::vector<GroupWord> Rprime_full = Rprime;
        if (!contains(Rprime_full, G.identity_word()))
            Rprime_full.insert(Rprime_full.begin(), G.identity_word());
        // R'' must itself have Property 1
        if (!contains(Rsecond, G.identity_word()) ||
            detail::matrix_rank(detail::stacked_orbit_points(s, Rsecond), tol.rank_rel) != daff) {
            out.failures.push_back("property2: R'' lacks Property 1");
            ok = false;
        }
        for (const auto& a : Rprime_full)
            for (const auto& b : Rsecond)
                if (!contains(R, G.compose(a, b))) {
                    out.failures.push_back("property2: product " + G.compose(a, b).str() +
                                           " = " + a.str() + b.str() + " missing from R");
                    ok = false;
                }
        // generation sanity check: R'-words reach every point element and a
        // full-rank set of translation exponents
        std::vector<bool> qseen(static_cast<std::size_t>(G.point_order()), false);
        Eigen::MatrixXd zs(G.d2, 0);
        std::vector<GroupWord> frontier = {G.identity_word()};
        std::vector<GroupWord> all = frontier;
        for (int depth = 0; depth < 3 * G.point_order() + 2 * G.d2 + 2; ++depth) {
            std::vector<GroupWord> next;
            for (const auto& w : frontier)
                for (const auto& a : Rprime_full) {
                    for (const GroupWord& c : {G.compose(w, a), G.compose(w, G.inverse(a))}) {
                        bool seen = false;
                        for (const auto& v : all) if (v == c) { seen = true; break; }
                        if (!seen && all.size() < 4000) { all.push_back(c); next.push_back(c); }
                    }
                }
            frontier = std::move(next);
            if (frontier.empty()) break;
        }
        for (const auto& w : all) {
            qseen[static_cast<std::size_t>(w.q)] = true;
            if (w.q == 0 && G.d2 > 0) {
                zs.conservativeResize(Eigen::NoChange, zs.cols() + 1);
                zs.col(zs.cols() - 1) = w.z.cast<double>();
            }
        }
        for (int q = 0; q < G.point_order(); ++q)
            if (!qseen[static_cast<std::size_t>(q)]) {
                out.failures.push_back("property2: R' does not reach point element " + std::to_string(q));
                ok = false;
            }
        if (G.d2 > 0 && detail::matrix_rank(zs, tol.rank_rel) != G.d2) {
            out.failures.push_back("property2: R' does not reach a basis of translation exponents");
            ok = false;
        }
        out.property2 = ok && out.property1;
    }
    return out;
}

/// Orthonormal basis of a rigid displacement space restricted to R, stacked
/// as columns of a (d|R|) x dim matrix in the phi ordering of R.
struct RigidBasis {
    RigidKind kind;
    Eigen::MatrixXd basis; // orthonormal columns
    int dim() const { return static_cast<int>(basis.cols()); }
};

inline RigidBasis rigid_basis(const Structure& s, const std::vector<GroupWord>& R, RigidKind kind,
                              const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    const auto& G = s.group;
    const int d = G.d;
    const Eigen::Index n = static_cast<Eigen::Index>(R.size()) * d;

    std::vector<Eigen::MatrixXd> rots(R.size());
    std::vector<Eigen::VectorXd> pts(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
        rots[i] = G.realize(R[i]).rot;
        pts[i] = s.relative_position(R[i]);
    }

    std::vector<Eigen::VectorXd> gens;
    const bool with_trans = kind == RigidKind::Trans || kind == RigidKind::Iso ||
                            kind == RigidKind::Iso0 || kind == RigidKind::Iso00;
    if (with_trans) {
        for (int a = 0; a < d; ++a) {
            Eigen::VectorXd v(n);
            for (std::size_t i = 0; i < R.size(); ++i)
                v.segment(static_cast<Eigen::Index>(i) * d, d) = rots[i].transpose().col(a);
            gens.push_back(v);
        }
    }
    for (const auto& S : detail::skew_class_basis(d, G.d1, G.d2, kind)) {
        Eigen::VectorXd v(n);
        for (std::size_t i = 0; i < R.size(); ++i)
            v.segment(static_cast<Eigen::Index>(i) * d, d) = rots[i].transpose() * (S * pts[i]);
        gens.push_back(v);
    }

    RigidBasis out;
    out.kind = kind;
    if (gens.empty()) {
        out.basis = Eigen::MatrixXd::Zero(n, 0);
        return out;
    }
    Eigen::MatrixXd M(n, static_cast<Eigen::Index>(gens.size()));
    for (std::size_t i = 0; i < gens.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = gens[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol.rank_rel * sv[0]) ++r;
    out.basis = svd.matrixU().leftCols(r);
    return out;
}

/// Orthogonal projectors P (kernel U_iso R) and P0 (kernel U_iso00 R).
struct ProjectorPair {
    Eigen::MatrixXd P, P0;
    int rank_P = 0, rank_P0 = 0;
};

inline ProjectorPair projectors(const Structure& s, const std::vector<GroupWord>& R,
                                const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    RigidBasis iso = rigid_basis(s, R, RigidKind::Iso, tol);
    RigidBasis iso00 = rigid_basis(s, R, RigidKind::Iso00, tol);
    const Eigen::Index n = iso.basis.rows();
    ProjectorPair out;
    out.P = Eigen::MatrixXd::Identity(n, n) - iso.basis * iso.basis.transpose();
    out.P0 = Eigen::MatrixXd::Identity(n, n) - iso00.basis * iso00.basis.transpose();
    out.rank_P = static_cast<int>(n) - iso.dim();
    out.rank_P0 = static_cast<int>(n) - iso00.dim();
    return out;
}

/// Convolution kernels of the two rigidity seminorms: column-block slices of
/// P and P0 keyed on the words of R (phi = listing order of R).
struct SeminormKernels {
    std::vector<GroupWord> R;
    ProjectorPair proj;
    std::vector<Eigen::MatrixXd> gR;    // (d|R|) x d blocks
    std::vector<Eigen::MatrixXd> gR00;
    int d = 0;

    const Eigen::MatrixXd& block(std::size_t i, bool zero_zero) const {
        return zero_zero ? gR00[i] : gR[i];
    }
};

inline SeminormKernels seminorm_kernels(const Structure& s, const std::vector<GroupWord>& R,
                                        const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    SeminormKernels out;
    out.R = R;
    out.d = s.group.d;
    out.proj = projectors(s, R, tol);
    const int d = out.d;
    for (std::size_t i = 0; i < R.size(); ++i) {
        out.gR.push_back(out.proj.P.middleCols(static_cast<Eigen::Index>(i) * d, d));
        out.gR00.push_back(out.proj.P0.middleCols(static_cast<Eigen::Index>(i) * d, d));
    }
    return out;
}

/// Discrete derivative: (grad_R u)(g): R -> R^d, h -> u(gh) - rot(h)^T u(g).
inline std::vector<Eigen::VectorXd> discrete_gradient(const Structure& s, const RealField& u,
                                                      const std::vector<GroupWord>& R,
                                                      const GroupWord& g) {
    const auto& G = s.group;
    std::vector<Eigen::VectorXd> out;
    out.reserve(R.size());
    for (const auto& h : R)
        out.push_back(u(G.compose(g, h)).col(0) - G.realize(h).rot.transpose() * u(g).col(0));
    return out;
}

struct SeminormValue {
    double value = 0;       // projection route
    double convolution = 0; // convolution route
    double discrepancy = 0;
};

/// ||u||_R (or the 0,0 variant) by both the per-site projection route and
/// the convolution route; the two must agree.
inline SeminormValue seminorm_eval(const Structure& s, const SeminormKernels& k, const RealField& u,
                                   bool zero_zero,
                                   const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    const auto& G = s.group;
    const int N = u.period();
    const int d = k.d;
    auto reps = G.coset_reps(N);
    const Eigen::MatrixXd& P = zero_zero ? k.proj.P0 : k.proj.P;

    double acc = 0;
    Eigen::VectorXd stacked(static_cast<Eigen::Index>(k.R.size()) * d);
    for (const auto& g : reps) {
        for (std::size_t i = 0; i < k.R.size(); ++i)
            stacked.segment(static_cast<Eigen::Index>(i) * d, d) = u(G.compose(g, k.R[i])).col(0);
        acc += (P * stacked).squaredNorm();
    }
    SeminormValue out;
    out.value = std::sqrt(acc / static_cast<double>(reps.size()));

    RealField u0 = u.inverted_argument();
    double acc2 = 0;
    for (const auto& g : reps) {
        Eigen::VectorXd conv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k.R.size()) * d);
        for (std::size_t i = 0; i < k.R.size(); ++i)
            conv += k.block(i, zero_zero) * u0(G.compose(G.inverse(k.R[i]), g)).col(0);
        acc2 += conv.squaredNorm();
    }
    out.convolution = std::sqrt(acc2 / static_cast<double>(reps.size()));
    out.discrepancy = std::abs(out.value - out.convolution);
    if (out.discrepancy > tol.seminorm_agree * (1.0 + out.value))
        throw std::runtime_error("seminorm_eval: projection and convolution routes disagree by " +
                                 std::to_string(out.discrepancy));
    return out;
}

} // namespace objstab
