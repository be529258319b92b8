#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "objstab/fields.hpp"
#include "objstab/group.hpp"
#include "objstab/hessian.hpp"
#include "objstab/seminorm.hpp"

namespace objstab {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;

/// chi_k(w) = exp(2 pi i <k, trans(pi(w))>) for w in TF.
inline Complex char_eval(const GroupDescriptor& G, const Eigen::VectorXd& k, const GroupWord& w) {
    if (!G.in_TF(w)) throw std::invalid_argument("char_eval: word not in TF");
    double phase = 2.0 * M_PI * k.dot(G.pi_translation(w));
    return {std::cos(phase), std::sin(phase)};
}

/// Base representation of the subgroup TF, evaluated on words. Characters
/// are the automatic case; higher-dimensional families may be user-supplied.
struct TFRep {
    int dim = 1;
    std::function<MatrixXcd(const GroupDescriptor&, const GroupWord&)> eval;

    static TFRep trivial() {
        TFRep r;
        r.dim = 1;
        r.eval = [](const GroupDescriptor&, const GroupWord&) {
            return MatrixXcd::Identity(1, 1);
        };
        return r;
    }

    MatrixXcd operator()(const GroupDescriptor& G, const GroupWord& w) const { return eval(G, w); }
};

/// Ind_{TF}^G (chi_k rho): block-unitary representation of G over a fixed
/// transversal of G/TF. The transversal is the point part in descriptor order
/// (one representative per F-coset); recorded in artifact metadata since the
/// matrices depend on it.
class InducedRep {
public:
    InducedRep(const GroupDescriptor& G, Eigen::VectorXd k, TFRep rho = TFRep::trivial())
        : G_(&G), k_(std::move(k)), rho_(std::move(rho)) {
        if (k_.size() != G.d2) throw std::invalid_argument("induced rep: k has wrong dimension");
        // one coset representative per element of P/F
        std::vector<bool> covered(static_cast<std::size_t>(G.point_order()), false);
        for (int q = 0; q < G.point_order(); ++q) {
            if (covered[static_cast<std::size_t>(q)]) continue;
            GroupWord w = G.identity_word();
            w.q = q;
            reps_.push_back(w);
            for (int f : G.f_indices())
                covered[static_cast<std::size_t>(G.point_product(q, f))] = true;
        }
        for (auto& r : reps_) inv_reps_.push_back(G.inverse(r));
    }

    int dim() const { return static_cast<int>(reps_.size()) * rho_.dim; }
    int coset_count() const { return static_cast<int>(reps_.size()); }
    const std::vector<GroupWord>& coset_representatives() const { return reps_; }
    const Eigen::VectorXd& wave_vector() const { return k_; }

    MatrixXcd operator()(const GroupWord& w) const {
        const int n = coset_count(), dr = rho_.dim;
        MatrixXcd out = MatrixXcd::Zero(dim(), dim());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                GroupWord ww = G_->compose(inv_reps_[static_cast<std::size_t>(i)],
                                           G_->compose(w, reps_[static_cast<std::size_t>(j)]));
                if (!G_->in_TF(ww)) continue;
                out.block(i * dr, j * dr, dr, dr) = char_eval(*G_, k_, ww) * rho_(*G_, ww);
            }
        return out;
    }

    /// T^N-periodic iff chi_k rho is trivial on T^N.
    bool is_periodic(int N, double tol = 1e-9) const {
        for (int i = 0; i < G_->d2; ++i) {
            GroupWord t = G_->identity_word();
            t.z[i] = N;
            if (((*this)(t) - MatrixXcd::Identity(dim(), dim())).cwiseAbs().maxCoeff() > tol)
                return false;
        }
        return true;
    }

private:
    const GroupDescriptor* G_;
    Eigen::VectorXd k_;
    TFRep rho_;
    std::vector<GroupWord> reps_, inv_reps_;
};

// ---------------------------------------------------------------------------
// Kronecker and direct-sum utilities

inline MatrixXcd kron(const MatrixXcd& A, const MatrixXcd& B) {
    MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

template <class Mat>
Mat dsum(const std::vector<Mat>& blocks) {
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) { r += b.rows(); c += b.cols(); }
    Mat out = Mat::Zero(r, c);
    Eigen::Index i = 0, j = 0;
    for (const auto& b : blocks) {
        out.block(i, j, b.rows(), b.cols()) = b;
        i += b.rows();
        j += b.cols();
    }
    return out;
}

/// Commutation (vec-permutation) matrix P_{m,n} with
/// P_{m,n} vec(A) = vec(A^T) and P_{p,m} (A kron B) P_{n,q} = B kron A
/// for A m x n, B p x q.
inline Eigen::MatrixXd kron_permutation(int m, int n) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m * n, m * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            P(i * n + j, j * m + i) = 1.0;
    return P;
}

/// Q_{m,n_1..n_k} = (P_{m,n_1} + ... + P_{m,n_k}) P_{n_1+..+n_k, m}; carries
/// A kron (B_1 + .. + B_k) to the direct sum of the A kron B_i.
inline Eigen::MatrixXd kron_dsum_permutation(int m, const std::vector<int>& ns) {
    std::vector<Eigen::MatrixXd> blocks;
    int total = 0;
    for (int n : ns) { blocks.push_back(kron_permutation(m, n)); total += n; }
    return dsum(blocks) * kron_permutation(total, m);
}

// ---------------------------------------------------------------------------
// Fourier transforms

/// Transform of a finitely supported kernel: sum_g f(g) kron rho(g).
template <class Rep>
MatrixXcd fourier_l1(const HessianKernel& f, const Rep& rep) {
    MatrixXcd acc = MatrixXcd::Zero(f.dim() * rep.dim(), f.dim() * rep.dim());
    for (const auto& g : f.support())
        acc += kron(f.value(g).cast<Complex>().eval(), rep(g));
    return acc;
}

/// Same for the seminorm kernels (rectangular blocks supported on R).
template <class Rep>
MatrixXcd fourier_l1(const SeminormKernels& k, bool zero_zero, const Rep& rep) {
    const Eigen::Index m = static_cast<Eigen::Index>(k.R.size()) * k.d;
    MatrixXcd acc = MatrixXcd::Zero(m * rep.dim(), k.d * rep.dim());
    for (std::size_t i = 0; i < k.R.size(); ++i)
        acc += kron(k.block(i, zero_zero).cast<Complex>().eval(), rep(k.R[i]));
    return acc;
}

/// Generic finitely supported map, given as (word, matrix) pairs.
template <class Rep, class Scalar>
MatrixXcd fourier_l1(const std::vector<std::pair<GroupWord, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>>& f,
                     const Rep& rep) {
    if (f.empty()) return MatrixXcd();
    const Eigen::Index m = f.front().second.rows(), n = f.front().second.cols();
    MatrixXcd acc = MatrixXcd::Zero(m * rep.dim(), n * rep.dim());
    for (const auto& [g, M] : f)
        acc += kron(M.template cast<Complex>().eval(), rep(g));
    return acc;
}

/// Transform of a periodic function: (1/|C_N|) sum_{g in C_N} u(g) kron rho(g).
template <class Scalar, class Rep>
MatrixXcd fourier_periodic(const PeriodicField<Scalar>& u, const Rep& rep, bool check_periodic = true) {
    const auto& G = u.group();
    if (check_periodic && !rep.is_periodic(u.period()))
        throw std::invalid_argument("fourier_periodic: representation is not T^N-periodic");
    auto reps = G.coset_reps(u.period());
    MatrixXcd acc = MatrixXcd::Zero(u.rows() * rep.dim(), u.cols() * rep.dim());
    for (const auto& g : reps)
        acc += kron(u(g).template cast<Complex>().eval(), rep(g));
    return acc / static_cast<double>(reps.size());
}

/// Convolution of a finitely supported kernel with a periodic function.
template <class Scalar>
PeriodicField<Scalar> convolve(const GroupDescriptor& G,
                               const std::vector<std::pair<GroupWord, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>>& f,
                               const PeriodicField<Scalar>& v) {
    if (f.empty()) throw std::invalid_argument("convolve: empty kernel");
    const Eigen::Index l = f.front().second.rows();
    PeriodicField<Scalar> out(G, v.period(), static_cast<int>(l), v.cols());
    auto reps = G.coset_reps(v.period());
    for (const auto& g : reps) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> acc =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(l, v.cols());
        for (const auto& [h, M] : f)
            acc += M * v(G.compose(G.inverse(h), g));
        out.set(g, std::move(acc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dual domain

/// One-dimensional fundamental domains are exact intervals; for d2 = 2 a
/// rectangle over the dual basis with the point-group folding applied as a
/// post-filter (any set whose closure contains a fundamental domain works).
struct KDomain {
    Eigen::MatrixXd dual_basis;   // columns generate the k-lattice of G_rho
    Eigen::VectorXd extent;       // fractional extent per dual direction (e.g. 1 or 1/2)
    bool mirror_folded = false;   // true when a k -> -k symmetry halved the box

    int dimension() const { return static_cast<int>(extent.size()); }
};

struct SpaceGroupOnWaveVectors {
    std::vector<Eigen::MatrixXd> point_rotations; // distinct rot(pi(g)) with g.rho ~ chi_k rho
    Eigen::MatrixXd translation_lattice;          // columns generate it; between L* and L*/m0
};

struct RepClass {
    TFRep rho;
    SpaceGroupOnWaveVectors grho;
    KDomain K;
    std::string label;
};

struct DualDomain {
    std::vector<RepClass> reps;
};

/// Representation set R of the TF-dual modulo the shift/conjugation relation,
/// with the wave-vector space group and fundamental domain per class.
/// Automatic computation covers m0 = 1 with trivial F, which includes all
/// helical/rod groups of this form; anything richer must be user-supplied
/// through the config.
inline DualDomain dual_domain(const GroupDescriptor& G) {
    if (G.m0 != 1 || !G.f_trivial())
        throw std::runtime_error("dual_domain: automatic representation set needs m0 = 1 and trivial F; "
                                 "supply R and K_rho in the configuration");
    DualDomain out;
    RepClass cls;
    cls.rho = TFRep::trivial();
    cls.label = "trivial";

    // G_rho for the trivial class: all rot(pi(p_q)) paired with the dual lattice
    std::vector<Eigen::MatrixXd> rots;
    for (int q = 0; q < G.point_order(); ++q) {
        Eigen::MatrixXd A = G.pi_rotation(q);
        bool seen = false;
        for (const auto& B : rots)
            if ((A - B).cwiseAbs().maxCoeff() <= 1e-10) { seen = true; break; }
        if (!seen) rots.push_back(A);
    }
    cls.grho.point_rotations = rots;
    cls.grho.translation_lattice = G.dual_lattice_basis();

    KDomain K;
    K.dual_basis = G.dual_lattice_basis();
    K.extent = Eigen::VectorXd::Ones(G.d2);
    if (G.d2 == 1) {
        for (const auto& A : rots)
            if (A(0, 0) < 0) { K.extent[0] = 0.5; K.mirror_folded = true; break; }
    }
    cls.K = K;
    out.reps.push_back(std::move(cls));
    return out;
}

} // namespace objstab
