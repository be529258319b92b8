#pragma once

#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "objstab/tolerance.hpp"

namespace objstab {

/// Extended real with explicit +/- infinity, never a sentinel float.
struct ExtendedReal {
    enum class Kind { Finite, PlusInf, MinusInf };
    Kind kind = Kind::Finite;
    double value = 0;

    static ExtendedReal finite(double v) { return {Kind::Finite, v}; }
    static ExtendedReal plus_inf() { return {Kind::PlusInf, 0}; }
    static ExtendedReal minus_inf() { return {Kind::MinusInf, 0}; }

    bool is_finite() const { return kind == Kind::Finite; }
    bool is_plus_inf() const { return kind == Kind::PlusInf; }
    bool is_minus_inf() const { return kind == Kind::MinusInf; }

    /// Total order of the extended reals.
    bool operator<(const ExtendedReal& o) const {
        if (kind == o.kind) return kind == Kind::Finite && value < o.value;
        if (kind == Kind::MinusInf) return true;
        if (o.kind == Kind::MinusInf) return false;
        return o.kind == Kind::PlusInf;
    }

    std::string str() const {
        if (is_plus_inf()) return "inf";
        if (is_minus_inf()) return "-inf";
        return std::to_string(value);
    }
};

struct HermitianEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // orthonormal columns
};

/// Dense Hermitian eigendecomposition. Input is validated against the
/// Hermitian tolerance and symmetrized before factorization.
inline HermitianEig hermitian_eig(const Eigen::MatrixXcd& A,
                                  const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    const double scale = A.norm();
    if ((A - A.adjoint()).norm() > 1e-10 * std::max(1.0, scale))
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian within tolerance");
    Eigen::MatrixXcd S = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: factorization failed");
    (void)tol;
    return {es.eigenvalues(), es.eigenvectors()};
}

struct LoewnerResult {
    ExtendedReal value;
    int rank_B = 0;
    int kernel_dim = 0;
    bool rank_ambiguous = false;  // sigma within a factor 10 of the threshold
    double sigma_min = 0, sigma_max = 0;
};

/// lambda_min(A, B) = sup{ c : c B^H B <= A } in the Loewner order.
/// Full-rank B: QR route, smallest eigenvalue of R^{-H} A R^{-1}.
/// B = 0: +inf iff A is positive semidefinite.
/// Rank-deficient B: kernel split; -inf unless the kernel block of A is PSD
/// and consistent, else the Schur complement pencil on the complement.
/// b_scale, when given, anchors the rank threshold so that a B that is an
/// exact zero of the underlying problem is not mistaken for full rank when
/// its entries are pure roundoff.
inline LoewnerResult lambda_min(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                const ToleranceConfig& tol = ToleranceConfig::defaults(),
                                double b_scale = 0.0) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.cols() != n)
        throw std::invalid_argument("lambda_min: dimension mismatch");
    const double anorm = A.norm();
    if ((A - A.adjoint()).norm() > 1e-10 * std::max(1.0, anorm))
        throw std::invalid_argument("lambda_min: A is not Hermitian within tolerance");
    const Eigen::MatrixXcd S = 0.5 * (A + A.adjoint());

    LoewnerResult out;
    auto is_psd = [&](const Eigen::MatrixXcd& M) {
        if (M.rows() == 0) return true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()),
                                                           Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff() >= -tol.psd_rel * std::max(1.0, anorm);
    };

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    out.sigma_max = sv.size() ? sv.maxCoeff() : 0.0;
    out.sigma_min = sv.size() ? sv.minCoeff() : 0.0;

    if (out.sigma_max <= std::max(1e-300, tol.rank_rel * b_scale)) {
        // B = 0 (exactly, or pure roundoff at the problem scale)
        out.rank_B = 0;
        out.kernel_dim = static_cast<int>(n);
        out.value = is_psd(S) ? ExtendedReal::plus_inf() : ExtendedReal::minus_inf();
        return out;
    }

    const double thresh = tol.rank_rel * std::max(out.sigma_max, b_scale);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > thresh) ++r;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > thresh / 10 && sv[i] <= thresh * 10 && sv[i] != out.sigma_max)
            out.rank_ambiguous = true;
    out.rank_B = r;
    out.kernel_dim = static_cast<int>(n) - r;

    if (r == 0) {
        // nonzero but negligible B under the rank threshold: treated as zero
        out.value = is_psd(S) ? ExtendedReal::plus_inf() : ExtendedReal::minus_inf();
        return out;
    }

    if (r == static_cast<int>(n)) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(B);
        Eigen::MatrixXcd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        Eigen::MatrixXcd Rinv = R.inverse();
        Eigen::MatrixXcd M = Rinv.adjoint() * S * Rinv;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()),
                                                           Eigen::EigenvaluesOnly);
        out.value = ExtendedReal::finite(es.eigenvalues().minCoeff());
        return out;
    }

    // rank-deficient, nonzero B: split along ker(B)
    const Eigen::MatrixXcd V = svd.matrixV();
    const Eigen::MatrixXcd W = V.leftCols(r);              // complement of the kernel
    const Eigen::MatrixXcd K = V.rightCols(n - r);         // kernel of B
    const Eigen::MatrixXcd A11 = K.adjoint() * S * K;
    const Eigen::MatrixXcd A12 = K.adjoint() * S * W;
    const Eigen::MatrixXcd A22 = W.adjoint() * S * W;

    if (!is_psd(A11)) {
        out.value = ExtendedReal::minus_inf();
        return out;
    }
    // range consistency: columns of A12 must lie in the range of A11
    Eigen::MatrixXcd A11p;  // pseudo-inverse
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (A11 + A11.adjoint()));
        Eigen::VectorXd ev = es.eigenvalues();
        double emax = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (std::abs(ev[i]) > tol.rank_rel * std::max(emax, 1e-300)) inv[i] = 1.0 / ev[i];
        A11p = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
        double resid = (A11 * A11p * A12 - A12).norm();
        if (resid > 1e-8 * std::max(1.0, anorm)) {
            out.value = ExtendedReal::minus_inf();
            return out;
        }
    }
    const Eigen::MatrixXcd schur = A22 - A12.adjoint() * A11p * A12;
    // ||B (W c)||^2 = c^H diag(sigma^2) c: the G^{1/2}-factor is diag(sigma_1..sigma_r)
    Eigen::MatrixXcd sig = Eigen::MatrixXcd::Zero(r, r);
    for (int i = 0; i < r; ++i) sig(i, i) = sv[i];
    Eigen::MatrixXcd siginv = Eigen::MatrixXcd::Zero(r, r);
    for (int i = 0; i < r; ++i) siginv(i, i) = 1.0 / sv[i];
    Eigen::MatrixXcd M = siginv * schur * siginv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
    out.value = ExtendedReal::finite(es.eigenvalues().minCoeff());
    return out;
}

} // namespace objstab
