#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "objstab/tolerance.hpp"

namespace objstab {

/// Euclidean isometry x -> rot*x + trans with rot orthogonal.
struct Isometry {
    Eigen::MatrixXd rot;
    Eigen::VectorXd trans;

    Isometry() = default;
    Isometry(Eigen::MatrixXd A, Eigen::VectorXd b)
        : rot(std::move(A)), trans(std::move(b)) {
        if (rot.rows() != rot.cols() || rot.rows() != trans.size())
            throw std::invalid_argument("isometry: dimension mismatch");
    }

    static Isometry identity(int d) {
        return Isometry(Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d));
    }

    int dim() const { return static_cast<int>(trans.size()); }

    bool is_orthogonal(double tol = ToleranceConfig::defaults().isometry) const {
        return (rot.transpose() * rot - Eigen::MatrixXd::Identity(dim(), dim()))
                   .cwiseAbs().maxCoeff() <= tol;
    }

    /// (A1|b1)(A2|b2) = (A1 A2 | b1 + A1 b2)
    Isometry compose(const Isometry& o) const {
        return Isometry(rot * o.rot, trans + rot * o.trans);
    }

    Isometry inverse() const {
        Eigen::MatrixXd Ai = rot.transpose();
        return Isometry(Ai, -(Ai * trans));
    }

    Eigen::VectorXd act(const Eigen::VectorXd& x) const {
        if (x.size() != trans.size())
            throw std::invalid_argument("isometry act: dimension mismatch");
        return rot * x + trans;
    }

    bool approx_equal(const Isometry& o, double tol) const {
        if (dim() != o.dim()) return false;
        return (rot - o.rot).cwiseAbs().maxCoeff() <= tol &&
               (trans - o.trans).cwiseAbs().maxCoeff() <= tol;
    }
};

} // namespace objstab
