#pragma once

#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "objstab/group.hpp"

namespace objstab {

/// T^N-periodic matrix-valued function on G, stored on the transversal C_N.
template <class Scalar>
class PeriodicField {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    PeriodicField() = default;
    PeriodicField(const GroupDescriptor& G, int N, int rows, int cols)
        : group_(&G), N_(N), rows_(rows), cols_(cols),
          values_(G.coset_count(N), Matrix::Zero(rows, cols)) {
        if (N <= 0 || N % G.m0 != 0)
            throw std::invalid_argument("periodic field: N must be a positive multiple of m0");
    }

    const GroupDescriptor& group() const { return *group_; }
    int period() const { return N_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    Matrix& at_index(std::size_t i) { return values_[i]; }
    const Matrix& at_index(std::size_t i) const { return values_[i]; }

    const Matrix& operator()(const GroupWord& w) const {
        return values_[group_->coset_index(w, N_)];
    }
    void set(const GroupWord& w, Matrix v) {
        values_[group_->coset_index(w, N_)] = std::move(v);
    }

    /// u(.^{-1}), again T^N-periodic.
    PeriodicField inverted_argument() const {
        PeriodicField out(*group_, N_, rows_, cols_);
        auto reps = group_->coset_reps(N_);
        for (const auto& g : reps)
            out.set(g, (*this)(group_->inverse(g)));
        return out;
    }

    /// u(.g), the right-translated field.
    PeriodicField translated(const GroupWord& g) const {
        PeriodicField out(*group_, N_, rows_, cols_);
        auto reps = group_->coset_reps(N_);
        for (const auto& h : reps)
            out.set(h, (*this)(group_->compose(h, g)));
        return out;
    }

    PeriodicField<std::complex<double>> complexified() const {
        PeriodicField<std::complex<double>> out(*group_, N_, rows_, cols_);
        for (std::size_t i = 0; i < values_.size(); ++i)
            out.at_index(i) = values_[i].template cast<std::complex<double>>();
        return out;
    }

private:
    const GroupDescriptor* group_ = nullptr;
    int N_ = 1, rows_ = 0, cols_ = 0;
    std::vector<Matrix> values_;
};

using RealField = PeriodicField<double>;
using ComplexField = PeriodicField<std::complex<double>>;

/// Normalized inner product (1/|C_N|) sum_g <u(g), v(g)>_F over the common period.
template <class S1, class S2>
std::complex<double> field_inner(const PeriodicField<S1>& u, const PeriodicField<S2>& v) {
    int N = std::lcm(u.period(), v.period());
    const auto& G = u.group();
    auto reps = G.coset_reps(N);
    std::complex<double> acc = 0;
    for (const auto& g : reps) {
        auto a = u(g).template cast<std::complex<double>>().eval();
        auto b = v(g).template cast<std::complex<double>>().eval();
        acc += (a.array() * b.array().conjugate()).sum();
    }
    return acc / static_cast<double>(reps.size());
}

template <class S>
double field_norm(const PeriodicField<S>& u) {
    return std::sqrt(std::abs(field_inner(u, u)));
}

inline RealField random_displacement_field(const GroupDescriptor& G, int N, std::mt19937& rng,
                                           double amplitude = 1.0) {
    RealField u(G, N, G.d, 1);
    std::normal_distribution<double> dist(0.0, amplitude);
    for (std::size_t i = 0; i < u.size(); ++i)
        for (int r = 0; r < G.d; ++r) u.at_index(i)(r, 0) = dist(rng);
    return u;
}

} // namespace objstab
