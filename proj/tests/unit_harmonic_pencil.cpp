#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "objstab/driver.hpp"

using namespace objstab;

namespace {

double cdiff(const MatrixXcd& a, const MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd random_complex(int m, int n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    Eigen::MatrixXcd A(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = Complex(d(rng), d(rng));
    return A;
}

Eigen::MatrixXcd random_hermitian(int n, std::mt19937& rng) {
    Eigen::MatrixXcd A = random_complex(n, n, rng);
    return 0.5 * (A + A.adjoint());
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(n, n, rng));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

/// Random matrix with singular values in [0.5, 2]; keeps the finite
/// bisection oracle within its stated accuracy of the exact pencil value.
Eigen::MatrixXcd conditioned_matrix(int m, int n, std::mt19937& rng) {
    Eigen::MatrixXcd U = random_unitary(m, rng), V = random_unitary(n, rng);
    std::uniform_real_distribution<double> sd(0.5, 2.0);
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(m, n);
    for (int i = 0; i < std::min(m, n); ++i) S(i, i) = sd(rng);
    return U * S * V.adjoint();
}

ComplexField random_complex_field(const GroupDescriptor& G, int N, int m, int n, std::mt19937& rng) {
    ComplexField u(G, N, m, n);
    std::normal_distribution<double> d;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) u.at_index(i)(r, c) = Complex(d(rng), d(rng));
    return u;
}

/// PSD bisection oracle for sup{c : c B^H B <= A}; independent of the
/// QR/Schur implementation path.
ExtendedReal lambda_min_bisect(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    const Eigen::MatrixXcd BB = B.adjoint() * B;
    const double scale = std::max(1.0, A.norm());
    auto psd = [&](double c) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A - c * BB, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff() >= -1e-11 * scale;
    };
    const double huge = 1e12 * scale / std::max(BB.norm(), 1e-30);
    if (!psd(-huge)) return ExtendedReal::minus_inf();
    if (psd(huge)) return ExtendedReal::plus_inf();
    double lo = -huge, hi = huge;
    for (int i = 0; i < 400 && hi - lo > 1e-12 * (1 + std::abs(lo)); ++i) {
        double mid = 0.5 * (lo + hi);
        if (psd(mid)) lo = mid;
        else hi = mid;
    }
    return ExtendedReal::finite(lo);
}

/// All eigenvalues of a Hermitian matrix by sign scanning of det(A - tI).
std::vector<double> eig_by_determinant(const Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    double bound = A.norm() + 1.0;
    const int samples = 20000;
    auto f = [&](double t) {
        return (A - t * Eigen::MatrixXcd::Identity(n, n)).determinant().real();
    };
    std::vector<double> roots;
    double prev = f(-bound);
    double tprev = -bound;
    for (int i = 1; i <= samples; ++i) {
        double t = -bound + 2 * bound * i / samples;
        double v = f(t);
        if ((prev < 0) != (v < 0)) {
            double lo = tprev, hi = t;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                if ((f(mid) < 0) == (prev < 0)) lo = mid;
                else hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev = v;
        tprev = t;
    }
    return roots;
}

} // namespace

// ---------------------------------------------------------------------------
// characters and induced representations

TEST_CASE("character evaluation") {
    auto chain = chain_setup(1.3);
    const auto& G = chain.group();
    Eigen::VectorXd k0 = Eigen::VectorXd::Zero(1);
    for (int n : {-3, 0, 2, 7})
        CHECK(std::abs(char_eval(G, k0, G.word({n}, 0)) - Complex(1, 0)) < 1e-15);

    Eigen::VectorXd k(1);
    k << 0.37;
    for (int n : {-2, 1, 5}) {
        Complex expect = std::exp(Complex(0, 2 * M_PI * 0.37 * n * 1.3));
        CHECK(std::abs(char_eval(G, k, G.word({n}, 0)) - expect) < 1e-13);
    }

    // chi_k trivial on T^n exactly for k in L*/n
    const double lstar = 1.0 / 1.3;
    for (int n : {2, 3, 5}) {
        Eigen::VectorXd kin(1), kout(1);
        kin << lstar * 2.0 / n;
        kout << lstar * 0.5 / n + lstar / (3.0 * n);
        CHECK(std::abs(char_eval(G, kin, G.word({n}, 0)) - Complex(1, 0)) < 1e-12);
        CHECK(std::abs(char_eval(G, kout, G.word({n}, 0)) - Complex(1, 0)) > 1e-3);
    }
}

TEST_CASE("induced representation matrices") {
    auto chain = chain_setup(1.0);
    Eigen::VectorXd k(1);
    k << 0.23;
    InducedRep scalar(chain.group(), k);
    CHECK(scalar.dim() == 1);
    CHECK(std::abs(scalar(chain.group().word({4}, 0))(0, 0) -
                   char_eval(chain.group(), k, chain.group().word({4}, 0))) < 1e-14);

    auto G = nanotube_group(0.27, 1.11);
    InducedRep ind(G, k);
    CHECK(ind.dim() == 2);
    for (int m : {-3, 1, 6}) {
        MatrixXcd M = ind(G.word({m}, 0));
        CHECK(std::abs(M(0, 0) - char_eval(G, k, G.word({m}, 0))) < 1e-13);
        CHECK(std::abs(M(1, 1) - char_eval(G, k, G.word({-m}, 0))) < 1e-13);
        CHECK(std::abs(M(0, 1)) < 1e-15);
        CHECK(std::abs(M(1, 0)) < 1e-15);
    }
    MatrixXcd P = ind(G.word({0}, 1));
    CHECK(std::abs(P(0, 0)) < 1e-15);
    CHECK(std::abs(P(1, 1)) < 1e-15);
    CHECK(std::abs(std::abs(P(0, 1)) - 1.0) < 1e-13);
    CHECK(std::abs(std::abs(P(1, 0)) - 1.0) < 1e-13);
}

TEST_CASE("induced representations are unitary homomorphisms (randomized)") {
    auto G = nanotube_group(0.269, 1.115);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> kd(-2.0, 2.0);
    std::uniform_int_distribution<int> zd(-8, 8), qd(0, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd k(1);
        k << kd(rng);
        InducedRep ind(G, k);
        for (int i = 0; i < 20; ++i) {
            GroupWord w1 = G.word({zd(rng)}, qd(rng)), w2 = G.word({zd(rng)}, qd(rng));
            MatrixXcd M1 = ind(w1);
            CHECK(cdiff(M1.adjoint() * M1, MatrixXcd::Identity(2, 2)) < 1e-10);
            CHECK(cdiff(ind(G.compose(w1, w2)), M1 * ind(w2)) < 1e-10);
        }
    }
}

// ---------------------------------------------------------------------------
// Kronecker utilities

TEST_CASE("kronecker product basics") {
    Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2), I3 = Eigen::MatrixXd::Identity(3, 3);
    CHECK((kron(I2, I3) - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937 rng(5);
    // commutation matrix: P_{p,m} (A kron B) P_{n,q} = B kron A
    for (int trial = 0; trial < 10; ++trial) {
        int m = 2 + static_cast<int>(rng() % 3), n = 2 + static_cast<int>(rng() % 3);
        int p = 2 + static_cast<int>(rng() % 3), q = 2 + static_cast<int>(rng() % 3);
        Eigen::MatrixXcd A = random_complex(m, n, rng), B = random_complex(p, q, rng);
        Eigen::MatrixXcd lhs = kron_permutation(p, m).cast<Complex>() * kron(A, B) *
                               kron_permutation(n, q).cast<Complex>();
        CHECK(cdiff(lhs, kron(B, A)) < 1e-12);
    }
}

TEST_CASE("direct sums distribute over kronecker products") {
    std::mt19937 rng(7);
    // (A1 + A2) kron B = (A1 kron B) + (A2 kron B)
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXcd A1 = random_complex(2, 3, rng), A2 = random_complex(3, 2, rng),
                        B = random_complex(2, 2, rng);
        Eigen::MatrixXcd lhs = kron(dsum<Eigen::MatrixXcd>({A1, A2}), B);
        Eigen::MatrixXcd rhs = dsum<Eigen::MatrixXcd>({kron(A1, B), kron(A2, B)});
        CHECK(cdiff(lhs, rhs) < 1e-12);
    }
    // A kron (B1 + B2) = Q^T ((A kron B1) + (A kron B2)) Q'
    for (int trial = 0; trial < 5; ++trial) {
        int m = 2 + static_cast<int>(rng() % 2), n = 2 + static_cast<int>(rng() % 2);
        int p1 = 1 + static_cast<int>(rng() % 3), q1 = p1;
        int p2 = 1 + static_cast<int>(rng() % 3), q2 = p2;
        Eigen::MatrixXcd A = random_complex(m, n, rng);
        Eigen::MatrixXcd B1 = random_complex(p1, q1, rng), B2 = random_complex(p2, q2, rng);
        Eigen::MatrixXcd lhs = kron(A, dsum<Eigen::MatrixXcd>({B1, B2}));
        Eigen::MatrixXcd Qm = kron_dsum_permutation(m, {p1, p2}).cast<Complex>();
        Eigen::MatrixXcd Qn = kron_dsum_permutation(n, {q1, q2}).cast<Complex>();
        Eigen::MatrixXcd rhs =
            Qm.transpose() * dsum<Eigen::MatrixXcd>({kron(A, B1), kron(A, B2)}) * Qn;
        CHECK(cdiff(lhs, rhs) < 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Fourier transforms

TEST_CASE("fourier transform of a point mass") {
    auto chain = chain_setup(1.0);
    HessianKernel f(2);
    Eigen::Matrix2d M;
    M << 1, 2, 3, 4;
    f.accumulate(chain.group().identity_word(), M);
    Eigen::VectorXd k(1);
    k << 0.4;
    InducedRep rep(chain.group(), k);
    CHECK(cdiff(fourier_l1(f, rep), M.cast<Complex>().eval()) < 1e-15);
}

TEST_CASE("chain kernel transform closed form") {
    const double a = 1.17;
    auto chain = chain_setup(a);
    const auto& G = chain.group();
    auto f = compute_fV(chain.s, chain.V);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> kd(0, 1.0 / a);
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd k(1);
        k << kd(rng);
        InducedRep rep(G, k);
        MatrixXcd ft = fourier_l1(f, rep);
        Eigen::Matrix2d expect = f.value(G.identity_word()) +
                                 2 * std::cos(2 * M_PI * k[0] * a) * f.value(G.word({1}, 0)) +
                                 2 * std::cos(4 * M_PI * k[0] * a) * f.value(G.word({2}, 0));
        CHECK(cdiff(ft, expect.cast<Complex>().eval()) < 1e-12);
        CHECK(ft.imag().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("transformed Hessian kernels are Hermitian") {
    auto chain = chain_setup(1.21);
    auto fc = compute_fV(chain.s, chain.V);
    auto tube = nanotube_setup({0.263, 1.1165, Eigen::Vector3d(1.388, 0.776, 0.6256)});
    auto ft = compute_fV(tube.s, tube.V);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> kd(-3, 3);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd k(1);
        k << kd(rng);
        MatrixXcd c = fourier_l1(fc, InducedRep(chain.group(), k));
        CHECK(cdiff(c, c.adjoint()) < 1e-12);
        MatrixXcd t = fourier_l1(ft, InducedRep(tube.s.group, k));
        CHECK(cdiff(t, t.adjoint()) < 1e-12);
    }
}

TEST_CASE("periodic transform of a constant against a nontrivial character") {
    auto chain = chain_setup(1.0);
    const auto& G = chain.group();
    ComplexField u(G, 4, 2, 2);
    for (std::size_t i = 0; i < u.size(); ++i)
        u.at_index(i) = (Eigen::Matrix2d() << 1, 2, 3, 4).finished().cast<Complex>();
    Eigen::VectorXd k(1);
    k << 1.0 / 4.0; // in L*/4 but not L* (a = 1)
    InducedRep rep(G, k);
    CHECK(fourier_periodic(u, rep).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("translation rule of the periodic transform") {
    auto G = nanotube_group(0.3, 1.0);
    std::mt19937 rng(17);
    const int N = 4;
    ComplexField u = random_complex_field(G, N, 2, 3, rng);
    Eigen::VectorXd k(1);
    k << 2.0 / (N * 0.3); // L*/N
    InducedRep rep(G, k);
    for (const GroupWord& g : {G.word({1}, 0), G.word({2}, 1), G.word({-3}, 1)}) {
        MatrixXcd lhs = fourier_periodic(u.translated(g), rep);
        MatrixXcd rhs = fourier_periodic(u, rep) * kron(MatrixXcd::Identity(3, 3), rep(G.inverse(g)));
        CHECK(cdiff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("plancherel formula over the induced character set") {
    std::mt19937 rng(19);
    auto check_group = [&](const GroupDescriptor& G, double lstar) {
        const int N = 4;
        ComplexField u = random_complex_field(G, N, 2, 1, rng);
        ComplexField v = random_complex_field(G, N, 2, 1, rng);
        Complex direct = field_inner(u, v);
        Complex viaft = 0;
        for (int j = 0; j < N; ++j) {
            Eigen::VectorXd k(1);
            k << lstar * j / N;
            InducedRep rep(G, k);
            MatrixXcd uh = fourier_periodic(u, rep), vh = fourier_periodic(v, rep);
            viaft += (uh.array() * vh.array().conjugate()).sum();
        }
        CHECK(std::abs(direct - viaft) < 1e-10 * (1 + std::abs(direct)));
    };
    auto chain = chain_setup(1.2);
    check_group(chain.group(), 1.0 / 1.2);
    auto T = nanotube_group(0.27, 1.1);
    check_group(T, 1.0 / 0.27);
}

TEST_CASE("convolution and its transform identity") {
    auto G = nanotube_group(0.28, 1.05);
    std::mt19937 rng(23);
    const int N = 6;

    // identity kernel
    ComplexField v = random_complex_field(G, N, 2, 1, rng);
    std::vector<std::pair<GroupWord, Eigen::MatrixXcd>> delta;
    delta.emplace_back(G.identity_word(), MatrixXcd::Identity(2, 2));
    ComplexField same = convolve(G, delta, v);
    for (const auto& g : G.coset_reps(N)) CHECK(cdiff(same(g), v(g)) < 1e-15);

    // random finitely supported kernel
    std::vector<std::pair<GroupWord, Eigen::MatrixXcd>> kern;
    std::uniform_int_distribution<int> zd(-3, 3), qd(0, 1);
    for (int i = 0; i < 5; ++i)
        kern.emplace_back(G.word({zd(rng)}, qd(rng)), random_complex(3, 2, rng));
    ComplexField w = convolve(G, kern, v);
    Eigen::VectorXd k(1);
    k << 3.0 / (N * 0.28);
    InducedRep rep(G, k);
    MatrixXcd lhs = fourier_periodic(w, rep);
    MatrixXcd kf = MatrixXcd::Zero(3 * rep.dim(), 2 * rep.dim());
    for (const auto& [g, M] : kern) kf += kron(M, rep(g));
    MatrixXcd rhs = kf * fourier_periodic(v, rep);
    CHECK(cdiff(lhs, rhs) < 1e-10 * (1 + lhs.norm()));
}

TEST_CASE("convolution route matches the quadratic form") {
    auto chain = chain_setup(1.12);
    auto f = compute_fV(chain.s, chain.V);
    std::mt19937 rng(29);
    RealField u = random_displacement_field(chain.group(), 6, rng);
    RealField u0 = u.inverted_argument();
    std::vector<std::pair<GroupWord, Eigen::MatrixXd>> kern;
    for (const auto& g : f.support()) kern.emplace_back(g, f.value(g));
    RealField conv = convolve(chain.group(), kern, u0);
    double lhs = std::real(field_inner(conv, u0));
    double rhs = quadratic_form_direct(chain.s, chain.V, u, u);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1 + std::abs(rhs)));
}

// ---------------------------------------------------------------------------
// dual domain

TEST_CASE("dual domain of the example groups") {
    auto chain = chain_setup(1.25);
    auto dc = dual_domain(chain.group());
    REQUIRE(dc.reps.size() == 1);
    CHECK(dc.reps[0].rho.dim == 1);
    CHECK(dc.reps[0].K.dimension() == 1);
    CHECK(std::abs(dc.reps[0].K.dual_basis(0, 0) - 1.0 / 1.25) < 1e-14);
    CHECK(dc.reps[0].K.extent[0] == 1.0);
    CHECK(!dc.reps[0].K.mirror_folded);
    CHECK(dc.reps[0].grho.point_rotations.size() == 1);

    auto T = nanotube_group(0.27, 1.12);
    auto dt = dual_domain(T);
    REQUIRE(dt.reps.size() == 1);
    CHECK(dt.reps[0].K.extent[0] == 0.5); // reflection folds K to [0, 1/(2a))
    CHECK(dt.reps[0].K.mirror_folded);
    CHECK(std::abs(dt.reps[0].K.dual_basis(0, 0) - 1.0 / 0.27) < 1e-12);
    CHECK(dt.reps[0].grho.point_rotations.size() == 2);

    // pure translation group on Z^1
    Eigen::VectorXd ta(1);
    ta << 0.8;
    GroupDescriptor Z1(1, 0, 1, {Isometry(Eigen::MatrixXd::Identity(1, 1), ta)},
                       {Isometry::identity(1)});
    auto dz = dual_domain(Z1);
    CHECK(dz.reps[0].K.extent[0] == 1.0);
    CHECK(std::abs(dz.reps[0].K.dual_basis(0, 0) - 1.25) < 1e-14);
}

// ---------------------------------------------------------------------------
// pencil

TEST_CASE("hermitian eigendecomposition") {
    Eigen::MatrixXcd D = Eigen::Vector3d(3, -1, 2).asDiagonal().toDenseMatrix().cast<Complex>();
    auto eig = hermitian_eig(D);
    CHECK(std::abs(eig.values[0] + 1) < 1e-14);
    CHECK(std::abs(eig.values[1] - 2) < 1e-14);
    CHECK(std::abs(eig.values[2] - 3) < 1e-14);

    std::mt19937 rng(31);
    Eigen::MatrixXcd A = random_hermitian(8, rng);
    auto ea = hermitian_eig(A);
    // residual and unitarity contracts
    for (int i = 0; i < 8; ++i)
        CHECK((A * ea.vectors.col(i) - ea.values[i] * ea.vectors.col(i)).norm() <=
              1e-10 * 8 * std::max(1.0, A.norm()));
    CHECK(cdiff(ea.vectors.adjoint() * ea.vectors, MatrixXcd::Identity(8, 8)) < 1e-10);

    // roots of the characteristic polynomial by determinant sign scanning
    auto roots = eig_by_determinant(A);
    REQUIRE(roots.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(roots[static_cast<std::size_t>(i)] - ea.values[i]) < 1e-8);

    // similarity invariance
    Eigen::MatrixXcd U = random_unitary(8, rng);
    auto eb = hermitian_eig(U.adjoint() * A * U);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(ea.values[i] - eb.values[i]) < 1e-9);

    Eigen::MatrixXcd bad = random_complex(4, 4, rng);
    CHECK_THROWS(hermitian_eig(bad));
}

TEST_CASE("loewner lambda_min special values") {
    Eigen::MatrixXcd I3 = MatrixXcd::Identity(3, 3);
    auto r = lambda_min(I3, I3);
    CHECK(r.value.is_finite());
    CHECK(std::abs(r.value.value - 1.0) < 1e-12);

    CHECK(lambda_min(MatrixXcd::Identity(2, 2), MatrixXcd::Zero(2, 2)).value.is_plus_inf());
    Eigen::MatrixXcd ind = Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix().cast<Complex>();
    CHECK(lambda_min(ind, MatrixXcd::Zero(2, 2)).value.is_minus_inf());
}

TEST_CASE("loewner lambda_min against the bisection oracle (full rank)") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXcd A = random_hermitian(n, rng);
        Eigen::MatrixXcd B = conditioned_matrix(n + static_cast<int>(rng() % 3), n, rng);
        auto fast = lambda_min(A, B);
        auto slow = lambda_min_bisect(A, B);
        REQUIRE(fast.value.is_finite());
        REQUIRE(slow.is_finite());
        CHECK(std::abs(fast.value.value - slow.value) < 1e-8 * (1 + std::abs(slow.value)));
    }
}

TEST_CASE("loewner lambda_min with rank-deficient B") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 3 + static_cast<int>(rng() % 5);
        int r = 1 + static_cast<int>(rng() % (n - 1)); // rank of B
        bool psd_kernel = trial % 2 == 0;

        Eigen::MatrixXcd V = random_unitary(n, rng);
        Eigen::MatrixXcd W = V.leftCols(r), K = V.rightCols(n - r);
        Eigen::MatrixXcd B = conditioned_matrix(n, r, rng) * W.adjoint();

        // A assembled blockwise in the (kernel, complement) frame
        Eigen::MatrixXcd A11;
        if (psd_kernel) {
            Eigen::MatrixXcd C = conditioned_matrix(n - r, n - r, rng);
            A11 = C.adjoint() * C; // strictly positive, well separated from 0
        } else {
            A11 = random_hermitian(n - r, rng);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A11);
            if (es.eigenvalues().minCoeff() > -0.1)
                A11 -= (es.eigenvalues().minCoeff() + 1.0) * MatrixXcd::Identity(n - r, n - r);
        }
        Eigen::MatrixXcd A12 = random_complex(n - r, r, rng);
        Eigen::MatrixXcd A22 = random_hermitian(r, rng);
        Eigen::MatrixXcd A = K * A11 * K.adjoint() + K * A12 * W.adjoint() +
                             W * A12.adjoint() * K.adjoint() + W * A22 * W.adjoint();
        A = 0.5 * (A + A.adjoint());

        auto fast = lambda_min(A, B);
        auto slow = lambda_min_bisect(A, B);
        CHECK(fast.rank_B == r);
        if (!psd_kernel) {
            CHECK(fast.value.is_minus_inf());
            CHECK(slow.is_minus_inf());
        } else {
            REQUIRE(fast.value.is_finite());
            REQUIRE(slow.is_finite());
            CHECK(std::abs(fast.value.value - slow.value) < 1e-7 * (1 + std::abs(slow.value)));
        }
    }
}

TEST_CASE("loewner lambda_min properties") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 4);
        Eigen::MatrixXcd A = random_hermitian(n, rng);
        Eigen::MatrixXcd B = random_complex(n + 1, n, rng);
        double v = lambda_min(A, B).value.value;

        // scaling in A and in B
        for (double t : {0.5, 2.0, 7.3}) {
            CHECK(std::abs(lambda_min(t * A, B).value.value - t * v) < 1e-9 * (1 + std::abs(v)));
            CHECK(std::abs(lambda_min(A, t * B).value.value - v / (t * t)) <
                  1e-9 * (1 + std::abs(v)));
        }

        // unitary invariance
        Eigen::MatrixXcd U = random_unitary(n, rng);
        CHECK(std::abs(lambda_min(U.adjoint() * A * U, B * U).value.value - v) <
              1e-9 * (1 + std::abs(v)));

        // monotonicity in A
        Eigen::MatrixXcd C = random_complex(n, n, rng);
        Eigen::MatrixXcd A2 = A + C.adjoint() * C;
        CHECK(lambda_min(A, B).value.value <=
              lambda_min(A2, B).value.value + 1e-10 * (1 + std::abs(v)));

        // dual characterization: random normalized directions never dip below
        std::normal_distribution<double> d;
        for (int i = 0; i < 50; ++i) {
            Eigen::VectorXcd x(n);
            for (int j = 0; j < n; ++j) x[j] = Complex(d(rng), d(rng));
            double bn = (B * x).norm();
            if (bn < 1e-12) continue;
            x /= bn;
            double q = std::real(x.dot(A * x)); // Eigen dot conjugates the left factor
            CHECK(q >= v - 1e-8 * (1 + std::abs(v)));
        }
    }
}

TEST_CASE("wave vector folding leaves the pencil values invariant") {
    auto tube = nanotube_setup({0.27, 1.1165, nanotube_ideal_x(0.27)});
    auto f = compute_fV(tube.s, tube.V);
    auto kern = seminorm_kernels(tube.s, tube.R);
    SweepConfig cfg;
    const double lstar = 1.0 / 0.27;
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> kd(0.05, 0.45);
    for (int i = 0; i < 10; ++i) {
        Eigen::VectorXd k(1), kshift(1), kmirror(1);
        k << kd(rng) * lstar;
        kshift << k[0] + lstar;        // translation in the G_rho lattice
        kmirror << lstar - k[0];       // reflection fold
        auto p = evaluate_k(tube.s.group, f, kern, false, TFRep::trivial(), k, cfg);
        auto ps = evaluate_k(tube.s.group, f, kern, false, TFRep::trivial(), kshift, cfg);
        auto pm = evaluate_k(tube.s.group, f, kern, false, TFRep::trivial(), kmirror, cfg);
        REQUIRE(p.lambda.is_finite());
        CHECK(std::abs(p.lambda.value - ps.lambda.value) < 1e-9 * (1 + std::abs(p.lambda.value)));
        CHECK(std::abs(p.lambda.value - pm.lambda.value) < 1e-9 * (1 + std::abs(p.lambda.value)));
    }
}
