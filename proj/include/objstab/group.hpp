#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "objstab/isometry.hpp"
#include "objstab/tolerance.hpp"

namespace objstab {

/// Exact symbolic element t^z * p_q of a split group T ⋊ P. Equality and
/// hashing are exact on (z, q); the realization map is the only lossy step.
struct GroupWord {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> z; // translation exponents, size d2
    int q = 0;                                        // point-part index

    GroupWord() = default;
    GroupWord(std::vector<std::int64_t> exps, int qi) : q(qi) {
        z.resize(static_cast<Eigen::Index>(exps.size()));
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = exps[static_cast<std::size_t>(i)];
    }

    bool operator==(const GroupWord& o) const { return q == o.q && z.size() == o.z.size() && z == o.z; }
    bool operator!=(const GroupWord& o) const { return !(*this == o); }

    bool is_identity() const { return q == 0 && (z.size() == 0 || z.isZero()); }

    std::string str() const {
        std::ostringstream os;
        os << "(z=[";
        for (Eigen::Index i = 0; i < z.size(); ++i) os << (i ? "," : "") << z[i];
        os << "],q=" << q << ")";
        return os.str();
    }
};

struct GroupWordHash {
    std::size_t operator()(const GroupWord& w) const {
        std::size_t h = std::hash<int>()(w.q);
        for (Eigen::Index i = 0; i < w.z.size(); ++i)
            h ^= std::hash<std::int64_t>()(w.z[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }
};

/// Orders words by (q, z lexicographic); used wherever deterministic
/// iteration over a word set is required.
inline bool word_less(const GroupWord& a, const GroupWord& b) {
    if (a.q != b.q) return a.q < b.q;
    for (Eigen::Index i = 0; i < a.z.size(); ++i)
        if (a.z[i] != b.z[i]) return a.z[i] < b.z[i];
    return false;
}

struct ValidationIssue {
    std::string check;
    std::string detail;
};

struct ValidationReport {
    int daff = 0;
    bool injective = true;
    bool block_structure = true;
    // orbit affine hull along the trailing daff coordinates; informational,
    // the seminorm construction does not depend on it
    bool normal_form_aligned = true;
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    void fail(std::string check, std::string detail) {
        issues.push_back({std::move(check), std::move(detail)});
    }
};

/// Descriptor of a discrete group G = T ⋊ P < O(d1) ⊕ E(d2) in normal form:
/// T ≅ Z^{d2} generated by commuting screws/translations t_1..t_{d2} whose
/// E(d2)-projections are pure translations, P a finite point part closed
/// under multiplication. Words compose exactly through the integer action
/// matrices M_q with p_q t^z p_q^{-1} = t^{M_q z}.
class GroupDescriptor {
public:
    int d = 0, d1 = 0, d2 = 0;
    int m0 = 1; // admissible period multiplier; only m0 = 1 flows are implemented
    std::vector<Isometry> translation_generators; // size d2
    std::vector<Isometry> point_part;             // p_0 = id first

    GroupDescriptor() = default;

    GroupDescriptor(int d_, int d1_, int d2_,
                    std::vector<Isometry> tgens,
                    std::vector<Isometry> ppart,
                    std::optional<std::vector<Eigen::MatrixXd>> action = std::nullopt,
                    int m0_ = 1)
        : d(d_), d1(d1_), d2(d2_), m0(m0_),
          translation_generators(std::move(tgens)), point_part(std::move(ppart)) {
        if (d1 + d2 != d) throw std::invalid_argument("group: d1 + d2 != d");
        if (static_cast<int>(translation_generators.size()) != d2)
            throw std::invalid_argument("group: need d2 translation generators");
        if (point_part.empty()) point_part.push_back(Isometry::identity(d));
        if (!point_part[0].approx_equal(Isometry::identity(d), 1e-12))
            throw std::invalid_argument("group: point_part[0] must be the identity");
        build_tables(action);
    }

    int point_order() const { return static_cast<int>(point_part.size()); }

    GroupWord identity_word() const {
        GroupWord w;
        w.z = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(d2);
        w.q = 0;
        return w;
    }

    GroupWord word(std::vector<std::int64_t> z, int q) const {
        if (static_cast<int>(z.size()) != d2) throw std::invalid_argument("word: wrong exponent count");
        if (q < 0 || q >= point_order()) throw std::invalid_argument("word: point index out of range");
        return GroupWord(std::move(z), q);
    }

    /// (z1,q1)(z2,q2) = (z1 + M_{q1} z2, table[q1][q2])
    GroupWord compose(const GroupWord& a, const GroupWord& b) const {
        GroupWord r;
        r.z = a.z + action_[static_cast<std::size_t>(a.q)] * b.z;
        r.q = mul_table_[static_cast<std::size_t>(a.q)][static_cast<std::size_t>(b.q)];
        return r;
    }

    GroupWord inverse(const GroupWord& a) const {
        const int qi = inv_table_[static_cast<std::size_t>(a.q)];
        GroupWord r;
        r.z = -(action_[static_cast<std::size_t>(qi)] * a.z);
        r.q = qi;
        return r;
    }

    GroupWord power(const GroupWord& a, std::int64_t n) const {
        GroupWord acc = identity_word();
        GroupWord base = n >= 0 ? a : inverse(a);
        std::int64_t m = n >= 0 ? n : -n;
        for (std::int64_t i = 0; i < m; ++i) acc = compose(acc, base);
        return acc;
    }

    /// Geometric realization t^z * p_q as an isometry.
    Isometry realize(const GroupWord& w) const {
        Isometry g = point_part[static_cast<std::size_t>(w.q)];
        for (int i = 0; i < d2; ++i) {
            std::int64_t n = w.z[i];
            if (n == 0) continue;
            const Isometry& t = n > 0 ? translation_generators[static_cast<std::size_t>(i)]
                                      : t_inverse_[static_cast<std::size_t>(i)];
            for (std::int64_t j = 0; j < std::llabs(n); ++j) g = t.compose(g);
        }
        return g;
    }

    Eigen::VectorXd act(const GroupWord& w, const Eigen::VectorXd& x) const {
        return realize(w).act(x);
    }

    /// Lattice basis L of trans(π(T)): column i is the last-d2 part of trans(t_i).
    const Eigen::MatrixXd& lattice_basis() const { return lattice_; }
    /// Dual lattice basis, columns generate L*.
    const Eigen::MatrixXd& dual_lattice_basis() const { return dual_lattice_; }

    const Eigen::MatrixXd& action_matrix(int q) const {
        return action_real_[static_cast<std::size_t>(q)];
    }
    int point_inverse(int q) const { return inv_table_[static_cast<std::size_t>(q)]; }
    int point_product(int q1, int q2) const {
        return mul_table_[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)];
    }

    /// Kernel F of the projection π: indices q with π(p_q) = id in E(d2).
    const std::vector<int>& f_indices() const { return f_indices_; }
    bool in_TF(const GroupWord& w) const { return is_f_[static_cast<std::size_t>(w.q)]; }
    bool f_trivial() const { return f_indices_.size() == 1; }

    /// trans(π(w)) in R^{d2} for w in TF.
    Eigen::VectorXd pi_translation(const GroupWord& w) const {
        if (!in_TF(w)) throw std::invalid_argument("pi_translation: word not in TF");
        Eigen::VectorXd v = lattice_ * w.z.cast<double>();
        // F elements project to the identity, so they contribute nothing.
        return v;
    }

    /// d2-block of rot(p_q), i.e. rot(π(p_q)).
    Eigen::MatrixXd pi_rotation(int q) const {
        return point_part[static_cast<std::size_t>(q)].rot.bottomRightCorner(d2, d2);
    }

    /// Transversal {(z,q) : z in [0,N)^{d2}, q over P} of G/T^N,
    /// z in lexicographic order, q fastest-varying last.
    std::vector<GroupWord> coset_reps(int N) const {
        if (N <= 0 || N % m0 != 0) throw std::invalid_argument("coset_reps: N must be a positive multiple of m0");
        std::vector<GroupWord> out;
        std::vector<std::int64_t> z(static_cast<std::size_t>(d2), 0);
        out.reserve(coset_count(N));
        enumerate_z(z, 0, N, [&](const std::vector<std::int64_t>& zz) {
            for (int q = 0; q < point_order(); ++q) {
                GroupWord w;
                w.z = Eigen::Map<const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>>(zz.data(),
                        static_cast<Eigen::Index>(zz.size()));
                w.q = q;
                out.push_back(w);
            }
        });
        return out;
    }

    std::size_t coset_count(int N) const {
        std::size_t n = static_cast<std::size_t>(point_order());
        for (int i = 0; i < d2; ++i) n *= static_cast<std::size_t>(N);
        return n;
    }

    /// Index of the coset of w in the coset_reps(N) ordering.
    std::size_t coset_index(const GroupWord& w, int N) const {
        std::size_t idx = 0;
        for (int i = 0; i < d2; ++i) {
            std::int64_t r = ((w.z[i] % N) + N) % N;
            idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(r);
        }
        return idx * static_cast<std::size_t>(point_order()) + static_cast<std::size_t>(w.q);
    }

    /// Checks structural invariants of the descriptor itself.
    ValidationReport validate(const ToleranceConfig& tol = ToleranceConfig::defaults()) const {
        ValidationReport rep;
        auto check_iso = [&](const Isometry& g, const std::string& name) {
            if (!g.is_orthogonal(tol.isometry))
                rep.fail("orthogonality", name + ": rot^T rot deviates from I");
        };
        for (std::size_t i = 0; i < translation_generators.size(); ++i)
            check_iso(translation_generators[i], "t_" + std::to_string(i));
        for (std::size_t q = 0; q < point_part.size(); ++q)
            check_iso(point_part[q], "p_" + std::to_string(q));

        // normal form: block-diagonal rotations, zero d1-translation
        for (std::size_t q = 0; q < point_part.size(); ++q) {
            const auto& g = point_part[q];
            if (d1 > 0 && d2 > 0 &&
                (g.rot.topRightCorner(d1, d2).cwiseAbs().maxCoeff() > tol.structural ||
                 g.rot.bottomLeftCorner(d2, d1).cwiseAbs().maxCoeff() > tol.structural))
                rep.fail("block_structure", "p_" + std::to_string(q) + ": rot not O(d1)+O(d2) block diagonal");
            if (d1 > 0 && g.trans.head(d1).cwiseAbs().maxCoeff() > tol.structural)
                rep.fail("block_structure", "p_" + std::to_string(q) + ": nonzero d1 translation");
        }
        for (std::size_t i = 0; i < translation_generators.size(); ++i) {
            const auto& t = translation_generators[i];
            if (d2 > 0 &&
                (t.rot.bottomRightCorner(d2, d2) - Eigen::MatrixXd::Identity(d2, d2)).cwiseAbs().maxCoeff()
                    > tol.structural)
                rep.fail("translation_projection", "t_" + std::to_string(i) + ": pi(t) is not a pure translation");
            if (d1 > 0 && t.trans.head(d1).cwiseAbs().maxCoeff() > tol.structural)
                rep.fail("block_structure", "t_" + std::to_string(i) + ": nonzero d1 translation");
        }
        // T abelian
        for (std::size_t i = 0; i < translation_generators.size(); ++i)
            for (std::size_t j = i + 1; j < translation_generators.size(); ++j) {
                const auto ab = translation_generators[i].compose(translation_generators[j]);
                const auto ba = translation_generators[j].compose(translation_generators[i]);
                if (!ab.approx_equal(ba, tol.structural))
                    rep.fail("translations_commute", "t_" + std::to_string(i) + ", t_" + std::to_string(j));
            }
        // conjugation identity p_q t^{e_i} p_q^{-1} = t^{M_q e_i}
        for (int q = 0; q < point_order(); ++q) {
            const Isometry& p = point_part[static_cast<std::size_t>(q)];
            const Isometry pinv = p.inverse();
            for (int i = 0; i < d2; ++i) {
                Isometry lhs = p.compose(translation_generators[static_cast<std::size_t>(i)]).compose(pinv);
                GroupWord tw = identity_word();
                tw.z = action_[static_cast<std::size_t>(q)].col(i);
                Isometry rhs = realize(tw);
                if (!lhs.approx_equal(rhs, tol.structural))
                    rep.fail("action_matrix", "p_" + std::to_string(q) + " conjugation of t_" + std::to_string(i) +
                                               " does not match M_q");
            }
        }
        // point part closure against the table
        for (int q1 = 0; q1 < point_order(); ++q1)
            for (int q2 = 0; q2 < point_order(); ++q2) {
                Isometry prod = point_part[static_cast<std::size_t>(q1)]
                                    .compose(point_part[static_cast<std::size_t>(q2)]);
                int q = mul_table_[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)];
                if (!prod.approx_equal(point_part[static_cast<std::size_t>(q)], tol.structural))
                    rep.fail("point_closure", "p_" + std::to_string(q1) + " p_" + std::to_string(q2));
            }
        return rep;
    }

private:
    std::vector<Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>> action_;
    std::vector<Eigen::MatrixXd> action_real_;
    std::vector<std::vector<int>> mul_table_;
    std::vector<int> inv_table_;
    std::vector<Isometry> t_inverse_;
    std::vector<int> f_indices_;
    std::vector<bool> is_f_;
    Eigen::MatrixXd lattice_, dual_lattice_;

    template <class F>
    static void enumerate_z(std::vector<std::int64_t>& z, std::size_t i, int N, F&& f) {
        if (i == z.size()) { f(z); return; }
        for (int v = 0; v < N; ++v) { z[i] = v; enumerate_z(z, i + 1, N, f); }
    }

    void build_tables(const std::optional<std::vector<Eigen::MatrixXd>>& action) {
        const int n0 = point_order();
        // multiplication/inverse tables from the realizations
        mul_table_.assign(static_cast<std::size_t>(n0), std::vector<int>(static_cast<std::size_t>(n0), -1));
        inv_table_.assign(static_cast<std::size_t>(n0), -1);
        auto find_point = [&](const Isometry& g) -> int {
            for (int q = 0; q < n0; ++q)
                if (g.approx_equal(point_part[static_cast<std::size_t>(q)], 1e-8)) return q;
            return -1;
        };
        for (int q1 = 0; q1 < n0; ++q1)
            for (int q2 = 0; q2 < n0; ++q2) {
                int q = find_point(point_part[static_cast<std::size_t>(q1)]
                                       .compose(point_part[static_cast<std::size_t>(q2)]));
                if (q < 0)
                    throw std::invalid_argument("group: point part not closed under multiplication");
                mul_table_[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)] = q;
                if (q == 0) inv_table_[static_cast<std::size_t>(q1)] = q2;
            }
        for (int q = 0; q < n0; ++q)
            if (inv_table_[static_cast<std::size_t>(q)] < 0)
                throw std::invalid_argument("group: point part misses an inverse");

        t_inverse_.clear();
        for (const auto& t : translation_generators) t_inverse_.push_back(t.inverse());

        // lattice basis from the E(d2) projections of the generators
        lattice_.resize(d2, d2);
        for (int i = 0; i < d2; ++i)
            lattice_.col(i) = translation_generators[static_cast<std::size_t>(i)].trans.tail(d2);
        if (d2 > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(lattice_);
            if (svd.singularValues().minCoeff() <= 1e-12)
                throw std::invalid_argument("group: translation lattice is degenerate");
            dual_lattice_ = lattice_.transpose().inverse();
        } else {
            dual_lattice_.resize(0, 0);
        }

        // action matrices: take given ones or derive from L M_q = rot(pi(p_q)) L
        action_.clear();
        action_real_.clear();
        for (int q = 0; q < n0; ++q) {
            Eigen::MatrixXd M;
            if (action && !(*action).empty()) {
                M = (*action)[static_cast<std::size_t>(q)];
            } else if (d2 > 0) {
                M = lattice_.inverse() * pi_rotation(q) * lattice_;
            } else {
                M.resize(0, 0);
            }
            Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> Mi(d2, d2);
            for (int i = 0; i < d2; ++i)
                for (int j = 0; j < d2; ++j) {
                    double v = M(i, j);
                    std::int64_t r = static_cast<std::int64_t>(std::llround(v));
                    if (std::abs(v - static_cast<double>(r)) > 1e-8)
                        throw std::invalid_argument("group: action matrix of p_" + std::to_string(q) +
                                                    " is not integral");
                    Mi(i, j) = r;
                }
            action_.push_back(Mi);
            action_real_.push_back(Mi.cast<double>());
        }

        // kernel F of pi
        is_f_.assign(static_cast<std::size_t>(n0), false);
        f_indices_.clear();
        for (int q = 0; q < n0; ++q) {
            const auto& g = point_part[static_cast<std::size_t>(q)];
            bool f = true;
            if (d2 > 0) {
                f = (pi_rotation(q) - Eigen::MatrixXd::Identity(d2, d2)).cwiseAbs().maxCoeff() <= 1e-10 &&
                    g.trans.tail(d2).cwiseAbs().maxCoeff() <= 1e-10;
            }
            is_f_[static_cast<std::size_t>(q)] = f;
            if (f) f_indices_.push_back(q);
        }
    }
};

/// An objective structure: a validated descriptor plus the reference point x0.
struct Structure {
    GroupDescriptor group;
    Eigen::VectorXd x0;

    Structure() = default;
    Structure(GroupDescriptor g, Eigen::VectorXd x)
        : group(std::move(g)), x0(std::move(x)) {
        if (x0.size() != group.d) throw std::invalid_argument("structure: x0 has wrong dimension");
    }

    Eigen::VectorXd orbit_point(const GroupWord& w) const { return group.act(w, x0); }
    Eigen::VectorXd relative_position(const GroupWord& w) const { return orbit_point(w) - x0; }
};

/// All g with ||g.x0 - x0|| <= radius, ordered by (distance, word order).
/// Completeness: in normal form the last d2 coordinates of t^z p_q . x0 are
/// L z + (p_q.x0)_{d2}, so |z| is bounded through sigma_min(L).
inline std::vector<std::pair<GroupWord, Eigen::VectorXd>>
orbit_ball(const Structure& s, double radius) {
    if (radius < 0) throw std::invalid_argument("orbit_ball: radius must be nonnegative");
    const auto& G = s.group;
    std::vector<std::pair<GroupWord, Eigen::VectorXd>> out;

    std::int64_t zmax = 0;
    if (G.d2 > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(G.lattice_basis());
        double smin = svd.singularValues().minCoeff();
        double offset = 0;
        for (int q = 0; q < G.point_order(); ++q) {
            Eigen::VectorXd y = G.point_part[static_cast<std::size_t>(q)].act(s.x0);
            offset = std::max(offset, (y.tail(G.d2) - s.x0.tail(G.d2)).norm());
        }
        zmax = static_cast<std::int64_t>(std::ceil((radius + offset) / smin)) + 1;
    }

    std::vector<std::int64_t> z(static_cast<std::size_t>(G.d2), -zmax);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == z.size()) {
            for (int q = 0; q < G.point_order(); ++q) {
                GroupWord w;
                w.z = Eigen::Map<const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>>(z.data(),
                        static_cast<Eigen::Index>(z.size()));
                w.q = q;
                Eigen::VectorXd p = s.orbit_point(w);
                if ((p - s.x0).norm() <= radius) out.emplace_back(w, p);
            }
            return;
        }
        for (std::int64_t v = -zmax; v <= zmax; ++v) { z[i] = v; rec(i + 1); }
    };
    rec(0);

    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        double da = (a.second - s.x0).norm(), db = (b.second - s.x0).norm();
        if (std::abs(da - db) > 1e-14) return da < db;
        return word_less(a.first, b.first);
    });

    // injectivity inside the ball
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
            if ((out[i].second - out[j].second).norm() <= 1e-10)
                throw std::runtime_error("orbit_ball: structure fails injectivity at " + out[i].first.str() +
                                         " vs " + out[j].first.str());
    return out;
}

/// Affine dimension of the orbit, from the singular values of centered
/// orbit points collected over a word ball.
inline int orbit_affine_dimension(const Structure& s, int ball = 2,
                                  const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    const auto& G = s.group;
    std::vector<Eigen::VectorXd> pts;
    std::vector<std::int64_t> z(static_cast<std::size_t>(G.d2), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == z.size()) {
            for (int q = 0; q < G.point_order(); ++q) {
                GroupWord w;
                w.z = Eigen::Map<const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>>(z.data(),
                        static_cast<Eigen::Index>(z.size()));
                w.q = q;
                pts.push_back(s.relative_position(w));
            }
            return;
        }
        for (std::int64_t v = -ball; v <= ball; ++v) { z[i] = v; rec(i + 1); }
    };
    rec(0);
    if (pts.empty()) return 0;
    Eigen::MatrixXd M(s.x0.size(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = pts[i];
    if (M.cwiseAbs().maxCoeff() == 0.0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol.rank_rel * sv[0]) ++r;
    return r;
}

/// Structural validation per the normal-form assumptions: descriptor checks,
/// daff, injectivity on a ball, homomorphism spot check.
inline ValidationReport validate_structure(const Structure& s, double ball_radius = 0.0,
                                           const ToleranceConfig& tol = ToleranceConfig::defaults()) {
    ValidationReport rep = s.group.validate(tol);
    rep.daff = orbit_affine_dimension(s);

    // does the orbit's affine hull sit in the last daff coordinates? The
    // point-part images of x0 carry all of the head variation, since the
    // rotations are block diagonal and translations only touch the tail.
    {
        const int d3 = s.group.d - rep.daff;
        bool aligned = true;
        for (int q = 0; q < s.group.point_order() && aligned; ++q) {
            GroupWord w = s.group.identity_word();
            w.q = q;
            Eigen::VectorXd p = s.orbit_point(w);
            if (d3 > 0 && p.head(d3).cwiseAbs().maxCoeff() > 1e-10) aligned = false;
        }
        rep.normal_form_aligned = aligned;
    }

    if (ball_radius <= 0) {
        double scale = std::max(1.0, s.x0.norm());
        if (s.group.d2 > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.group.lattice_basis());
            scale = std::max(scale, svd.singularValues().maxCoeff());
        }
        ball_radius = 3.0 * scale;
    }
    try {
        auto pts = orbit_ball(s, ball_radius);
        (void)pts;
    } catch (const std::exception& e) {
        rep.injective = false;
        rep.fail("injectivity", e.what());
    }

    // realize(compose) = realize*realize spot check on generator words
    const auto& G = s.group;
    std::vector<GroupWord> probe;
    probe.push_back(G.identity_word());
    for (int i = 0; i < G.d2; ++i) {
        GroupWord w = G.identity_word();
        w.z[i] = 1;
        probe.push_back(w);
    }
    for (int q = 1; q < G.point_order(); ++q) {
        GroupWord w = G.identity_word();
        w.q = q;
        probe.push_back(w);
    }
    for (const auto& a : probe)
        for (const auto& b : probe) {
            Isometry lhs = G.realize(G.compose(a, b));
            Isometry rhs = G.realize(a).compose(G.realize(b));
            if (!lhs.approx_equal(rhs, tol.structural))
                rep.fail("homomorphism", a.str() + " * " + b.str());
        }
    return rep;
}

} // namespace objstab
