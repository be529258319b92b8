#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "objstab/group.hpp"
#include "objstab/potential.hpp"

namespace objstab {

/// A structure, its potential and the range sets used for the seminorms.
struct ProblemSetup {
    Structure s;
    SitePotential V;
    std::vector<GroupWord> R, Rprime, Rsecond;

    const GroupDescriptor& group() const { return s.group; }
};

// ---------------------------------------------------------------------------
// Atom chain: G = <t>, t = (I_2 | a e_2), Lennard-Jones nearest neighbor plus
// a repulsive 8 r^-6 next-nearest term.

inline ProblemSetup chain_setup(double a) {
    if (a <= 0) throw std::invalid_argument("chain: a must be positive");
    Eigen::VectorXd ta(2);
    ta << 0, a;
    GroupDescriptor G(2, 1, 1, {Isometry(Eigen::MatrixXd::Identity(2, 2), ta)},
                      {Isometry::identity(2)});
    Structure s(G, Eigen::VectorXd::Zero(2));

    SitePotential V(2);
    V.add_pair({G.word({1}, 0), RadialFunction::lennard_jones(), 1.0});
    V.add_pair({G.word({2}, 0), RadialFunction::inverse_power(8.0, 6.0), 1.0});

    ProblemSetup out{std::move(s), std::move(V), {}, {}, {}};
    out.R = {G.word({0}, 0), G.word({1}, 0), G.word({2}, 0)};
    out.Rprime = {G.word({0}, 0), G.word({1}, 0)};
    out.Rsecond = {G.word({0}, 0), G.word({1}, 0)};
    return out;
}

inline double chain_energy_closed_form(double a) {
    return std::pow(a, -12.0) - (7.0 / 8.0) * std::pow(a, -6.0);
}

// ---------------------------------------------------------------------------
// (5,1) carbon nanotube: G = <t, p> with a screw t = (R(alpha)+I_1 | a e_3)
// and the flip p = (I_1 + (-I_2) | 0); harmonic bonds to {tp, t^6 p, t^7 p}
// and a (cos + 1/2)^2 bond-angle term over the same neighbors.

struct NanotubeParams {
    double a;
    double alpha;
    Eigen::Vector3d x;
};

inline double nanotube_alpha0() { return 11.0 * M_PI / 31.0; }
inline double nanotube_a0() { return 3.0 / (2.0 * std::sqrt(31.0)); }

/// Reference point of the ideal (unrelaxed) (5,1) tube at scale a.
inline Eigen::Vector3d nanotube_ideal_x(double a) {
    const double r = 31.0 / (M_PI * std::sqrt(3.0));
    const double beta = 5.0 * M_PI / 31.0;
    return a * Eigen::Vector3d(r * std::cos(beta), r * std::sin(beta), 7.0 / 3.0);
}

inline GroupDescriptor nanotube_group(double a, double alpha) {
    Eigen::Matrix3d rt = Eigen::Matrix3d::Identity();
    rt(0, 0) = std::cos(alpha);
    rt(0, 1) = -std::sin(alpha);
    rt(1, 0) = std::sin(alpha);
    rt(1, 1) = std::cos(alpha);
    Eigen::Vector3d tt(0, 0, a);
    Eigen::Matrix3d rp = Eigen::Vector3d(1, -1, -1).asDiagonal();
    return GroupDescriptor(3, 2, 1, {Isometry(rt, tt)},
                           {Isometry::identity(3), Isometry(rp, Eigen::Vector3d::Zero())});
}

inline std::vector<GroupWord> nanotube_neighbors(const GroupDescriptor& G) {
    return {G.word({1}, 1), G.word({6}, 1), G.word({7}, 1)};
}

inline ProblemSetup nanotube_setup(const NanotubeParams& p) {
    GroupDescriptor G = nanotube_group(p.a, p.alpha);
    Structure s(G, p.x);
    SitePotential V(3);
    auto N = nanotube_neighbors(G);
    for (const auto& g : N)
        V.add_pair({g, RadialFunction::harmonic(1.0), 0.5});
    V.add_cosine3({N, 0.5});

    ProblemSetup out{std::move(s), std::move(V), {}, {}, {}};
    // R in the published phi order; R' generates, R'' has Property 1
    out.R = {G.word({-1}, 0), G.word({0}, 0), G.word({1}, 0), G.word({2}, 0),
             G.word({-1}, 1), G.word({0}, 1), G.word({1}, 1)};
    out.Rprime = {G.word({0}, 0), G.word({1}, 0), G.word({0}, 1)};
    out.Rsecond = {G.word({-1}, 0), G.word({0}, 0), G.word({1}, 0), G.word({0}, 1)};
    return out;
}

/// x lies in U_{a,alpha}: the orbit map is injective nearby and the three
/// nearest neighbors of x are exactly N.x (strict separation).
inline bool nanotube_in_U(const NanotubeParams& p, double margin = 1e-9) {
    if (p.a <= 0 || p.alpha <= 0 || p.alpha >= M_PI) return false;
    GroupDescriptor G = nanotube_group(p.a, p.alpha);
    Structure s(G, p.x);
    auto N = nanotube_neighbors(G);
    double dmax = 0;
    for (const auto& g : N) dmax = std::max(dmax, s.relative_position(g).norm());
    std::vector<std::pair<GroupWord, Eigen::VectorXd>> ball;
    try {
        ball = orbit_ball(s, dmax * (1.0 + 1e-6) + margin);
    } catch (const std::exception&) {
        return false; // injectivity failure
    }
    for (const auto& [w, pt] : ball) {
        if (w.is_identity()) continue;
        bool in_N = false;
        for (const auto& g : N)
            if (g == w) { in_N = true; break; }
        if (!in_N) return false; // a non-neighbor word is at least as close
    }
    return true;
}

// ---------------------------------------------------------------------------
// Finite two-point fixture: G = {id, p}, p = (-I_2 | 0), x0 = e_1,
// V = -||y(p)||^2. Not a critical point; the rotation field has negative
// second variation while both seminorms of it vanish.

inline ProblemSetup two_point_fixture() {
    Eigen::MatrixXd rp = -Eigen::MatrixXd::Identity(2, 2);
    GroupDescriptor G(2, 2, 0, {}, {Isometry::identity(2), Isometry(rp, Eigen::VectorXd::Zero(2))});
    Eigen::VectorXd x0(2);
    x0 << 1, 0;
    Structure s(G, x0);
    SitePotential V(2);
    V.add_pair({G.word({}, 1), RadialFunction::inverse_power(-1.0, -2.0), 1.0});
    ProblemSetup out{std::move(s), std::move(V), {}, {}, {}};
    out.R = {G.word({}, 0), G.word({}, 1)};
    out.Rprime = out.R;
    out.Rsecond = out.R;
    return out;
}

} // namespace objstab
