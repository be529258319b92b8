#pragma once

namespace objstab {

/// Global numerical tolerances. One instance is threaded through a run and
/// echoed into every output artifact so results are reproducible.
struct ToleranceConfig {
    double structural = 1e-10;    ///< group/structure validation (orthogonality, homomorphism, blocks)
    double isometry = 1e-12;      ///< rot^T rot = I check
    double rank_rel = 1e-10;      ///< singular values below rank_rel * sigma_max count as zero
    double criticality = 1e-8;    ///< ||e_V|| at or below this means critical point
    double psd_rel = 1e-10;       ///< eigenvalues above -psd_rel * ||A|| count as nonnegative
    double route_agree = 1e-9;    ///< dual-route cross-checks (quadratic form)
    double seminorm_agree = 1e-10; ///< dual-route cross-checks (seminorms)
    double kernel_prune = 1e-14;  ///< kernel entries below kernel_prune * max are dropped

    static const ToleranceConfig& defaults() {
        static const ToleranceConfig t{};
        return t;
    }
};

} // namespace objstab
