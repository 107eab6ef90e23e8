#pragma once

// Travelling waves at prescribed speed as a truncated boundary value problem.

#include <cstddef>
#include <optional>

#include "tdw/profile.hpp"

namespace tdw {

struct BvpConfig {
    std::size_t intervals{16000};        ///< mesh intervals on [-L, L]
    double newton_tol{1e-10};            ///< sup-norm of the last Newton correction
    int max_newton{40};
    double continuation_step{0.05};      ///< speed increment between continuation stages
    int mesh_passes{2};                  ///< equidistribution + re-solve cycles on the target
    std::optional<double> half_length;   ///< overrides the adaptive L
    double monitor_share{0.7};           ///< fraction of nodes placed by the curvature monitor
};

/// Adaptive truncation max(40, 12/|Re lambda_slow|, 12/mu).
double bvp_half_length(double c, const ModelParams& params);

/**
 * Monotone wave of the eps = 0 system at speed c on [-L, L].
 *
 * The system is written first order in (u, u', w) and discretized by the
 * trapezoidal box scheme on an equidistributed mesh with a node at x = 0.
 * Boundary rows project out the modes that are inadmissible at each end and
 * the phase row fixes u(0) = 1/2. The solve starts from the reduced-system
 * orbit at c_infinity and continues in c with the configured step.
 *
 * Throws InvalidSpeed for c <= 0 or c below c_lin, NoConvergence when Newton
 * stagnates or the converged solution is not an admissible monotone wave.
 */
WaveProfile solve_tw_bvp(double c, const ModelParams& params, const BvpConfig& config = {});

/// Same for the eps-regularized system in (u, u', w, w'); continues from the eps = 0 wave.
WaveProfile solve_tw_bvp_eps(double c, double eps, const ModelParams& params, const BvpConfig& config = {});

/**
 * Newton solve from an explicit initial guess, without continuation.
 *
 * The guess is resampled onto an adapted mesh of config.intervals intervals on
 * [-L, L]; beyond its own grid it is extended with the asymptotic rates. eps is
 * taken from params.
 */
WaveProfile refine_tw_bvp(const WaveProfile& guess, double c, const ModelParams& params,
                          const BvpConfig& config = {});

}  // namespace tdw
