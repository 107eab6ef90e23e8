#pragma once

#include "tdw/profile.hpp"

namespace tdw {

struct ShootingConfig {
    double delta{1e-8};          ///< offset from (0,0) along the stable eigenvector
    double rtol{1e-10};          ///< adaptive pass tolerances
    double atol{1e-16};
    double dx{1e-3};             ///< output grid spacing
    int min_substeps{4};         ///< fixed RK4 substeps per output interval
    double tol_left{1e-8};       ///< stop once u > 1 - tol_left
    double x_budget{2000.0};     ///< maximal orbit length
    double monotone_tol{1e-12};
};

/// Right-hand side of the first-order system equivalent to the wave equations at c = c_infinity.
struct ReducedRhs {
    double du;
    double dw;
};

ReducedRhs reduced_rhs(double u, double w, const ModelParams& params);

/**
 * Heteroclinic orbit of the reduced system from (1,1) to (0,0) at c = c_infinity.
 *
 * The orbit is traced backwards in x from delta*v, v the normalized stable
 * eigenvector at (0,0). An adaptive Dormand-Prince pass locates the u = 1/2
 * crossing and the left truncation point; a fixed-step RK4 pass then lays the
 * orbit onto the uniform grid x_j = j*dx with u(0) = 1/2.
 *
 * Throws TruncationError if u never exceeds 1 - tol_left within x_budget and
 * MonotonicityError if the orbit leaves the monotone region.
 */
WaveProfile shoot_reduced_wave(const ModelParams& params, const ShootingConfig& config = {});

}  // namespace tdw
