#pragma once

#include <vector>

#include "tdw/profile.hpp"

namespace tdw {

/**
 * Closed-form travelling wave of the large-degradation (Stefan-like) limit.
 *
 * In the frame with the free boundary at x = 0:
 *   u(x) = 1 - exp(alpha x) for x <= 0, 0 for x >= 0,
 *   w(x) = 1 for x < 0, beta exp(-x/(c gamma)) for x > 0,
 * and the jump condition gamma c (1 - beta) = alpha holds.
 */
struct StefanWave {
    double c;
    double gamma;
    double alpha;
    double beta;

    double u(double x) const;
    /// w(0) is taken as the right limit beta.
    double w(double x) const;

    /// Position of the free boundary in the frame where u(0) = 1/2, i.e. ln(2)/alpha.
    double half_point_offset() const;
    double u_normalized(double x) const { return u(x - half_point_offset()); }
    double w_normalized(double x) const { return w(x - half_point_offset()); }

    /// gamma c (1 - beta) - alpha; zero up to rounding.
    double jump_defect() const;
};

/// Throws NoWaveBelowMinimalSpeed for c < c_infinity(gamma).
StefanWave stefan_wave(double c, double gamma);

/// Samples the normalized wave (u(0) = 1/2) on the given grid.
WaveProfile sample_stefan(const StefanWave& wave, const std::vector<double>& x);

}  // namespace tdw
