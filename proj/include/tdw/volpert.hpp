#pragma once

// Sup-of-ratio functionals bounding the minimal speed of the regularized system.

#include <cstddef>
#include <vector>

#include "tdw/model.hpp"
#include "tdw/profile.hpp"

namespace tdw {

/**
 * A candidate pair (rho, sigma) with first and second derivatives on a grid.
 *
 * noise holds an estimate of the absolute rounding error in the ratio
 * numerators at each node; it is zero for analytically differentiated pairs.
 */
struct TrialSamples {
    std::vector<double> x;
    std::vector<double> rho, drho, d2rho;
    std::vector<double> sigma, dsigma, d2sigma;
    std::vector<double> noise;

    std::size_t size() const { return x.size(); }
};

/// (u, w) of a profile with three-point finite-difference derivatives.
TrialSamples samples_from_profile(const WaveProfile& profile);

/**
 * The smooth decreasing pair rho = sigma with e^{-x} for x >= 1 and
 * 1 - e^{x} for x <= -1, glued on [-1, 1] by -rho' = A + B x^2 + C x^4 + D x^6.
 *
 * The glue matches -rho' and its derivative at x = +-1 and has the integral
 * 1 - 2/e, so rho is C^2 and continuous across both junctions.
 */
TrialSamples glued_exponential_trial_pair(const std::vector<double>& x);

/// Coefficients (A, B, C, D) of the glue polynomial above.
struct GluePolynomial {
    double a, b, c, d;
    double operator()(double x) const;  ///< -rho'(x) on [-1, 1]
};

GluePolynomial glue_polynomial();

struct VolpertReport {
    double phi1_max{};
    double phi2_max{};
    double eps{};
    double speed_bound{};     ///< max(phi1_max, phi2_max), an upper bound for c_eps
    double x_phi1{};          ///< node attaining phi1_max
    double x_phi2{};
    std::size_t nodes_phi1{}; ///< nodes that passed the derivative floor
    std::size_t nodes_phi2{};
};

struct VolpertOptions {
    double relative_floor{1e-8};   ///< exclude -rho' < relative_floor * max|rho'| (same for sigma)
    double noise_factor{1e4};      ///< and -rho' < noise_factor * noise
};

/**
 * phi1 = sup (rho'' - rho + sigma - gamma k rho (1 - sigma)) / (-rho'),
 * phi2 = sup (eps sigma'' + eps (rho - sigma) + k rho (1 - sigma)) / (-sigma'),
 * over interior nodes whose denominators pass the floor.
 *
 * Throws DerivativeFloorError if no node passes for either ratio and
 * DomainError for eps outside [0, 1/(2 gamma)).
 */
VolpertReport volpert_functionals(const TrialSamples& samples, double eps, const ModelParams& params,
                                  const VolpertOptions& options = {});

/// Convenience overload with rho = u and sigma = w of a wave profile.
VolpertReport volpert_functionals(const WaveProfile& profile, double eps, const ModelParams& params,
                                  const VolpertOptions& options = {});

/// sup of (sigma'' + rho - sigma) / (-sigma') on the same window, the eps-coefficient in phi2.
double phi2_eps_coefficient(const TrialSamples& samples, const ModelParams& params,
                            const VolpertOptions& options = {});

}  // namespace tdw
