#pragma once

// Discretized travelling waves and the checks run on them.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tdw/model.hpp"

namespace tdw {

enum class ProfileMethod { ReducedShooting, CollocationBVP, EpsCollocationBVP, StefanLimit };

const char* to_string(ProfileMethod method);
ProfileMethod profile_method_from_string(const std::string& name);

/**
 * Travelling-wave candidate (c, u, w) on a strictly increasing grid.
 *
 * Profiles produced by the solvers are normalized so that u(0) = 1/2 and
 * carry the model parameters they were computed for. eps is nonzero only for
 * EpsCollocationBVP.
 */
struct WaveProfile {
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> w;
    double c{};
    ProfileMethod method{ProfileMethod::CollocationBVP};
    double eps{0.0};
    ModelParams params{};
    double solver_residual{0.0};  ///< final Newton / integrator defect

    std::size_t size() const { return x.size(); }
};

/// Result of checking the admissibility invariants of a profile.
struct ProfileValidation {
    bool grid_increasing{true};
    bool in_range{true};
    bool monotone{true};
    bool tails_adequate{true};
    bool normalized{true};
    double u_at_zero{0.0};
    std::vector<std::string> issues;

    bool ok() const { return issues.empty(); }
};

/**
 * Checks grid, range (0,1), strict decrease, tail truncation and u(0) = 1/2.
 *
 * Between two nodes whose values lie within 1e-12 of 0 or 1 the decrement can
 * fall below double resolution; there only a non-increase (up to 1e-15) is required.
 */
ProfileValidation validate_profile(const WaveProfile& profile);

/// Throws MonotonicityError with the collected issues unless valid.
void require_admissible(const WaveProfile& profile);

/// Linear interpolation; values outside the grid are clamped to the end values.
double interpolate(const std::vector<double>& x, const std::vector<double>& f, double at);

/// Centered three-point derivatives on a possibly nonuniform grid (interior nodes only;
/// the end entries are one-sided second-order).
struct GridDerivatives {
    std::vector<double> d1;
    std::vector<double> d2;
};

GridDerivatives grid_derivatives(const std::vector<double>& x, const std::vector<double>& f);

struct TwResidual {
    double res_u;
    double res_w;
};

/**
 * Sup over interior nodes of |u'' + c u' - u + w - gamma k u (1-w)| and
 * |eps w'' + c w' + eps (u - w) + k u (1-w)| with finite-difference derivatives.
 */
TwResidual full_tw_residual(const WaveProfile& profile);

enum class Side { PlusInfinity, MinusInfinity };
enum class Component { U, W, OneMinusU, OneMinusW };

const char* to_string(Side side);
const char* to_string(Component component);

struct DecayFit {
    double rate{};
    double intercept{};
    double r_squared{};
    double x_lo{};
    double x_hi{};
    std::size_t nodes{};
    Side side{Side::PlusInfinity};
    Component component{Component::U};
};

struct DecayFitOptions {
    double tail_fraction{0.25};
    double value_lo{1e-10};
    double value_hi{1e-2};
    std::size_t min_nodes{20};
};

/// Least-squares slope of log(value) against x on the tail window.
DecayFit fit_decay_rate(const WaveProfile& profile, Side side, Component component,
                        const DecayFitOptions& options = {});

struct AprioriBoundReport {
    // Worst margin (>= -slack means satisfied) of each inequality
    //   u' >= -mu (1-u),  u' >= -nu u,  |u''| <= c mu + 1 + gamma k,  w' >= -(k/c)(1-w).
    double margin_u_mu;
    double margin_u_nu;
    double margin_u2;
    double margin_w;
    double x_worst_u_mu;
    double x_worst_u_nu;
    double x_worst_u2;
    double x_worst_w;
    double slack;
    bool u_mu_ok;
    bool u_nu_ok;
    bool u2_ok;
    bool w_ok;

    bool all_ok() const { return u_mu_ok && u_nu_ok && u2_ok && w_ok; }
};

AprioriBoundReport check_apriori_bounds(const WaveProfile& profile, double slack = 1e-6);

/// Trapezoid value of the integral of u (1 - w); equals c/k for exact waves.
double mass_identity(const WaveProfile& profile);

/// Shift x so that the linear interpolant of u crosses 1/2 at x = 0.
WaveProfile align_half_crossing(WaveProfile profile);

/// Sup over the common x-range of max(|u_a - u_b|, |w_a - w_b|), evaluating b by
/// linear interpolation at the nodes of a that lie inside b's grid.
double sup_distance(const WaveProfile& a, const WaveProfile& b);

}  // namespace tdw
