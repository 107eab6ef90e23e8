#pragma once

// Closed-form quantities of the decay-rate analysis at the unstable state (0,0).
//
// All formulas are evaluated in long double and returned as double. Every
// function is pure and thread-safe.

#include <array>
#include <complex>
#include <optional>
#include <string>

#include "tdw/model.hpp"

namespace tdw {

/// Minimal speed of the Stefan-like limit problem, 1/sqrt(gamma(1+gamma)).
double c_infinity(double gamma);

/// Threshold (1+2 gamma)/gamma^2 above which nonlinear selection is proven.
double k_zero(double gamma);

struct AlphaBeta {
    double alpha;
    double beta;
};

/// alpha = -c/2 + sqrt(c^2/4 + 1), beta = 1 - alpha/(gamma c).
AlphaBeta alpha_beta(double c, double gamma);

struct MuNu {
    double mu;  ///< positive root of mu^2 + c mu - 1
    double nu;  ///< positive root of nu^2 - c nu - (1 + gamma k)
};

MuNu mu_nu(double c, const ModelParams& params);

/// Value of lambda^3 + c lambda^2 - (1 + gamma k) lambda - k/c.
double dispersion_cubic(double lambda, double c, const ModelParams& params);

enum class RootClass { TwoReal, DoubleRoot, ComplexPair };

const char* to_string(RootClass cls);

/**
 * Roots of the decay cubic at speed c.
 *
 * The two negative-part roots are stored fast first (more negative real part).
 * For a complex pair, lambda_fast == lambda_slow == real part and imag > 0.
 */
struct DispersionAnalysis {
    double c{};
    double lambda_plus{};
    double lambda_fast{};
    double lambda_slow{};
    double imag{0.0};
    RootClass cls{RootClass::TwoReal};

    std::array<std::complex<double>, 3> roots() const;
    bool has_real_negative_roots() const { return cls != RootClass::ComplexPair; }
};

DispersionAnalysis dispersion_roots(double c, const ModelParams& params);

/// Speed c > 0 for which lambda < 0 solves the decay cubic.
double c_bar(double lambda, const ModelParams& params);

struct LinearSelectionPoint {
    double c_lin;
    double lambda_lin;
};

/// Minimum of c_bar over lambda < 0.
LinearSelectionPoint linear_selection_point(const ModelParams& params);

/// Fast decay rate of the reduced-system wave at c = c_infinity.
double lambda_infinity(const ModelParams& params);

/// The k-independent root -sqrt((1+gamma)/gamma) of the cubic at c = c_infinity.
double lambda_infinity_star(double gamma);

enum class SelectionRegime { NonlinearSelection, Unresolved };

const char* to_string(SelectionRegime regime);

struct SpeedBounds {
    double lower;
    double upper;
    std::optional<double> exact;
    SelectionRegime regime;
};

/// Proven information about c_min: exact for k >= k0, bracket otherwise.
SpeedBounds minimal_speed(const ModelParams& params);

enum class Ordering { Above, Equal, Below };

/// '>' , '=' or '<' as used in reports.
const char* to_symbol(Ordering ordering);

/**
 * lambda_infinity(k), lambda_lin(k), lambda_infinity_star and their ordering.
 *
 * expected is derived from sign(k - k0); observed from the numbers. A
 * mismatch is reported in `violation` and means a numerical bug.
 */
struct DecayOrdering {
    double lambda_inf;
    double lambda_lin;
    double lambda_star;
    Ordering expected;
    Ordering observed;
    std::optional<std::string> violation;
};

DecayOrdering decay_ordering(const ModelParams& params);

}  // namespace tdw
