#include "tdw/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tdw {
namespace {

using real = long double;

void require_positive(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
        std::ostringstream msg;
        msg << name << " must be positive, got " << v;
        throw DomainError(msg.str());
    }
}

real cubic(real s, real c, real gamma, real k) {
    return ((s + c) * s - (1 + gamma * k)) * s - k / c;
}

real cubic_prime(real s, real c, real gamma, real k) {
    return (3 * s + 2 * c) * s - (1 + gamma * k);
}

// Positive root by Newton safeguarded with a bisection bracket. The cubic is
// negative at 0 and eventually positive, and has exactly one positive root.
real positive_root(real c, real gamma, real k) {
    real lo = 0;
    real hi = std::sqrt(1 + gamma * k);
    while (cubic(hi, c, gamma, k) <= 0) {
        lo = hi;
        hi *= 2;
    }
    real s = hi;
    for (int it = 0; it < 200; ++it) {
        const real f = cubic(s, c, gamma, k);
        if (f == 0) return s;
        if (f > 0) hi = s; else lo = s;
        const real df = cubic_prime(s, c, gamma, k);
        real next = s - f / df;
        if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
        const real step = std::fabs(next - s);
        s = next;
        if (step <= 4 * std::numeric_limits<real>::epsilon() * s) break;
    }
    return s;
}

constexpr double kDoubleRootTol = 1e-7;

}  // namespace

double c_infinity(double gamma) {
    require_positive(gamma, "gamma");
    const real g = gamma;
    return static_cast<double>(1 / std::sqrt(g * (1 + g)));
}

double k_zero(double gamma) {
    require_positive(gamma, "gamma");
    const real g = gamma;
    return static_cast<double>((1 + 2 * g) / (g * g));
}

AlphaBeta alpha_beta(double c, double gamma) {
    require_positive(c, "c");
    require_positive(gamma, "gamma");
    const real cc = c;
    const real alpha = -cc / 2 + std::sqrt(cc * cc / 4 + 1);
    const real beta = 1 - alpha / (real(gamma) * cc);
    return {static_cast<double>(alpha), static_cast<double>(beta)};
}

MuNu mu_nu(double c, const ModelParams& params) {
    require_positive(c, "c");
    params.validate();
    const real cc = c;
    const real a = 1 + real(params.gamma) * real(params.k);
    const real mu = -cc / 2 + std::sqrt(cc * cc / 4 + 1);
    const real nu = cc / 2 + std::sqrt(cc * cc / 4 + a);
    return {static_cast<double>(mu), static_cast<double>(nu)};
}

double dispersion_cubic(double lambda, double c, const ModelParams& params) {
    return static_cast<double>(cubic(lambda, c, params.gamma, params.k));
}

const char* to_string(RootClass cls) {
    switch (cls) {
        case RootClass::TwoReal: return "TwoReal";
        case RootClass::DoubleRoot: return "DoubleRoot";
        case RootClass::ComplexPair: return "ComplexPair";
    }
    return "?";
}

std::array<std::complex<double>, 3> DispersionAnalysis::roots() const {
    return {std::complex<double>(lambda_plus, 0.0), std::complex<double>(lambda_fast, -imag),
            std::complex<double>(lambda_slow, imag)};
}

DispersionAnalysis dispersion_roots(double c, const ModelParams& params) {
    require_positive(c, "c");
    params.validate();
    const real cc = c;
    const real g = params.gamma;
    const real k = params.k;

    DispersionAnalysis out;
    out.c = c;
    const real lp = positive_root(cc, g, k);
    out.lambda_plus = static_cast<double>(lp);

    // Deflated quadratic lambda^2 + b lambda + q = 0 with b, q > 0.
    const real b = cc + lp;
    const real q = k / (cc * lp);
    const real disc = b * b - 4 * q;
    if (disc >= 0) {
        const real r1 = -(b + std::sqrt(disc)) / 2;  // larger magnitude first
        const real r2 = q / r1;
        out.lambda_fast = static_cast<double>(r1);
        out.lambda_slow = static_cast<double>(r2);
        const bool coincide = std::fabs(r1 - r2) <= kDoubleRootTol * (1 + std::fabs(r2));
        out.cls = coincide ? RootClass::DoubleRoot : RootClass::TwoReal;
    } else {
        const real re = -b / 2;
        const real im = std::sqrt(-disc) / 2;
        out.lambda_fast = out.lambda_slow = static_cast<double>(re);
        out.imag = static_cast<double>(im);
        const bool coincide = 2 * im <= kDoubleRootTol * (1 + std::fabs(re));
        out.cls = coincide ? RootClass::DoubleRoot : RootClass::ComplexPair;
        if (coincide) out.imag = 0.0;
    }
    return out;
}

double c_bar(double lambda, const ModelParams& params) {
    if (!(std::isfinite(lambda) && lambda < 0.0)) {
        std::ostringstream msg;
        msg << "c_bar requires lambda < 0, got " << lambda;
        throw DomainError(msg.str());
    }
    params.validate();
    const real l = lambda;
    const real a = 1 + real(params.gamma) * real(params.k);
    const real t = l - a / l;
    return static_cast<double>(-t / 2 + std::sqrt(t * t / 4 + real(params.k) / (l * l)));
}

LinearSelectionPoint linear_selection_point(const ModelParams& params) {
    params.validate();
    const real a = 1 + real(params.gamma) * real(params.k);
    const real s = std::sqrt(a * a + 3 * real(params.k));
    const real lambda_lin = -std::sqrt((-a + 2 * s) / 3);
    const real c_lin = (a - s) / lambda_lin;
    return {static_cast<double>(c_lin), static_cast<double>(lambda_lin)};
}

double lambda_infinity(const ModelParams& params) {
    params.validate();
    const real g = params.gamma;
    const real cinf = c_infinity(params.gamma);
    return static_cast<double>(cinf * g * (0.5L - std::sqrt(0.25L + real(params.k) * (1 + g))));
}

double lambda_infinity_star(double gamma) {
    require_positive(gamma, "gamma");
    const real g = gamma;
    return static_cast<double>(-std::sqrt((1 + g) / g));
}

const char* to_string(SelectionRegime regime) {
    return regime == SelectionRegime::NonlinearSelection ? "NonlinearSelection" : "Unresolved";
}

SpeedBounds minimal_speed(const ModelParams& params) {
    params.validate();
    const double cinf = c_infinity(params.gamma);
    if (params.k >= k_zero(params.gamma)) {
        return {cinf, cinf, cinf, SelectionRegime::NonlinearSelection};
    }
    const auto lin = linear_selection_point(params);
    return {lin.c_lin, cinf, std::nullopt, SelectionRegime::Unresolved};
}

const char* to_symbol(Ordering ordering) {
    switch (ordering) {
        case Ordering::Above: return ">";
        case Ordering::Equal: return "=";
        case Ordering::Below: return "<";
    }
    return "?";
}

DecayOrdering decay_ordering(const ModelParams& params) {
    params.validate();
    DecayOrdering out{};
    out.lambda_inf = lambda_infinity(params);
    out.lambda_lin = linear_selection_point(params).lambda_lin;
    out.lambda_star = lambda_infinity_star(params.gamma);

    const double k0 = k_zero(params.gamma);
    const double rel = (params.k - k0) / k0;
    out.expected = std::fabs(rel) <= 1e-12 ? Ordering::Equal : (rel < 0 ? Ordering::Above : Ordering::Below);

    const double tol = 1e-10 * (1.0 + std::fabs(out.lambda_star));
    const bool equal = std::fabs(out.lambda_inf - out.lambda_star) <= tol &&
                       std::fabs(out.lambda_lin - out.lambda_star) <= tol;
    const bool above = out.lambda_inf > out.lambda_lin && out.lambda_lin > out.lambda_star;
    const bool below = out.lambda_inf < out.lambda_lin && out.lambda_lin < out.lambda_star;

    std::ostringstream msg;
    msg.precision(17);
    if (equal) {
        out.observed = Ordering::Equal;
        // Differences scale linearly with k - k0; only far-off coincidences are suspicious.
        if (std::fabs(rel) > 1e-6) {
            msg << "lambda values coincide although k=" << params.k << " differs from k0=" << k0;
            out.violation = msg.str();
        }
    } else if (above || below) {
        out.observed = above ? Ordering::Above : Ordering::Below;
        if (out.expected != Ordering::Equal && out.observed != out.expected) {
            msg << "ordering " << to_symbol(out.observed) << " contradicts sign(k-k0) for k=" << params.k;
            out.violation = msg.str();
        }
    } else {
        out.observed = out.expected;
        msg << "no strict ordering chain: lambda_inf=" << out.lambda_inf << " lambda_lin=" << out.lambda_lin
            << " lambda_star=" << out.lambda_star;
        out.violation = msg.str();
    }
    return out;
}

}  // namespace tdw
