#pragma once

#include "tdw/errors.hpp"

namespace tdw {

/**
 * Parameters of the tissue-degradation system
 *
 *   u_t = u_xx - u + w - gamma*k*u*(1-w)
 *   w_t = eps*(w_xx + u - w) + k*u*(1-w)
 *
 * eps = 0 is the original system; eps > 0 its strictly parabolic regularization.
 * Invariants: gamma > 0, k > 0, 0 <= eps < 1/(2*gamma).
 */
struct ModelParams {
    double gamma{1.0};
    double k{1.0};
    double eps{0.0};

    /// Throws DomainError if the invariants do not hold.
    void validate() const;

    /// Same parameters with eps replaced (validated).
    ModelParams with_eps(double new_eps) const;
};

/// Validated construction.
ModelParams make_params(double gamma, double k, double eps = 0.0);

}  // namespace tdw
