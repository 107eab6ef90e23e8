#include "tdw/volpert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace tdw {
namespace {

struct Window {
    std::vector<bool> rho_ok;
    std::vector<bool> sigma_ok;
    std::size_t rho_count{0};
    std::size_t sigma_count{0};
};

Window select_nodes(const TrialSamples& s, const VolpertOptions& opt) {
    const std::size_t n = s.size();
    double max_r = 0.0;
    double max_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_r = std::max(max_r, std::fabs(s.drho[i]));
        max_s = std::max(max_s, std::fabs(s.dsigma[i]));
    }
    Window win{std::vector<bool>(n, false), std::vector<bool>(n, false)};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double noise = s.noise.empty() ? 0.0 : opt.noise_factor * s.noise[i];
        if (-s.drho[i] > std::max(opt.relative_floor * max_r, noise)) {
            win.rho_ok[i] = true;
            ++win.rho_count;
        }
        if (-s.dsigma[i] > std::max(opt.relative_floor * max_s, noise)) {
            win.sigma_ok[i] = true;
            ++win.sigma_count;
        }
    }
    return win;
}

void check_samples(const TrialSamples& s) {
    const std::size_t n = s.size();
    const bool shapes = s.rho.size() == n && s.drho.size() == n && s.d2rho.size() == n && s.sigma.size() == n &&
                        s.dsigma.size() == n && s.d2sigma.size() == n && (s.noise.empty() || s.noise.size() == n);
    if (!shapes || n < 3) throw DomainError("trial samples need at least 3 nodes and equal-length arrays");
}

}  // namespace

TrialSamples samples_from_profile(const WaveProfile& profile) {
    const std::size_t n = profile.size();
    if (n < 5) throw DomainError("samples_from_profile needs at least 5 nodes");
    const auto du = grid_derivatives(profile.x, profile.u);
    const auto dw = grid_derivatives(profile.x, profile.w);
    TrialSamples s{profile.x, profile.u, du.d1, du.d2, profile.w, dw.d1, dw.d2, std::vector<double>(n, 0.0)};

    // Rounding in the difference quotients scales with the stencil magnitude over h^2.
    const double em = std::numeric_limits<double>::epsilon();
    const double kk = profile.params.k * (1.0 + profile.params.gamma);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = profile.x[i] - profile.x[i - 1];
        const double h1 = profile.x[i + 1] - profile.x[i];
        double m = 0.0;
        for (std::size_t j = i - 1; j <= i + 1; ++j) m = std::max({m, profile.u[j], profile.w[j]});
        s.noise[i] = em * m * (4.0 / (h0 * h1) + 4.0 / std::min(h0, h1) + 2.0 + 2.0 * kk);
    }
    s.noise[0] = s.noise[1];
    s.noise[n - 1] = s.noise[n - 2];
    return s;
}

double GluePolynomial::operator()(double x) const {
    const double x2 = x * x;
    return a + x2 * (b + x2 * (c + x2 * d));
}

GluePolynomial glue_polynomial() {
    // D is free; -4/3 keeps the glue well inside (0, inf) on [-1, 1].
    const double e1 = std::exp(-1.0);
    const double d = -4.0 / 3.0;
    Eigen::Matrix3d m;
    Eigen::Vector3d rhs;
    m << 1.0, 1.0, 1.0,               // g(1) = 1/e
        0.0, 2.0, 4.0,                // g'(1) = -1/e
        2.0, 2.0 / 3.0, 2.0 / 5.0;    // int_{-1}^{1} g = 1 - 2/e
    rhs << e1 - d, -e1 - 6.0 * d, 1.0 - 2.0 * e1 - 2.0 * d / 7.0;
    const Eigen::Vector3d abc = m.fullPivLu().solve(rhs);
    return {abc(0), abc(1), abc(2), d};
}

TrialSamples glued_exponential_trial_pair(const std::vector<double>& x) {
    const GluePolynomial g = glue_polynomial();
    const double e1 = std::exp(-1.0);
    TrialSamples s;
    s.x = x;
    const std::size_t n = x.size();
    s.rho.resize(n);
    s.drho.resize(n);
    s.d2rho.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        if (xi >= 1.0) {
            const double e = std::exp(-xi);
            s.rho[i] = e;
            s.drho[i] = -e;
            s.d2rho[i] = e;
        } else if (xi <= -1.0) {
            const double e = std::exp(xi);
            s.rho[i] = 1.0 - e;
            s.drho[i] = -e;
            s.d2rho[i] = -e;
        } else {
            // rho(x) = (1 - 1/e) - int_{-1}^{x} g
            const auto prim = [&](double t) {
                const double t2 = t * t;
                return t * (g.a + t2 * (g.b / 3.0 + t2 * (g.c / 5.0 + t2 * g.d / 7.0)));
            };
            s.rho[i] = (1.0 - e1) - (prim(xi) - prim(-1.0));
            s.drho[i] = -g(xi);
            s.d2rho[i] = -xi * (2.0 * g.b + xi * xi * (4.0 * g.c + 6.0 * g.d * xi * xi));
        }
    }
    s.sigma = s.rho;
    s.dsigma = s.drho;
    s.d2sigma = s.d2rho;
    return s;
}

VolpertReport volpert_functionals(const TrialSamples& s, double eps, const ModelParams& params,
                                  const VolpertOptions& options) {
    params.with_eps(eps);
    check_samples(s);
    const Window win = select_nodes(s, options);
    if (win.rho_count == 0 || win.sigma_count == 0) {
        std::ostringstream msg;
        msg << "no node passes the derivative floor (" << win.rho_count << " for rho, " << win.sigma_count
            << " for sigma)";
        throw DerivativeFloorError(msg.str());
    }
    const double gk = params.gamma * params.k;
    VolpertReport r;
    r.eps = eps;
    r.phi1_max = -INFINITY;
    r.phi2_max = -INFINITY;
    r.nodes_phi1 = win.rho_count;
    r.nodes_phi2 = win.sigma_count;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double rho = s.rho[i];
        const double sig = s.sigma[i];
        if (win.rho_ok[i]) {
            const double v = (s.d2rho[i] - rho + sig - gk * rho * (1.0 - sig)) / (-s.drho[i]);
            if (v > r.phi1_max) {
                r.phi1_max = v;
                r.x_phi1 = s.x[i];
            }
        }
        if (win.sigma_ok[i]) {
            const double v = (eps * s.d2sigma[i] + eps * (rho - sig) + params.k * rho * (1.0 - sig)) / (-s.dsigma[i]);
            if (v > r.phi2_max) {
                r.phi2_max = v;
                r.x_phi2 = s.x[i];
            }
        }
    }
    r.speed_bound = std::max(r.phi1_max, r.phi2_max);
    return r;
}

VolpertReport volpert_functionals(const WaveProfile& profile, double eps, const ModelParams& params,
                                  const VolpertOptions& options) {
    return volpert_functionals(samples_from_profile(profile), eps, params, options);
}

double phi2_eps_coefficient(const TrialSamples& s, const ModelParams& params, const VolpertOptions& options) {
    params.validate();
    check_samples(s);
    const Window win = select_nodes(s, options);
    if (win.sigma_count == 0) throw DerivativeFloorError("no node passes the derivative floor for sigma");
    double best = -INFINITY;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!win.sigma_ok[i]) continue;
        best = std::max(best, (s.d2sigma[i] + s.rho[i] - s.sigma[i]) / (-s.dsigma[i]));
    }
    return best;
}

}  // namespace tdw
