#include "tdw/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdw/dispersion.hpp"

namespace tdw {
namespace {

// Within this distance of 0 or 1 the true decrement per node can drop below one ulp.
constexpr double kSaturation = 1e-12;
constexpr double kRoundoffStep = 1e-15;

bool saturated(double v) { return v <= kSaturation || v >= 1.0 - kSaturation; }

void check_component(const std::vector<double>& v, const char* name, ProfileValidation& out) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
            out.in_range = false;
            std::ostringstream msg;
            msg << name << "[" << i << "] = " << v[i] << " outside [0,1]";
            out.issues.push_back(msg.str());
            return;
        }
    }
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double step = v[i + 1] - v[i];
        const bool ok = (saturated(v[i]) && saturated(v[i + 1])) ? step <= kRoundoffStep : step < 0.0;
        if (!ok) {
            out.monotone = false;
            std::ostringstream msg;
            msg.precision(17);
            msg << name << " not strictly decreasing at node " << i << ": " << v[i] << " -> " << v[i + 1];
            out.issues.push_back(msg.str());
            return;
        }
    }
}

std::vector<double> component_values(const WaveProfile& p, Component component) {
    std::vector<double> v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        switch (component) {
            case Component::U: v[i] = p.u[i]; break;
            case Component::W: v[i] = p.w[i]; break;
            case Component::OneMinusU: v[i] = 1.0 - p.u[i]; break;
            case Component::OneMinusW: v[i] = 1.0 - p.w[i]; break;
        }
    }
    return v;
}

}  // namespace

const char* to_string(ProfileMethod method) {
    switch (method) {
        case ProfileMethod::ReducedShooting: return "ReducedShooting";
        case ProfileMethod::CollocationBVP: return "CollocationBVP";
        case ProfileMethod::EpsCollocationBVP: return "EpsCollocationBVP";
        case ProfileMethod::StefanLimit: return "StefanLimit";
    }
    return "?";
}

ProfileMethod profile_method_from_string(const std::string& name) {
    if (name == "ReducedShooting") return ProfileMethod::ReducedShooting;
    if (name == "CollocationBVP") return ProfileMethod::CollocationBVP;
    if (name == "EpsCollocationBVP") return ProfileMethod::EpsCollocationBVP;
    if (name == "StefanLimit") return ProfileMethod::StefanLimit;
    throw FileFormatError("unknown profile method '" + name + "'");
}

const char* to_string(Side side) { return side == Side::PlusInfinity ? "+inf" : "-inf"; }

const char* to_string(Component component) {
    switch (component) {
        case Component::U: return "u";
        case Component::W: return "w";
        case Component::OneMinusU: return "1-u";
        case Component::OneMinusW: return "1-w";
    }
    return "?";
}

ProfileValidation validate_profile(const WaveProfile& profile) {
    ProfileValidation out;
    const std::size_t n = profile.size();
    if (n < 3 || profile.u.size() != n || profile.w.size() != n) {
        out.grid_increasing = false;
        out.issues.push_back("profile needs at least 3 nodes and equal-length x,u,w");
        return out;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(profile.x[i + 1] > profile.x[i])) {
            out.grid_increasing = false;
            out.issues.push_back("grid not strictly increasing at node " + std::to_string(i));
            break;
        }
    }
    check_component(profile.u, "u", out);
    check_component(profile.w, "w", out);
    if (!(profile.u.front() > 0.99 && profile.u.back() < 1e-4)) {
        out.tails_adequate = false;
        std::ostringstream msg;
        msg << "truncation inadequate: u(first)=" << profile.u.front() << " u(last)=" << profile.u.back();
        out.issues.push_back(msg.str());
    }
    if (out.grid_increasing) {
        out.u_at_zero = interpolate(profile.x, profile.u, 0.0);
        if (!(std::fabs(out.u_at_zero - 0.5) < 1e-10) || profile.x.front() > 0.0 || profile.x.back() < 0.0) {
            out.normalized = false;
            std::ostringstream msg;
            msg.precision(17);
            msg << "normalization violated: u(0)=" << out.u_at_zero;
            out.issues.push_back(msg.str());
        }
    }
    return out;
}

void require_admissible(const WaveProfile& profile) {
    const auto v = validate_profile(profile);
    if (v.ok()) return;
    std::string msg = "profile not admissible:";
    for (const auto& issue : v.issues) msg += " " + issue + ";";
    throw MonotonicityError(msg);
}

double interpolate(const std::vector<double>& x, const std::vector<double>& f, double at) {
    if (at <= x.front()) return f.front();
    if (at >= x.back()) return f.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double t = (at - x[i]) / (x[i + 1] - x[i]);
    return f[i] + t * (f[i + 1] - f[i]);
}

GridDerivatives grid_derivatives(const std::vector<double>& x, const std::vector<double>& f) {
    const std::size_t n = x.size();
    GridDerivatives d{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    if (n < 3) return d;
    // Divided differences, so constants differentiate to exactly zero.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        const double s = h0 + h1;
        const double d0 = (f[i] - f[i - 1]) / h0;
        const double d1 = (f[i + 1] - f[i]) / h1;
        d.d1[i] = (h1 * d0 + h0 * d1) / s;
        d.d2[i] = 2.0 * (d1 - d0) / s;
    }
    {
        const double h0 = x[1] - x[0];
        const double s = x[2] - x[0];
        const double d0 = (f[1] - f[0]) / h0;
        const double d1 = (f[2] - f[1]) / (x[2] - x[1]);
        d.d1[0] = d0 - h0 * (d1 - d0) / s;
        d.d2[0] = d.d2[1];
    }
    {
        const double h1 = x[n - 1] - x[n - 2];
        const double s = x[n - 1] - x[n - 3];
        const double d0 = (f[n - 2] - f[n - 3]) / (x[n - 2] - x[n - 3]);
        const double d1 = (f[n - 1] - f[n - 2]) / h1;
        d.d1[n - 1] = d1 + h1 * (d1 - d0) / s;
        d.d2[n - 1] = d.d2[n - 2];
    }
    return d;
}

TwResidual full_tw_residual(const WaveProfile& profile) {
    if (profile.size() < 5) throw DomainError("full_tw_residual needs at least 5 nodes");
    const auto du = grid_derivatives(profile.x, profile.u);
    const auto dw = grid_derivatives(profile.x, profile.w);
    const double gk = profile.params.gamma * profile.params.k;
    const double k = profile.params.k;
    const double c = profile.c;
    const double eps = profile.eps;
    TwResidual r{0.0, 0.0};
    for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
        const double u = profile.u[i];
        const double w = profile.w[i];
        const double ru = du.d2[i] + c * du.d1[i] - u + w - gk * u * (1.0 - w);
        const double rw = eps * dw.d2[i] + c * dw.d1[i] + eps * (u - w) + k * u * (1.0 - w);
        r.res_u = std::max(r.res_u, std::fabs(ru));
        r.res_w = std::max(r.res_w, std::fabs(rw));
    }
    return r;
}

DecayFit fit_decay_rate(const WaveProfile& profile, Side side, Component component,
                        const DecayFitOptions& options) {
    const std::size_t n = profile.size();
    const auto values = component_values(profile, component);
    const auto tail = static_cast<std::size_t>(std::ceil(options.tail_fraction * static_cast<double>(n)));
    const std::size_t begin = side == Side::PlusInfinity ? n - std::min(tail, n) : 0;
    const std::size_t end = side == Side::PlusInfinity ? n : std::min(tail, n);

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = begin; i < end; ++i) {
        if (values[i] >= options.value_lo && values[i] <= options.value_hi) {
            xs.push_back(profile.x[i]);
            ys.push_back(std::log(values[i]));
        }
    }
    if (xs.size() < options.min_nodes) {
        std::ostringstream msg;
        msg << "decay window for " << to_string(component) << " at " << to_string(side) << " has " << xs.size()
            << " nodes, need " << options.min_nodes;
        throw WindowTooShort(msg.str());
    }
    const double m = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw WindowTooShort("decay window spans a single abscissa");
    DecayFit fit;
    fit.rate = sxy / sxx;
    fit.intercept = my - fit.rate * mx;
    fit.r_squared = syy > 0.0 ? std::min(1.0, sxy * sxy / (sxx * syy)) : 1.0;
    fit.x_lo = *std::min_element(xs.begin(), xs.end());
    fit.x_hi = *std::max_element(xs.begin(), xs.end());
    fit.nodes = xs.size();
    fit.side = side;
    fit.component = component;
    return fit;
}

AprioriBoundReport check_apriori_bounds(const WaveProfile& profile, double slack) {
    if (profile.size() < 5) throw DomainError("check_apriori_bounds needs at least 5 nodes");
    const auto& p = profile.params;
    const double c = profile.c;
    const auto mn = mu_nu(c, p);
    const double u2_bound = c * mn.mu + 1.0 + p.gamma * p.k;
    const double w_rate = p.k / c;
    const auto du = grid_derivatives(profile.x, profile.u);
    const auto dw = grid_derivatives(profile.x, profile.w);

    AprioriBoundReport r{};
    r.margin_u_mu = r.margin_u_nu = r.margin_u2 = r.margin_w = INFINITY;
    r.slack = slack;
    for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
        const double u = profile.u[i];
        const double w = profile.w[i];
        const double m1 = du.d1[i] + mn.mu * (1.0 - u);
        const double m2 = du.d1[i] + mn.nu * u;
        const double m3 = u2_bound - std::fabs(du.d2[i]);
        const double m4 = dw.d1[i] + w_rate * (1.0 - w);
        if (m1 < r.margin_u_mu) { r.margin_u_mu = m1; r.x_worst_u_mu = profile.x[i]; }
        if (m2 < r.margin_u_nu) { r.margin_u_nu = m2; r.x_worst_u_nu = profile.x[i]; }
        if (m3 < r.margin_u2) { r.margin_u2 = m3; r.x_worst_u2 = profile.x[i]; }
        if (m4 < r.margin_w) { r.margin_w = m4; r.x_worst_w = profile.x[i]; }
    }
    r.u_mu_ok = r.margin_u_mu >= -slack * std::max(1.0, mn.mu);
    r.u_nu_ok = r.margin_u_nu >= -slack * std::max(1.0, mn.nu);
    r.u2_ok = r.margin_u2 >= -slack * std::max(1.0, u2_bound);
    r.w_ok = r.margin_w >= -slack * std::max(1.0, w_rate);
    return r;
}

double mass_identity(const WaveProfile& profile) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
        const double f0 = profile.u[i] * (1.0 - profile.w[i]);
        const double f1 = profile.u[i + 1] * (1.0 - profile.w[i + 1]);
        sum += 0.5 * (profile.x[i + 1] - profile.x[i]) * (f0 + f1);
    }
    return sum;
}

WaveProfile align_half_crossing(WaveProfile profile) {
    for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
        if (profile.u[i] >= 0.5 && profile.u[i + 1] < 0.5) {
            const double t = (profile.u[i] - 0.5) / (profile.u[i] - profile.u[i + 1]);
            const double shift = profile.x[i] + t * (profile.x[i + 1] - profile.x[i]);
            for (auto& xi : profile.x) xi -= shift;
            return profile;
        }
    }
    throw DomainError("profile never crosses u = 1/2");
}

double sup_distance(const WaveProfile& a, const WaveProfile& b) {
    const double lo = std::max(a.x.front(), b.x.front());
    const double hi = std::min(a.x.back(), b.x.back());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.x[i] < lo || a.x[i] > hi) continue;
        d = std::max(d, std::fabs(a.u[i] - interpolate(b.x, b.u, a.x[i])));
        d = std::max(d, std::fabs(a.w[i] - interpolate(b.x, b.w, a.x[i])));
    }
    return d;
}

}  // namespace tdw
