#include "tdw/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "tdw/dispersion.hpp"

namespace tdw {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

// The reduced system integrated in s = -x, so the orbit runs from (0,0) towards (1,1).
struct BackwardSystem {
    double a;  // gamma c_inf
    double b;  // k gamma (1+gamma) c_inf
    void operator()(const State& y, State& dyds, double /*s*/) const {
        dyds[0] = a * (y[1] - y[0]);
        dyds[1] = b * y[0] * (1.0 - y[1]);
    }
};

struct Located {
    double s_half;
    double s_end;
};

Located locate(const BackwardSystem& sys, const State& start, const ShootingConfig& cfg) {
    auto stepper = odeint::make_dense_output(cfg.atol, cfg.rtol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(start, 0.0, 1e-4);
    double s_half = -1.0;
    // The adaptive pass only locates the crossing; allow defects at the level of its tolerance.
    const double tol = std::max(cfg.monotone_tol, 100.0 * cfg.rtol);
    State prev = start;
    while (stepper.current_time() < cfg.x_budget) {
        stepper.do_step(sys);
        const State& y = stepper.current_state();
        const double t0 = stepper.previous_time();
        const double t1 = stepper.current_time();
        if (y[0] < prev[0] - tol || y[1] < prev[1] - tol) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "reduced orbit lost monotonicity near x=" << -t1;
            throw MonotonicityError(msg.str());
        }
        if (s_half < 0.0 && y[0] >= 0.5) {
            double lo = t0;
            double hi = t1;
            State tmp;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, tmp);
                (tmp[0] < 0.5 ? lo : hi) = mid;
            }
            s_half = 0.5 * (lo + hi);
        }
        if (y[0] > 1.0 - cfg.tol_left) return {s_half, t1};
        prev = y;
    }
    std::ostringstream msg;
    msg << "reduced orbit did not reach u > 1-" << cfg.tol_left << " within x-budget " << cfg.x_budget;
    throw TruncationError(msg.str());
}

struct Trace {
    std::vector<double> s;
    std::vector<State> y;
};

void rk4_advance(const BackwardSystem& sys, State& y, double& s, double length, int substeps) {
    odeint::runge_kutta4<State> rk;
    const double h = length / substeps;
    for (int i = 0; i < substeps; ++i) {
        rk.do_step(sys, y, s, h);
        s += h;
    }
}

// Fixed-step pass on the nodes s_half + j*dx; fixed steps keep the integration
// error a smooth function of x so finite differences of the output stay accurate.
Trace lay_on_grid(const BackwardSystem& sys, const State& start, double s_half, double s_end, int substeps,
                  const ShootingConfig& cfg) {
    Trace tr;
    const double dx = cfg.dx;
    const auto j_min = static_cast<long>(std::ceil(-s_half / dx));
    double s = 0.0;
    State y = start;
    double first = s_half + static_cast<double>(j_min) * dx;
    if (first <= 0.0) first += dx;
    if (first > 0.0) rk4_advance(sys, y, s, first, substeps);
    s = first;
    for (long j = static_cast<long>(std::llround((first - s_half) / dx));; ++j) {
        tr.s.push_back(s_half + static_cast<double>(j) * dx);
        tr.y.push_back(y);
        if (y[0] > 1.0 - cfg.tol_left && tr.s.back() > s_half) break;
        if (tr.s.back() > std::max(cfg.x_budget, s_end + 1.0)) {
            throw TruncationError("fixed-step pass failed to reach the left truncation point");
        }
        rk4_advance(sys, y, s, dx, substeps);
        s = s_half + static_cast<double>(j + 1) * dx;
    }
    return tr;
}

}  // namespace

ReducedRhs reduced_rhs(double u, double w, const ModelParams& params) {
    const double cinf = c_infinity(params.gamma);
    const double g = params.gamma;
    return {g * cinf * (u - w), -params.k * g * (1.0 + g) * cinf * u * (1.0 - w)};
}

WaveProfile shoot_reduced_wave(const ModelParams& params, const ShootingConfig& cfg) {
    params.validate();
    const double g = params.gamma;
    const double k = params.k;
    const double cinf = c_infinity(g);
    const BackwardSystem sys{g * cinf, k * g * (1.0 + g) * cinf};

    const double r = std::sqrt(0.25 + k * (1.0 + g));
    const double v1 = -0.5 + r;
    const double v2 = k * (1.0 + g);
    const double norm = std::hypot(v1, v2);
    const State start{cfg.delta * v1 / norm, cfg.delta * v2 / norm};

    const Located loc = locate(sys, start, cfg);
    if (loc.s_half < 0.0) throw TruncationError("reduced orbit never crossed u = 1/2");

    // Fastest rate of the system: unstable eigenvalue at (0,0) or the w-rate at (1,1).
    const double stiff = std::max(sys.a * (0.5 + r), sys.b);
    const int substeps = std::max(cfg.min_substeps, static_cast<int>(std::ceil(cfg.dx * stiff / 0.1)));

    double s_half = loc.s_half;
    Trace tr;
    double u_half = 0.0;
    for (int pass = 0; pass < 4; ++pass) {
        tr = lay_on_grid(sys, start, s_half, loc.s_end, substeps, cfg);
        const auto it = std::min_element(tr.s.begin(), tr.s.end(), [&](double a, double b) {
            return std::fabs(a - s_half) < std::fabs(b - s_half);
        });
        const State& yh = tr.y[static_cast<std::size_t>(it - tr.s.begin())];
        u_half = yh[0];
        if (std::fabs(u_half - 0.5) < 1e-14) break;
        s_half += (0.5 - u_half) / (sys.a * (yh[1] - yh[0]));
    }

    WaveProfile p;
    const std::size_t n = tr.s.size();
    p.x.resize(n);
    p.u.resize(n);
    p.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;  // increasing x
        p.x[i] = -std::round((tr.s[j] - s_half) / cfg.dx) * cfg.dx;
        p.u[i] = tr.y[j][0];
        p.w[i] = tr.y[j][1];
        if (p.u[i] > p.w[i] + cfg.monotone_tol) {
            std::ostringstream msg;
            msg << "reduced orbit left the region u < w at x=" << p.x[i];
            throw MonotonicityError(msg.str());
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (p.u[i + 1] > p.u[i] + cfg.monotone_tol || p.w[i + 1] > p.w[i] + cfg.monotone_tol) {
            std::ostringstream msg;
            msg << "reduced orbit not monotone at x=" << p.x[i];
            throw MonotonicityError(msg.str());
        }
    }
    p.c = cinf;
    p.method = ProfileMethod::ReducedShooting;
    p.eps = 0.0;
    p.params = params;
    p.solver_residual = std::fabs(u_half - 0.5);
    return p;
}

}  // namespace tdw
