#include "tdw/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>

#include "tdw/profile_io.hpp"

namespace tdw {
namespace {

constexpr double kRangeTolerance = 1e-6;
constexpr double kFlush = 1e-250;
// Rounding overshoot accepted (and clamped) in initial data, e.g. a previous run's final state.
constexpr double kInitSlack = 1e-12;

// Stored wave off its grid: the end decay rate is continued, so u, w -> 0 on the
// right and 1 - u, 1 - w -> 0 on the left, as the far-field states require.
double extend_profile(const std::vector<double>& x, const std::vector<double>& f, double at) {
    const std::size_t n = x.size();
    if (n < 2 || (at >= x.front() && at <= x.back())) return interpolate(x, f, at);
    if (at > x.back()) {
        const double a = f[n - 2];
        const double b = f[n - 1];
        if (!(b > 0.0 && a > b)) return 0.0;
        return b * std::exp(std::log(b / a) / (x[n - 1] - x[n - 2]) * (at - x[n - 1]));
    }
    const double a = 1.0 - f[1];
    const double b = 1.0 - f[0];
    if (!(b > 0.0 && a > b)) return 1.0;
    return 1.0 - b * std::exp(std::log(b / a) / (x[1] - x[0]) * (x[0] - at));
}

// ((1 + shift) I - a D2) on interior nodes 1..n-2 with Dirichlet end values;
// the elimination coefficients are computed once.
// Monotone, and keeps the far field out of subnormal arithmetic.
inline double flush(double v) { return std::abs(v) < kFlush ? 0.0 : v; }

class ImplicitDiffusion {
public:
    ImplicitDiffusion(std::size_t n, double a_over_dx2, double shift = 0.0)
        : n_(n), off_(-a_over_dx2), cp_(n, 0.0), inv_(n, 0.0) {
        const double diag = 1.0 + shift + 2.0 * a_over_dx2;
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            const double denom = diag - (i > 1 ? off_ * cp_[i - 1] : 0.0);
            inv_[i] = 1.0 / denom;
            cp_[i] = off_ * inv_[i];
        }
    }

    // rhs holds the right-hand side at interior nodes and the boundary values at the ends.
    void solve(std::vector<double>& v) const {
        const double left = v[0];
        const double right = v[n_ - 1];
        v[1] -= off_ * left;
        v[n_ - 2] -= off_ * right;
        v[1] *= inv_[1];
        for (std::size_t i = 2; i + 1 < n_; ++i) v[i] = flush((v[i] - off_ * v[i - 1]) * inv_[i]);
        for (std::size_t i = n_ - 2; i-- > 1;) v[i] = flush(v[i] - cp_[i] * v[i + 1]);
    }

private:
    std::size_t n_;
    double off_;
    std::vector<double> cp_;
    std::vector<double> inv_;
};

void set_boundaries(std::vector<double>& u, std::vector<double>& w) {
    u.front() = 1.0;
    w.front() = 1.0;
    u.back() = 0.0;
    w.back() = 0.0;
}

void laplacian(const std::vector<double>& v, double inv_dx2, std::vector<double>& out) {
    const std::size_t n = v.size();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_dx2;
}

class Stepper {
public:
    Stepper(const ModelParams& p, const SimConfig& cfg, std::size_t n)
        : p_(p), cfg_(cfg), n_(n), u_diff_(n, cfg.dt / (cfg.dx * cfg.dx)),
          w_diff_(n, cfg.dt * p.eps / (cfg.dx * cfg.dx), cfg.dt * p.eps), a_(n), b_(n), c_(n), d_(n), e_(n), f_(n) {}

    void step(std::vector<double>& u, std::vector<double>& w) {
        if (cfg_.scheme == Scheme::IMEX) imex(u, w); else heun(u, w);
        set_boundaries(u, w);
    }

private:
    // Exact flows of the two reaction subsystems: w with u frozen, then u with w frozen.
    void react(std::vector<double>& u, std::vector<double>& w, double h) const {
        const double k = p_.k;
        const double gk = p_.gamma * p_.k;
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            double wi = 1.0 - (1.0 - w[i]) * std::exp(-0.5 * h * k * u[i]);
            const double a = 1.0 + gk * (1.0 - wi);
            const double e = std::exp(-a * h);
            const double ui = u[i] * e + (wi / a) * (1.0 - e);
            wi = 1.0 - (1.0 - wi) * std::exp(-0.5 * h * k * ui);
            u[i] = flush(ui);
            w[i] = flush(wi);
        }
    }

    void imex(std::vector<double>& u, std::vector<double>& w) {
        const double dt = cfg_.dt;
        const double eps = p_.eps;
        react(u, w, 0.5 * dt);
        if (eps > 0.0) {
            for (std::size_t i = 1; i + 1 < n_; ++i) w[i] += dt * eps * u[i];
            w.front() = 1.0;
            w.back() = 0.0;
            w_diff_.solve(w);
        }
        u.front() = 1.0;
        u.back() = 0.0;
        u_diff_.solve(u);
        react(u, w, 0.5 * dt);
    }

    void rates(const std::vector<double>& u, const std::vector<double>& w, std::vector<double>& du,
               std::vector<double>& dw) {
        const double inv_dx2 = 1.0 / (cfg_.dx * cfg_.dx);
        const double gk = p_.gamma * p_.k;
        laplacian(u, inv_dx2, du);
        if (p_.eps > 0.0) laplacian(w, inv_dx2, dw);
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            const double r = u[i] * (1.0 - w[i]);
            du[i] += -u[i] + w[i] - gk * r;
            const double diff = p_.eps > 0.0 ? p_.eps * (dw[i] + u[i] - w[i]) : 0.0;
            dw[i] = p_.k * r + diff;
        }
        du[0] = du[n_ - 1] = dw[0] = dw[n_ - 1] = 0.0;
    }

    void heun(std::vector<double>& u, std::vector<double>& w) {
        const double dt = cfg_.dt;
        rates(u, w, a_, b_);
        for (std::size_t i = 0; i < n_; ++i) {
            c_[i] = u[i] + dt * a_[i];
            d_[i] = w[i] + dt * b_[i];
        }
        rates(c_, d_, e_, f_);
        for (std::size_t i = 0; i < n_; ++i) {
            u[i] += 0.5 * dt * (a_[i] + e_[i]);
            w[i] += 0.5 * dt * (b_[i] + f_[i]);
        }
    }

    ModelParams p_;
    SimConfig cfg_;
    std::size_t n_;
    ImplicitDiffusion u_diff_;
    ImplicitDiffusion w_diff_;
    std::vector<double> a_, b_, c_, d_, e_, f_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

const char* to_string(Scheme scheme) { return scheme == Scheme::IMEX ? "IMEX" : "ExplicitRK2"; }

Scheme scheme_from_string(const std::string& name) {
    if (name == "IMEX" || name == "imex") return Scheme::IMEX;
    if (name == "ExplicitRK2" || name == "rk2" || name == "explicit") return Scheme::ExplicitRK2;
    throw ConfigError("unknown scheme '" + name + "'");
}

std::size_t SimConfig::nodes() const { return static_cast<std::size_t>(std::llround(domain_length / dx)) + 1; }

void SimConfig::validate(const ModelParams& params) const {
    try {
        params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(finite_pos(domain_length), "domain_length must be positive");
    require(finite_pos(dx), "dx must be positive");
    require(finite_pos(dt), "dt must be positive");
    require(finite_pos(t_end), "t_end must be positive");
    require(std::isfinite(x_min), "x_min must be finite");
    require(finite_pos(record_interval), "record_interval must be positive");
    require(std::isfinite(snapshot_interval) && snapshot_interval >= 0.0, "snapshot_interval must be >= 0");
    require(nodes() >= 5, "domain_length/dx gives fewer than 5 nodes");
    require(recenter_target > 0.0 && recenter_target < recenter_trigger && recenter_trigger < 1.0,
            "need 0 < recenter_target < recenter_trigger < 1");
    std::ostringstream msg;
    msg.precision(10);
    if (scheme == Scheme::ExplicitRK2) {
        const double bound = 0.4 * dx * dx;
        if (dt > bound) {
            msg << "ExplicitRK2 needs dt <= 0.4 dx^2 = " << bound << ", got dt=" << dt;
            throw ConfigError(msg.str());
        }
    } else {
        const double bound = 0.5 / (1.0 + params.gamma * params.k);
        if (dt > bound) {
            msg << "IMEX needs dt <= 0.5/(1+gamma k) = " << bound << ", got dt=" << dt;
            throw ConfigError(msg.str());
        }
    }
}

Grid Grid::from_config(const SimConfig& config) { return {config.x_min, config.dx, config.nodes()}; }

const char* to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::Step: return "Step";
        case InitialKind::ExpDecay: return "ExpDecay";
        case InitialKind::ProfileFile: return "ProfileFile";
    }
    return "?";
}

InitialKind initial_kind_from_string(const std::string& name) {
    if (name == "Step" || name == "step") return InitialKind::Step;
    if (name == "ExpDecay" || name == "expdecay" || name == "exp") return InitialKind::ExpDecay;
    if (name == "ProfileFile" || name == "profile") return InitialKind::ProfileFile;
    throw ConfigError("unknown initial condition '" + name + "'");
}

InitialCondition initial_condition(const InitialSpec& spec, const Grid& grid) {
    InitialCondition ic;
    ic.kind = spec.kind;
    ic.u.resize(grid.n);
    ic.w.resize(grid.n);
    switch (spec.kind) {
        case InitialKind::Step:
            for (std::size_t i = 0; i < grid.n; ++i) ic.u[i] = ic.w[i] = grid.x(i) < spec.x0 ? 1.0 : 0.0;
            break;
        case InitialKind::ExpDecay:
            if (!(std::isfinite(spec.rate) && spec.rate > 0.0)) throw ConfigError("ExpDecay needs rate > 0");
            for (std::size_t i = 0; i < grid.n; ++i)
                ic.u[i] = ic.w[i] = std::min(1.0, std::exp(-spec.rate * (grid.x(i) - spec.x0)));
            break;
        case InitialKind::ProfileFile: {
            const WaveProfile p = load_profile(spec.path);
            for (std::size_t i = 0; i < grid.n; ++i) {
                const double at = grid.x(i) - spec.x0;
                ic.u[i] = extend_profile(p.x, p.u, at);
                ic.w[i] = extend_profile(p.x, p.w, at);
            }
            break;
        }
    }
    return ic;
}

std::optional<double> front_position(const Grid& grid, const std::vector<double>& u) {
    for (std::size_t i = u.size() - 1; i-- > 0;) {
        if (u[i] >= 0.5 && u[i + 1] < 0.5) {
            const double t = (u[i] - 0.5) / (u[i] - u[i + 1]);
            return grid.x(i) + t * grid.dx;
        }
    }
    return std::nullopt;
}

SimResult simulate(const ModelParams& params, const SimConfig& config, const InitialCondition& init,
                   const std::optional<SnapshotSink>& snapshots) {
    config.validate(params);
    SimResult res;
    SimState& s = res.final_state;
    s.grid = Grid::from_config(config);
    const std::size_t n = s.grid.n;
    if (init.u.size() != n || init.w.size() != n) {
        std::ostringstream msg;
        msg << "initial condition has " << init.u.size() << " nodes, grid has " << n;
        throw ConfigError(msg.str());
    }
    const auto admissible = [](double v) { return v >= -kInitSlack && v <= 1.0 + kInitSlack; };
    for (std::size_t i = 0; i < n; ++i) {
        if (!(admissible(init.u[i]) && admissible(init.w[i])))
            throw ConfigError("initial condition leaves [0,1] at node " + std::to_string(i));
    }
    s.u = init.u;
    s.w = init.w;
    for (std::size_t i = 0; i < n; ++i) {
        s.u[i] = std::clamp(s.u[i], 0.0, 1.0);
        s.w[i] = std::clamp(s.w[i], 0.0, 1.0);
    }
    set_boundaries(s.u, s.w);

    Stepper stepper(params, config, n);
    const auto steps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
    const auto record_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.record_interval / config.dt)));
    const std::size_t snap_every = config.snapshot_interval > 0.0
        ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.snapshot_interval / config.dt)))
        : 0;
    auto& diag = res.diagnostics;

    const auto record = [&](std::size_t step) {
        if (const auto x = front_position(s.grid, s.u)) {
            res.trace.times.push_back(s.t);
            res.trace.positions.push_back(*x);
            if (config.moving_window && *x > s.grid.x_min + config.recenter_trigger * config.domain_length) {
                const double target = s.grid.x_min + config.recenter_target * config.domain_length;
                const long shift = std::lround((*x - target) / config.dx);
                if (shift > 0) {
                    const auto sh = static_cast<std::size_t>(shift);
                    std::copy(s.u.begin() + static_cast<long>(sh), s.u.end(), s.u.begin());
                    std::copy(s.w.begin() + static_cast<long>(sh), s.w.end(), s.w.begin());
                    std::fill(s.u.end() - static_cast<long>(sh), s.u.end(), 0.0);
                    std::fill(s.w.end() - static_cast<long>(sh), s.w.end(), 0.0);
                    set_boundaries(s.u, s.w);
                    s.grid.x_min += static_cast<double>(shift) * config.dx;
                    res.trace.recenters.push_back({s.t, shift, s.grid.x_min});
                }
            }
        }
        if (snapshots && snap_every > 0 && step % snap_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "frame_%06zu.csv", diag.snapshots);
            write_snapshot_csv(s, snapshots->directory / name);
            ++diag.snapshots;
        }
    };

    record(0);
    for (std::size_t step = 1; step <= steps; ++step) {
        stepper.step(s.u, s.w);
        s.t = static_cast<double>(step) * config.dt;
        double lo = 1.0;
        double hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min({lo, s.u[i], s.w[i]});
            hi = std::max({hi, s.u[i], s.w[i]});
        }
        diag.min_value = std::min(diag.min_value, lo);
        diag.max_value = std::max(diag.max_value, hi);
        if (!(std::isfinite(lo) && std::isfinite(hi)) || lo < -kRangeTolerance || hi > 1.0 + kRangeTolerance) {
            std::ostringstream msg;
            msg << "solution left [0,1] at t=" << s.t << " (min " << lo << ", max " << hi << ")";
            throw StabilityViolation(msg.str());
        }
        diag.steps = step;
        if (step % record_every == 0 || (snap_every > 0 && step % snap_every == 0) || step == steps) record(step);
    }
    return res;
}

SpeedEstimate estimate_front_speed(const FrontTrace& trace, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction <= 0.7)) {
        throw DomainError("window_fraction must lie in (0, 0.7] so the first 30% of the run is excluded");
    }
    if (trace.times.size() != trace.positions.size()) throw DomainError("trace times and positions differ in length");
    if (trace.times.size() < 2) throw WindowTooShort("trace has fewer than 2 samples");
    const double t0 = trace.times.front();
    const double t1 = trace.times.back();
    const double t_lo = t1 - window_fraction * (t1 - t0);
    std::vector<double> ts;
    std::vector<double> xs;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        if (trace.times[i] >= t_lo) {
            ts.push_back(trace.times[i]);
            xs.push_back(trace.positions[i]);
        }
    }
    if (ts.size() < 10) {
        std::ostringstream msg;
        msg << "speed window holds " << ts.size() << " samples, need 10";
        throw WindowTooShort(msg.str());
    }
    const double m = static_cast<double>(ts.size());
    double mt = 0.0;
    double mx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        mx += xs[i];
    }
    mt /= m;
    mx /= m;
    double stt = 0.0;
    double stx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        stx += (ts[i] - mt) * (xs[i] - mx);
    }
    if (!(stt > 0.0)) throw WindowTooShort("speed window spans a single time");
    SpeedEstimate est;
    est.value = stx / stt;
    double ssr = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = xs[i] - mx - est.value * (ts[i] - mt);
        ssr += r * r;
    }
    est.std_error = std::sqrt(std::max(0.0, ssr / (m - 2.0) / stt));
    est.t_lo = ts.front();
    est.t_hi = ts.back();
    est.samples = ts.size();

    const double half = 0.5 * (est.t_hi - est.t_lo);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(ts.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double tau = (ts[i] - mt) / half;
        A(static_cast<Eigen::Index>(i), 0) = 1.0;
        A(static_cast<Eigen::Index>(i), 1) = tau;
        A(static_cast<Eigen::Index>(i), 2) = tau * tau;
        b(static_cast<Eigen::Index>(i)) = xs[i] - mx;
    }
    const Eigen::Vector3d q = A.colPivHouseholderQr().solve(b);
    // d/dt of a2 tau^2 is 2 a2 tau / half; the change over tau in [-1, 1] is 4 a2 / half.
    est.drift = 4.0 * q(2) / half;
    return est;
}

RadialResidualReport radial_supersolution_residual(const WaveProfile& profile, int n, double r_offset,
                                                   double shift) {
    if (n < 1) throw DomainError("dimension n must be >= 1");
    if (!(std::isfinite(r_offset) && r_offset > 0.0)) throw DomainError("r_offset must be positive");
    if (profile.size() < 3) throw DomainError("profile needs at least 3 nodes");
    const auto d = grid_derivatives(profile.x, profile.u);
    RadialResidualReport rep;
    rep.n = n;
    rep.min_residual = INFINITY;
    rep.max_residual = -INFINITY;
    const double factor = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double r = profile.x[i] + r_offset + shift;
        if (r < r_offset) continue;
        const double res = factor == 0.0 ? 0.0 : -(factor / r) * d.d1[i];
        rep.r.push_back(r);
        rep.residual.push_back(res);
        rep.min_residual = std::min(rep.min_residual, res);
        rep.max_residual = std::max(rep.max_residual, res);
        if (res < -1e-10) ++rep.negative;
    }
    if (rep.r.empty()) throw DomainError("no profile node maps to |x| >= r_offset");
    return rep;
}

void write_trace_csv(const FrontTrace& trace, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw FileFormatError("cannot open " + path.string() + " for writing");
    std::fputs("t,x_front\n", f);
    for (std::size_t i = 0; i < trace.times.size(); ++i) std::fprintf(f, "%.17g,%.17g\n", trace.times[i], trace.positions[i]);
    if (std::fclose(f) != 0) throw FileFormatError("write failed for " + path.string());
}

void write_snapshot_csv(const SimState& state, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw FileFormatError("cannot open " + path.string() + " for writing");
    std::fputs("x,u,w\n", f);
    for (std::size_t i = 0; i < state.grid.n; ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", state.grid.x(i), state.u[i], state.w[i]);
    if (std::fclose(f) != 0) throw FileFormatError("write failed for " + path.string());
}

}  // namespace tdw
