#include "tdw/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "tdw/dispersion.hpp"
#include "tdw/shooting.hpp"

namespace tdw {
namespace {

// Mass-form first-order system M y' = F(y) with y = (u, u', w) or (u, u', w, w').
struct WaveSystem {
    double c;
    double gk;
    double k;
    double eps;
    int n;

    double mass(int j) const { return (n == 4 && j == 3) ? eps : 1.0; }

    void rhs(const double* y, double* f) const {
        const double u = y[0];
        const double p = y[1];
        const double w = y[2];
        f[0] = p;
        f[1] = -c * p + u - w + gk * u * (1.0 - w);
        if (n == 3) {
            f[2] = -(k / c) * u * (1.0 - w);
        } else {
            const double q = y[3];
            f[2] = q;
            f[3] = -c * q - eps * (u - w) - k * u * (1.0 - w);
        }
    }

    // Row-major n x n Jacobian of F.
    void jac(const double* y, double* J) const {
        const double u = y[0];
        const double w = y[2];
        std::fill(J, J + n * n, 0.0);
        J[0 * n + 1] = 1.0;
        J[1 * n + 0] = 1.0 + gk * (1.0 - w);
        J[1 * n + 1] = -c;
        J[1 * n + 2] = -1.0 - gk * u;
        if (n == 3) {
            J[2 * n + 0] = -(k / c) * (1.0 - w);
            J[2 * n + 2] = (k / c) * u;
        } else {
            J[2 * n + 3] = 1.0;
            J[3 * n + 0] = -eps - k * (1.0 - w);
            J[3 * n + 2] = eps + k * u;
            J[3 * n + 3] = -c;
        }
    }

    std::vector<double> left_state() const {
        std::vector<double> y(static_cast<std::size_t>(n), 0.0);
        y[0] = 1.0;
        y[2] = 1.0;
        return y;
    }
};

// Rows l^T (y - y_eq) = 0 removing the modes of M^{-1} F_y at y_eq that must
// not be present: decaying ones at the left end, growing ones at the right end.
Eigen::MatrixXd projection_rows(const WaveSystem& sys, const std::vector<double>& y_eq, bool left_end) {
    const int n = sys.n;
    std::vector<double> jraw(static_cast<std::size_t>(n * n));
    sys.jac(y_eq.data(), jraw.data());
    Eigen::MatrixXd J(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) J(i, j) = jraw[static_cast<std::size_t>(i * n + j)] / sys.mass(i);

    Eigen::EigenSolver<Eigen::MatrixXd> es(J.transpose());
    const auto vals = es.eigenvalues();
    const auto vecs = es.eigenvectors();
    std::vector<Eigen::VectorXd> rows;
    for (int m = 0; m < n; ++m) {
        const double re = vals(m).real();
        const bool excluded = left_end ? re < 0.0 : re > 0.0;
        if (!excluded) continue;
        const double im = vals(m).imag();
        if (im < 0.0) continue;  // conjugate partner handled with the im > 0 member
        Eigen::VectorXd r = vecs.col(m).real();
        rows.push_back(r / r.norm());
        if (im > 0.0) {
            Eigen::VectorXd s = vecs.col(m).imag();
            rows.push_back(s / s.norm());
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
}

using Sampler = std::function<void(double, double*)>;

struct Mesh {
    std::vector<double> x;
    std::size_t zero_node{0};
};

// Monitor density theta^{1/3} with theta = sum_j |y_j'''| / s_j, y' taken from the
// ODE and differentiated twice by divided differences on the sample grid. s_j is
// the distance of y_j to the nearer end state, floored at 1e-8 of its range, so
// the tails are resolved in relative terms down to that level.
std::vector<double> curvature_density(const WaveSystem& sys, const std::vector<double>& xs,
                                      const std::vector<double>& ys) {
    const int n = sys.n;
    const auto nn = static_cast<std::size_t>(n);
    const std::size_t m = xs.size();
    const auto y_left = sys.left_state();
    std::vector<double> d1(m * nn);
    std::vector<double> range(nn, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        sys.rhs(&ys[i * nn], &d1[i * nn]);
        for (std::size_t j = 0; j < nn; ++j) {
            d1[i * nn + j] /= sys.mass(static_cast<int>(j));
            range[j] = std::max(range[j], std::fabs(ys[i * nn + j]));
        }
    }
    std::vector<double> rho(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double h0 = xs[i] - xs[i - 1];
        const double h1 = xs[i + 1] - xs[i];
        double theta = 0.0;
        for (std::size_t j = 0; j < nn; ++j) {
            const auto at = [&](std::size_t node) { return d1[node * nn + j]; };
            const double dd = 2.0 * ((at(i + 1) - at(i)) / h1 - (at(i) - at(i - 1)) / h0) / (h0 + h1);
            const double v = ys[i * nn + j];
            const double dev = std::min(std::fabs(v - y_left[j]), std::fabs(v));
            theta += std::fabs(dd) / std::max(dev, 1e-8 * std::max(range[j], 1e-300));
        }
        rho[i] = std::cbrt(theta);
    }
    rho[0] = rho[1];
    rho[m - 1] = rho[m - 2];
    for (int pass = 0; pass < 8; ++pass) {
        std::vector<double> s(rho);
        for (std::size_t i = 1; i + 1 < m; ++i) s[i] = 0.25 * rho[i - 1] + 0.5 * rho[i] + 0.25 * rho[i + 1];
        rho.swap(s);
    }
    return rho;
}

// Equidistributes (1-share)/|domain| + share * rho/int(rho) over the sample grid.
// The node count on each side of x = 0 is split in proportion to the measure so
// that x = 0 is a node without a local jump in spacing.
Mesh equidistribute(const std::vector<double>& xs, const std::vector<double>& rho, std::size_t intervals,
                    double share) {
    const std::size_t m = xs.size();
    double total_rho = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) total_rho += 0.5 * (rho[i] + rho[i + 1]) * (xs[i + 1] - xs[i]);
    const double width = xs.back() - xs.front();
    if (!(total_rho > 0.0)) share = 0.0;
    std::vector<double> cum(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double h = xs[i + 1] - xs[i];
        const double adapt = share > 0.0 ? share * 0.5 * (rho[i] + rho[i + 1]) * h / total_rho : 0.0;
        cum[i + 1] = cum[i] + (1.0 - share) * h / width + adapt;
    }
    const auto invert = [&](double level) {
        const auto it = std::lower_bound(cum.begin(), cum.end(), level);
        if (it == cum.begin()) return xs.front();
        if (it == cum.end()) return xs.back();
        const std::size_t seg = static_cast<std::size_t>(it - cum.begin()) - 1;
        const double span = cum[seg + 1] - cum[seg];
        const double t = span > 0.0 ? std::clamp((level - cum[seg]) / span, 0.0, 1.0) : 0.0;
        return xs[seg] + t * (xs[seg + 1] - xs[seg]);
    };
    double c0 = 0.0;
    {
        const auto it = std::upper_bound(xs.begin(), xs.end(), 0.0);
        const std::size_t seg = std::min(static_cast<std::size_t>(it - xs.begin()), m - 1) - 1;
        const double t = (0.0 - xs[seg]) / (xs[seg + 1] - xs[seg]);
        c0 = cum[seg] + t * (cum[seg + 1] - cum[seg]);
    }
    const double total = cum.back();
    auto left = static_cast<std::size_t>(std::llround(static_cast<double>(intervals) * c0 / total));
    left = std::clamp<std::size_t>(left, 1, intervals - 1);
    Mesh mesh;
    mesh.x.resize(intervals + 1);
    for (std::size_t i = 0; i <= left; ++i) mesh.x[i] = invert(c0 * static_cast<double>(i) / static_cast<double>(left));
    for (std::size_t i = left; i <= intervals; ++i) {
        const double t = static_cast<double>(i - left) / static_cast<double>(intervals - left);
        mesh.x[i] = invert(c0 + t * (total - c0));
    }
    mesh.x.front() = xs.front();
    mesh.x.back() = xs.back();
    mesh.x[left] = 0.0;
    mesh.zero_node = left;
    return mesh;
}

std::vector<double> sample(const Sampler& f, const std::vector<double>& xs, int n) {
    std::vector<double> ys(xs.size() * static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < xs.size(); ++i) f(xs[i], &ys[i * static_cast<std::size_t>(n)]);
    return ys;
}

// Piecewise-linear interpolant of nodal states; clamped outside the grid.
Sampler nodal_sampler(std::vector<double> x, std::vector<double> y, int n) {
    return [x = std::move(x), y = std::move(y), n](double at, double* out) {
        const auto nn = static_cast<std::size_t>(n);
        if (at <= x.front()) {
            std::copy(y.begin(), y.begin() + n, out);
            return;
        }
        if (at >= x.back()) {
            std::copy(y.end() - n, y.end(), out);
            return;
        }
        const auto it = std::upper_bound(x.begin(), x.end(), at);
        const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
        const double t = (at - x[i]) / (x[i + 1] - x[i]);
        for (std::size_t j = 0; j < nn; ++j) out[j] = y[i * nn + j] + t * (y[(i + 1) * nn + j] - y[i * nn + j]);
    };
}

// Guess sampler built from a stored profile, extended past its grid with
// exponential tails: rate_right for (u, w) at +inf, rate_left for (1-u, 1-w) at -inf.
Sampler profile_sampler(const WaveProfile& g, int n, double rate_right, double rate_left) {
    const auto du = grid_derivatives(g.x, g.u);
    const auto dw = grid_derivatives(g.x, g.w);
    const std::size_t m = g.size();
    std::vector<double> y(m * static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < m; ++i) {
        double* yi = &y[i * static_cast<std::size_t>(n)];
        yi[0] = g.u[i];
        yi[1] = du.d1[i];
        yi[2] = g.w[i];
        if (n == 4) yi[3] = dw.d1[i];
    }
    auto inner = nodal_sampler(g.x, y, n);
    const double x_lo = g.x.front();
    const double x_hi = g.x.back();
    const WaveProfile tails{{}, {g.u.front(), g.u.back()}, {g.w.front(), g.w.back()}};
    return [inner, x_lo, x_hi, tails, n, rate_right, rate_left](double at, double* out) {
        if (at > x_hi) {
            const double e = std::exp(rate_right * (at - x_hi));
            out[0] = tails.u[1] * e;
            out[1] = rate_right * out[0];
            out[2] = tails.w[1] * e;
            if (n == 4) out[3] = rate_right * out[2];
        } else if (at < x_lo) {
            const double e = std::exp(rate_left * (at - x_lo));
            out[0] = 1.0 - (1.0 - tails.u[0]) * e;
            out[1] = rate_left * (1.0 - tails.u[0]) * e;
            out[2] = 1.0 - (1.0 - tails.w[0]) * e;
            if (n == 4) out[3] = rate_left * (1.0 - tails.w[0]) * e;
        } else {
            inner(at, out);
        }
    };
}

struct Solution {
    Mesh mesh;
    std::vector<double> y;
    double residual{};
};

Mesh adapted_mesh(const WaveSystem& sys, const Sampler& f, double L, const BvpConfig& cfg,
                  const std::vector<double>* grid_hint) {
    std::vector<double> xs;
    if (grid_hint) {
        xs = *grid_hint;
    } else {
        const std::size_t m = 4 * cfg.intervals;
        xs.resize(m + 1);
        for (std::size_t i = 0; i <= m; ++i) xs[i] = -L + 2.0 * L * static_cast<double>(i) / static_cast<double>(m);
    }
    const auto ys = sample(f, xs, sys.n);
    const auto rho = curvature_density(sys, xs, ys);
    return equidistribute(xs, rho, cfg.intervals, cfg.monitor_share);
}

Solution newton(const WaveSystem& sys, Mesh mesh, std::vector<double> y, const BvpConfig& cfg) {
    const int n = sys.n;
    const auto nn = static_cast<std::size_t>(n);
    const std::size_t N = mesh.x.size() - 1;
    const std::size_t dim = nn * (N + 1);

    const auto y_left = sys.left_state();
    const std::vector<double> y_right(nn, 0.0);
    const Eigen::MatrixXd bl = projection_rows(sys, y_left, true);
    const Eigen::MatrixXd br = projection_rows(sys, y_right, false);
    const auto nl = static_cast<std::size_t>(bl.rows());
    const auto nr = static_cast<std::size_t>(br.rows());
    if (nl + nr + 1 != nn) {
        std::ostringstream msg;
        msg << "boundary mode count mismatch: " << nl << " left + " << nr << " right rows for dimension " << n;
        throw NoConvergence(msg.str(), INFINITY);
    }

    std::vector<double> fa(nn), fb(nn), ja(nn * nn), jb(nn * nn);
    double ode_defect = 0.0;
    auto residual = [&](const std::vector<double>& Y, Eigen::VectorXd& G) {
        G.resize(static_cast<Eigen::Index>(dim));
        Eigen::Index row = 0;
        for (std::size_t r = 0; r < nl; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < nn; ++j) s += bl(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * (Y[j] - y_left[j]);
            G(row++) = s;
        }
        ode_defect = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double h = mesh.x[i + 1] - mesh.x[i];
            sys.rhs(&Y[i * nn], fa.data());
            sys.rhs(&Y[(i + 1) * nn], fb.data());
            for (std::size_t j = 0; j < nn; ++j) {
                const double g = sys.mass(static_cast<int>(j)) * (Y[(i + 1) * nn + j] - Y[i * nn + j]) -
                                 0.5 * h * (fa[j] + fb[j]);
                G(row++) = g;
                ode_defect = std::max(ode_defect, std::fabs(g) / h);
            }
        }
        for (std::size_t r = 0; r < nr; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < nn; ++j) s += br(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * Y[N * nn + j];
            G(row++) = s;
        }
        G(row++) = Y[mesh.zero_node * nn] - 0.5;
    };

    auto jacobian = [&](const std::vector<double>& Y, Eigen::SparseMatrix<double>& A) {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(dim * (2 * nn + 1));
        Eigen::Index row = 0;
        for (std::size_t r = 0; r < nl; ++r, ++row)
            for (std::size_t j = 0; j < nn; ++j)
                t.emplace_back(row, static_cast<Eigen::Index>(j), bl(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
        for (std::size_t i = 0; i < N; ++i) {
            const double h = mesh.x[i + 1] - mesh.x[i];
            sys.jac(&Y[i * nn], ja.data());
            sys.jac(&Y[(i + 1) * nn], jb.data());
            for (std::size_t j = 0; j < nn; ++j, ++row) {
                const double mj = sys.mass(static_cast<int>(j));
                for (std::size_t l = 0; l < nn; ++l) {
                    const double delta = (j == l) ? mj : 0.0;
                    const auto ca = static_cast<Eigen::Index>(i * nn + l);
                    const auto cb = static_cast<Eigen::Index>((i + 1) * nn + l);
                    const double va = -delta - 0.5 * h * ja[j * nn + l];
                    const double vb = delta - 0.5 * h * jb[j * nn + l];
                    if (va != 0.0) t.emplace_back(row, ca, va);
                    if (vb != 0.0) t.emplace_back(row, cb, vb);
                }
            }
        }
        for (std::size_t r = 0; r < nr; ++r, ++row)
            for (std::size_t j = 0; j < nn; ++j)
                t.emplace_back(row, static_cast<Eigen::Index>(N * nn + j), br(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
        t.emplace_back(row, static_cast<Eigen::Index>(mesh.zero_node * nn), 1.0);
        A.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        A.setFromTriplets(t.begin(), t.end());
    };

    Eigen::VectorXd G;
    Eigen::VectorXd Gtrial;
    residual(y, G);
    Eigen::SparseMatrix<double> A;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    for (int it = 0; it < cfg.max_newton; ++it) {
        jacobian(y, A);
        if (!analyzed) {
            lu.analyzePattern(A);
            analyzed = true;
        }
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw NoConvergence("singular Newton matrix", ode_defect);
        const Eigen::VectorXd dy = lu.solve(-G);
        if (!dy.allFinite()) throw NoConvergence("non-finite Newton step", ode_defect);
        const double g0 = G.norm();
        double lambda = 1.0;
        std::vector<double> trial(dim);
        for (;;) {
            for (std::size_t i = 0; i < dim; ++i) trial[i] = y[i] + lambda * dy(static_cast<Eigen::Index>(i));
            residual(trial, Gtrial);
            if (Gtrial.allFinite() && Gtrial.norm() <= (1.0 - 0.25 * lambda) * g0) break;
            if (Gtrial.allFinite() && g0 < 1e-13) break;
            lambda *= 0.5;
            if (lambda < 1.0 / 1024.0) {
                std::ostringstream msg;
                msg << "Newton stagnated at c=" << sys.c << " after " << it << " iterations";
                throw NoConvergence(msg.str(), ode_defect);
            }
        }
        y.swap(trial);
        G.swap(Gtrial);
        if (lambda == 1.0 && dy.lpNorm<Eigen::Infinity>() < cfg.newton_tol) {
            return {std::move(mesh), std::move(y), ode_defect};
        }
    }
    std::ostringstream msg;
    msg << "Newton did not converge at c=" << sys.c << " within " << cfg.max_newton << " iterations";
    throw NoConvergence(msg.str(), ode_defect);
}

WaveProfile to_profile(const Solution& s, const WaveSystem& sys, const ModelParams& params) {
    const auto nn = static_cast<std::size_t>(sys.n);
    WaveProfile p;
    p.x = s.mesh.x;
    p.u.resize(p.x.size());
    p.w.resize(p.x.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        p.u[i] = s.y[i * nn];
        p.w[i] = s.y[i * nn + 2];
    }
    p.c = sys.c;
    p.eps = params.eps;
    p.method = params.eps > 0.0 ? ProfileMethod::EpsCollocationBVP : ProfileMethod::CollocationBVP;
    p.params = params;
    p.solver_residual = s.residual;
    return p;
}

void require_positive_speed(double c) {
    if (!(std::isfinite(c) && c > 0.0)) {
        std::ostringstream msg;
        msg << "wave speed must be positive, got " << c;
        throw InvalidSpeed(msg.str());
    }
}

WaveProfile refine_impl(const WaveProfile& guess, double c, const ModelParams& params, const BvpConfig& cfg,
                        int mesh_passes) {
    require_positive_speed(c);
    params.validate();
    if (guess.size() < 5) throw DomainError("initial guess needs at least 5 nodes");
    const WaveSystem sys{c, params.gamma * params.k, params.k, params.eps, params.eps > 0.0 ? 4 : 3};
    const double L = cfg.half_length ? *cfg.half_length : bvp_half_length(c, params);
    const auto roots = dispersion_roots(c, params.with_eps(0.0));
    const double mu = mu_nu(c, params).mu;

    const Sampler f = profile_sampler(guess, sys.n, roots.lambda_slow, mu);
    Mesh mesh = adapted_mesh(sys, f, L, cfg, nullptr);
    Solution sol = newton(sys, mesh, sample(f, mesh.x, sys.n), cfg);
    for (int pass = 0; pass < mesh_passes; ++pass) {
        const Sampler g = nodal_sampler(sol.mesh.x, sol.y, sys.n);
        Mesh next = adapted_mesh(sys, g, L, cfg, &sol.mesh.x);
        sol = newton(sys, next, sample(g, next.x, sys.n), cfg);
    }
    WaveProfile out = to_profile(sol, sys, params);
    const auto v = validate_profile(out);
    if (!v.ok()) {
        std::ostringstream msg;
        msg << "converged solution at c=" << c << " is not an admissible wave: " << v.issues.front();
        throw NoConvergence(msg.str(), sol.residual);
    }
    return out;
}

}  // namespace

double bvp_half_length(double c, const ModelParams& params) {
    require_positive_speed(c);
    const auto roots = dispersion_roots(c, params.with_eps(0.0));
    const double mu = mu_nu(c, params).mu;
    return std::max({40.0, 12.0 / std::fabs(roots.lambda_slow), 12.0 / mu});
}

WaveProfile refine_tw_bvp(const WaveProfile& guess, double c, const ModelParams& params, const BvpConfig& config) {
    return refine_impl(guess, c, params, config, config.mesh_passes);
}

WaveProfile solve_tw_bvp(double c, const ModelParams& params, const BvpConfig& config) {
    require_positive_speed(c);
    const ModelParams p0 = params.with_eps(0.0);
    const auto bounds = minimal_speed(p0);
    if (c < bounds.lower) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "c=" << c << " lies below the minimal speed bound " << bounds.lower
            << (bounds.exact ? " (c_min = c_inf)" : " (c_lin)");
        throw InvalidSpeed(msg.str());
    }
    const double cinf = c_infinity(p0.gamma);
    WaveProfile current = shoot_reduced_wave(p0);
    double c_now = cinf;
    const bool at_start = std::fabs(c - cinf) <= 1e-14 * cinf;
    current = refine_impl(current, cinf, p0, config, at_start ? config.mesh_passes : 0);
    if (at_start) return current;

    double step = config.continuation_step;
    const double dir = c > cinf ? 1.0 : -1.0;
    while (c_now != c) {
        const double c_next = std::fabs(c - c_now) <= step * 1.0000001 ? c : c_now + dir * step;
        const bool last = c_next == c;
        try {
            current = refine_impl(current, c_next, p0, config, last ? config.mesh_passes : 0);
            c_now = c_next;
        } catch (const NoConvergence&) {
            if (step < config.continuation_step / 64.0) throw;
            step *= 0.5;
        }
    }
    return current;
}

WaveProfile solve_tw_bvp_eps(double c, double eps, const ModelParams& params, const BvpConfig& config) {
    require_positive_speed(c);
    if (!(eps > 0.0)) throw DomainError("solve_tw_bvp_eps needs eps > 0");
    params.with_eps(eps).validate();
    WaveProfile current = solve_tw_bvp(c, params.with_eps(0.0), config);

    double done = 0.0;
    double target = eps;
    while (done != eps) {
        try {
            current = refine_impl(current, c, params.with_eps(target), config,
                                  target == eps ? config.mesh_passes : 0);
            done = target;
            target = eps;
        } catch (const NoConvergence&) {
            if (target - done < eps / 256.0) throw;
            target = 0.5 * (done + target);
        }
    }
    return current;
}

}  // namespace tdw
