#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "tdw/bvp.hpp"
#include "tdw/dispersion.hpp"
#include "tdw/errors.hpp"
#include "tdw/profile.hpp"
#include "tdw/profile_io.hpp"
#include "tdw/shooting.hpp"
#include "tdw/stefan.hpp"
#include "tdw/volpert.hpp"

using namespace tdw;
using tdw::testing::Gen;

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

// Waves shared between test cases; each is computed once.
const WaveProfile& shot_k10() {
    static const WaveProfile p = shoot_reduced_wave(make_params(1.0, 10.0));
    return p;
}
const WaveProfile& bvp_k10_c1() {
    static const WaveProfile p = solve_tw_bvp(1.0, make_params(1.0, 10.0));
    return p;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "tdw_test_profiles";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("reduced right-hand side") {
    const auto p = make_params(1.0, 10.0);
    const auto a = reduced_rhs(0.0, 0.0, p);
    CHECK(a.du == 0.0);
    CHECK(a.dw == 0.0);
    const auto b = reduced_rhs(1.0, 1.0, p);
    CHECK(std::fabs(b.du) < 1e-15);
    CHECK(std::fabs(b.dw) < 1e-15);
    const auto c = reduced_rhs(0.5, 1.0, p);
    CHECK(c.du == doctest::Approx(-0.5 * c_infinity(1.0)).epsilon(1e-14));
    CHECK(c.dw == doctest::Approx(0.0));
}

TEST_CASE("shooting wave at gamma=1, k=10") {
    const auto& p = shot_k10();
    CHECK(p.method == ProfileMethod::ReducedShooting);
    CHECK(p.c == c_infinity(1.0));
    CHECK(validate_profile(p).ok());
    CHECK(interpolate(p.x, p.u, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
    const auto r = full_tw_residual(p);
    CHECK(r.res_u < 1e-6);
    CHECK(r.res_w < 1e-6);
    const auto fit = fit_decay_rate(p, Side::PlusInfinity, Component::U);
    CHECK(fit.rate == doctest::Approx(-2.0 * kSqrt2).epsilon(0.01));
    CHECK(check_apriori_bounds(p).all_ok());
    CHECK(mass_identity(p) == doctest::Approx(c_infinity(1.0) / 10.0).epsilon(0.005));
}

TEST_CASE("shooting wave at k=k0 and on random pushed parameters") {
    const auto p = shoot_reduced_wave(make_params(1.0, 3.0));
    CHECK(validate_profile(p).ok());
    const auto r = full_tw_residual(p);
    CHECK(r.res_u < 1e-6);
    CHECK(r.res_w < 1e-6);

    Gen g(314);
    for (int i = 0; i < 6; ++i) {
        const auto params = g.params_beside_k0(+1);
        const auto q = shoot_reduced_wave(params);
        CHECK(validate_profile(q).ok());
        CHECK(mass_identity(q) == doctest::Approx(q.c / params.k).epsilon(0.01));
    }
}

TEST_CASE("shooting residual decreases at second order in dx") {
    const auto p = make_params(1.0, 10.0);
    ShootingConfig coarse;
    coarse.dx = 4e-3;
    ShootingConfig fine;
    fine.dx = 2e-3;
    const double rc = full_tw_residual(shoot_reduced_wave(p, coarse)).res_u;
    const double rf = full_tw_residual(shoot_reduced_wave(p, fine)).res_u;
    CHECK(rc / rf > 3.0);
    CHECK(rc / rf < 5.0);
}

TEST_CASE("BVP agrees with shooting at c_inf") {
    const auto b = solve_tw_bvp(c_infinity(1.0), make_params(1.0, 10.0));
    CHECK(b.method == ProfileMethod::CollocationBVP);
    CHECK(validate_profile(b).ok());
    CHECK(sup_distance(align_half_crossing(b), shot_k10()) < 1e-4);
}

TEST_CASE("BVP wave at c=1, k=10") {
    const auto& p = bvp_k10_c1();
    CHECK(validate_profile(p).ok());
    CHECK(p.solver_residual < 1e-9);
    const auto roots = dispersion_roots(1.0, make_params(1.0, 10.0));
    const auto plus = fit_decay_rate(p, Side::PlusInfinity, Component::U);
    CHECK(plus.rate == doctest::Approx(roots.lambda_slow).epsilon(0.02));
    const auto minus = fit_decay_rate(p, Side::MinusInfinity, Component::OneMinusU);
    CHECK(minus.rate == doctest::Approx(mu_nu(1.0, make_params(1.0, 10.0)).mu).epsilon(0.02));
    CHECK(mass_identity(p) == doctest::Approx(0.1).epsilon(0.005));
    CHECK(check_apriori_bounds(p).all_ok());
}

TEST_CASE("BVP decay rates follow the speed") {
    const auto params = make_params(1.0, 10.0);
    double previous_plus = -1e300;
    double previous_minus = 1e300;
    for (double c : {c_infinity(1.0), 0.85, 0.9, 1.0, 1.2}) {
        const auto p = solve_tw_bvp(c, params);
        const double plus = fit_decay_rate(p, Side::PlusInfinity, Component::U).rate;
        const double minus = fit_decay_rate(p, Side::MinusInfinity, Component::OneMinusU).rate;
        CHECK(plus >= previous_plus);
        CHECK(minus < previous_minus);
        previous_plus = plus;
        previous_minus = minus;
    }
}

TEST_CASE("BVP mass identity at k=100") {
    const auto p = solve_tw_bvp(1.0, make_params(1.0, 100.0));
    CHECK(mass_identity(p) == doctest::Approx(0.01).epsilon(0.005));
}

TEST_CASE("BVP rejects speeds below the proven bound") {
    CHECK_THROWS_AS(solve_tw_bvp(0.5, make_params(1.0, 10.0)), InvalidSpeed);
    CHECK_THROWS_AS(solve_tw_bvp(0.3, make_params(1.0, 10.0)), InvalidSpeed);
    CHECK_THROWS_AS(solve_tw_bvp(-1.0, make_params(1.0, 10.0)), InvalidSpeed);
}

TEST_CASE("eps-regularized waves converge to the eps=0 wave") {
    const auto params = make_params(1.0, 10.0);
    const auto& base = bvp_k10_c1();
    double previous = 1e300;
    for (double eps : {0.1, 0.05, 0.01}) {
        const auto p = solve_tw_bvp_eps(1.0, eps, params);
        CHECK(p.method == ProfileMethod::EpsCollocationBVP);
        CHECK(p.eps == eps);
        CHECK(validate_profile(p).ok());
        const double d = sup_distance(p, base);
        CHECK(d < previous);
        previous = d;
    }
    CHECK(previous < 0.05);
    CHECK_THROWS_AS(solve_tw_bvp_eps(1.0, 0.5, params), DomainError);
    CHECK_THROWS_AS(solve_tw_bvp_eps(1.0, 0.7, params), DomainError);
}

TEST_CASE("Stefan wave") {
    const auto s = stefan_wave(1.0, 1.0);
    CHECK(s.alpha == doctest::Approx(0.618033988749894848).epsilon(1e-14));
    CHECK(s.beta == doctest::Approx(0.381966011250105152).epsilon(1e-14));
    CHECK(std::fabs(s.jump_defect()) < 1e-14);
    CHECK(s.u_normalized(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.w(1e-12) == doctest::Approx(s.beta));
    CHECK(s.w(-1e-12) == 1.0);
    CHECK(s.u(1.0) == 0.0);
    // At c=1 the left rate alpha coincides with mu.
    CHECK(s.alpha == doctest::Approx(mu_nu(1.0, make_params(1.0, 10.0)).mu).epsilon(1e-14));
    CHECK_THROWS_AS(stefan_wave(0.5, 1.0), NoWaveBelowMinimalSpeed);
    const auto edge = stefan_wave(c_infinity(1.0), 1.0);
    CHECK(std::fabs(edge.beta) < 1e-14);
    CHECK(edge.w(3.0) == doctest::Approx(0.0).epsilon(1e-14));

    Gen g(77);
    for (int i = 0; i < 100; ++i) {
        const double gamma = g.log_uniform(0.1, 10.0);
        const auto w = stefan_wave(g.speed_above_cinf(gamma), gamma);
        CHECK(std::fabs(w.jump_defect()) < 1e-12);
        CHECK(w.beta >= -1e-15);
        CHECK(w.beta < 1.0);
    }
}

TEST_CASE("sampled Stefan wave") {
    const auto s = stefan_wave(1.0, 1.0);
    const auto p = sample_stefan(s, linspace(-20.0, 20.0, 40001));
    CHECK(p.method == ProfileMethod::StefanLimit);
    CHECK(interpolate(p.x, p.u, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    // u'' + c u' - u + 1 = 0 on the left of the free boundary, checked on the closed form
    const double xs = s.half_point_offset();
    double worst = 0.0;
    for (double x = -15.0; x < xs - 0.1; x += 0.01) {
        const double e = std::exp(s.alpha * (x - xs));
        const double u = 1.0 - e;
        const double du = -s.alpha * e;
        const double d2u = -s.alpha * s.alpha * e;
        worst = std::max(worst, std::fabs(d2u + s.c * du - u + 1.0));
        CHECK(s.u_normalized(x) == doctest::Approx(u).epsilon(1e-14));
    }
    CHECK(worst < 1e-8);
    // w tail decays at -1/(c gamma)
    WaveProfile tail = p;
    DecayFitOptions opt;
    opt.value_lo = 1e-8;
    opt.value_hi = 0.3;
    opt.tail_fraction = 0.45;
    const auto fit = fit_decay_rate(tail, Side::PlusInfinity, Component::W, opt);
    CHECK(fit.rate == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("constant and equilibrium profiles") {
    WaveProfile one;
    one.x = linspace(-1.0, 1.0, 21);
    one.u.assign(21, 1.0);
    one.w.assign(21, 1.0);
    one.params = make_params(1.0, 10.0);
    one.c = 1.0;
    const auto r = full_tw_residual(one);
    CHECK(r.res_u == 0.0);
    CHECK(r.res_w == 0.0);
    WaveProfile zero = one;
    zero.u.assign(21, 0.0);
    zero.w.assign(21, 0.0);
    CHECK(mass_identity(zero) == 0.0);
    // not strictly decreasing, not normalized
    CHECK_FALSE(validate_profile(one).ok());
    CHECK_THROWS_AS(require_admissible(one), MonotonicityError);
}

TEST_CASE("a-priori bound violation is reported") {
    const auto params = make_params(1.0, 10.0);
    const double c = 1.0;
    const double nu = mu_nu(c, params).nu;
    WaveProfile p;
    p.params = params;
    p.c = c;
    p.x = linspace(-10.0, 10.0, 4001);
    for (double x : p.x) {
        const double u = 1.0 / (1.0 + std::exp(2.0 * nu * x));  // u' ~ -2 nu u for large x
        p.u.push_back(u);
        p.w.push_back(u);
    }
    const auto rep = check_apriori_bounds(p);
    CHECK_FALSE(rep.u_nu_ok);
    CHECK_FALSE(rep.all_ok());
    CHECK(rep.x_worst_u_nu > 0.0);
}

TEST_CASE("profile validation flags") {
    WaveProfile p = shot_k10();
    CHECK(validate_profile(p).ok());
    SUBCASE("out of range") {
        p.u[p.size() / 2] = 1.5;
        const auto v = validate_profile(p);
        CHECK_FALSE(v.in_range);
        CHECK_FALSE(v.ok());
    }
    SUBCASE("grid not increasing") {
        std::swap(p.x[10], p.x[11]);
        CHECK_FALSE(validate_profile(p).grid_increasing);
    }
    SUBCASE("shifted phase") {
        for (auto& x : p.x) x += 0.5;
        CHECK_FALSE(validate_profile(p).normalized);
        const auto a = align_half_crossing(p);
        CHECK(validate_profile(a).normalized);
        CHECK(sup_distance(a, shot_k10()) < 1e-12);
    }
}

TEST_CASE("interpolation and grid derivatives") {
    const std::vector<double> x = {0.0, 1.0, 3.0};
    const std::vector<double> f = {1.0, 3.0, 7.0};
    CHECK(interpolate(x, f, 0.5) == 2.0);
    CHECK(interpolate(x, f, 2.0) == 5.0);
    CHECK(interpolate(x, f, -1.0) == 1.0);
    CHECK(interpolate(x, f, 10.0) == 7.0);

    // quadratic is differentiated exactly on a nonuniform grid
    std::vector<double> xs;
    std::vector<double> q;
    Gen g(8);
    double t = -2.0;
    for (int i = 0; i < 50; ++i) {
        xs.push_back(t);
        q.push_back(3.0 * t * t - t + 2.0);
        t += g.uniform(0.01, 0.1);
    }
    const auto d = grid_derivatives(xs, q);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(d.d1[i] == doctest::Approx(6.0 * xs[i] - 1.0).epsilon(1e-8).scale(1.0));
        CHECK(d.d2[i] == doctest::Approx(6.0).epsilon(1e-6));
    }
}

TEST_CASE("profile IO round trip") {
    const auto& p = bvp_k10_c1();
    const auto path = scratch("wave.csv");
    save_profile(p, path);
    CHECK(std::filesystem::exists(metadata_path(path)));
    CHECK(metadata_path(path).filename() == "wave.meta.json");
    const auto q = load_profile(path);
    CHECK(q.x == p.x);
    CHECK(q.u == p.u);
    CHECK(q.w == p.w);
    CHECK(q.c == p.c);
    CHECK(q.method == p.method);
    CHECK(q.params.gamma == p.params.gamma);
    CHECK(q.params.k == p.params.k);
    CHECK(q.solver_residual == p.solver_residual);

    const auto s = sample_stefan(stefan_wave(1.0, 1.0), linspace(-5.0, 5.0, 101));
    save_profile(s, scratch("stefan.csv"));
    CHECK(load_profile(scratch("stefan.csv")).method == ProfileMethod::StefanLimit);
}

TEST_CASE("profile IO errors") {
    CHECK_THROWS_AS(load_profile(scratch("does_not_exist.csv")), FileFormatError);
    {
        std::ofstream(scratch("bad_header.csv")) << "x,u\n0,1\n";
    }
    CHECK_THROWS_AS(load_profile(scratch("bad_header.csv")), FileFormatError);
    {
        std::ofstream(scratch("bad_row.csv")) << "x,u,w\n0,1,1\n1,0.5\n";
    }
    CHECK_THROWS_AS(load_profile(scratch("bad_row.csv")), FileFormatError);
    {
        std::ofstream(scratch("bad_cell.csv")) << "x,u,w\n0,1,1x\n";
    }
    CHECK_THROWS_AS(load_profile(scratch("bad_cell.csv")), FileFormatError);
    {
        std::ofstream(scratch("sidecar.csv")) << "x,u,w\n0,1,1\n";
        std::ofstream(scratch("sidecar.meta.json")) << "{not json";
    }
    CHECK_THROWS_AS(load_profile(scratch("sidecar.csv")), FileFormatError);

    CHECK(parse_double(" 1.25 ") == 1.25);
    CHECK(parse_double("+3e-2") == 0.03);
    CHECK_THROWS_AS(parse_double(""), FileFormatError);
    CHECK_THROWS_AS(parse_double("1.0abc"), FileFormatError);
}

TEST_CASE("Volpert functionals on computed waves") {
    const auto params = make_params(1.0, 10.0);
    for (const WaveProfile* p : {&shot_k10(), &bvp_k10_c1()}) {
        const auto rep = volpert_functionals(*p, 0.0, params);
        CHECK(rep.phi1_max == doctest::Approx(p->c).epsilon(1e-3));
        const auto samples = samples_from_profile(*p);
        const double coeff = phi2_eps_coefficient(samples, params);
        CHECK(std::isfinite(coeff));
        for (double eps : {0.1, 0.01, 0.001}) {
            const auto r = volpert_functionals(samples, eps, params);
            CHECK(r.phi2_max <= p->c + eps * coeff + 1e-3);
            CHECK(r.speed_bound == std::max(r.phi1_max, r.phi2_max));
        }
    }
    CHECK_THROWS_AS(volpert_functionals(bvp_k10_c1(), 0.5, params), DomainError);
}

TEST_CASE("glued exponential trial pair") {
    const auto g = glue_polynomial();
    const auto x = linspace(-1.0, 1.0, 20001);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        CHECK(g(x[i]) > 0.0);
        integral += 0.5 * (g(x[i]) + g(x[i + 1])) * (x[i + 1] - x[i]);
    }
    CHECK(integral == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-8));
    // C^1 matching of -rho' with e^{-x} at +1 and e^{x} at -1
    const double e1 = std::exp(-1.0);
    CHECK(g(1.0) == doctest::Approx(e1).epsilon(1e-12));
    CHECK(g(-1.0) == doctest::Approx(e1).epsilon(1e-12));
    const double h = 1e-6;
    CHECK((g(1.0) - g(1.0 - h)) / h == doctest::Approx(-e1).epsilon(1e-4));
    CHECK((g(-1.0 + h) - g(-1.0)) / h == doctest::Approx(e1).epsilon(1e-4));

    const auto pair = glued_exponential_trial_pair(linspace(-40.0, 40.0, 80001));
    CHECK(pair.size() == 80001);
    for (std::size_t i = 0; i + 1 < pair.size(); ++i) CHECK(pair.rho[i] >= pair.rho[i + 1]);
    const auto params = make_params(1.0, 10.0);
    double first = 0.0;
    for (double eps : {0.1, 0.01, 0.001}) {
        const auto rep = volpert_functionals(pair, eps, params);
        CHECK(std::isfinite(rep.speed_bound));
        CHECK(rep.speed_bound > 0.0);
        if (first == 0.0) first = rep.phi2_max;
        CHECK(rep.phi2_max == doctest::Approx(first).epsilon(0.05));
    }
}
