#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "tdw/dispersion.hpp"
#include "tdw/errors.hpp"
#include "tdw/pdesim.hpp"
#include "tdw/profile_io.hpp"
#include "tdw/shooting.hpp"

using namespace tdw;
using tdw::testing::Gen;

namespace {

SimConfig small_config(double length, double t_end) {
    SimConfig c;
    c.domain_length = length;
    c.x_min = -0.5 * length;
    c.dx = 0.05;
    c.dt = 0.01;
    c.t_end = t_end;
    c.moving_window = false;
    c.record_interval = 0.5;
    return c;
}

InitialCondition constant(const Grid& g, double value) {
    InitialCondition ic;
    ic.u.assign(g.n, value);
    ic.w.assign(g.n, value);
    return ic;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "tdw_test_pdesim";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("initial conditions") {
    const Grid g{-2.0, 0.5, 9};
    const auto step = initial_condition({InitialKind::Step, 0.0, 1.0, {}}, g);
    for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(step.u[i] == (g.x(i) < 0.0 ? 1.0 : 0.0));
        CHECK(step.w[i] == step.u[i]);
    }
    const auto decay = initial_condition({InitialKind::ExpDecay, 0.0, 2.0, {}}, g);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(decay.u[i] == std::min(1.0, std::exp(-2.0 * g.x(i))));
    CHECK_THROWS_AS(initial_condition({InitialKind::ExpDecay, 0.0, -1.0, {}}, g), ConfigError);
    const Grid fine{-3.0, 0.01, 601};
    const auto steep = initial_condition({InitialKind::ExpDecay, 0.0, 10.0, {}}, fine);
    const auto sharp = initial_condition({InitialKind::Step, 0.0, 1.0, {}}, fine);
    for (std::size_t i = 0; i < fine.n; ++i) {
        if (std::fabs(fine.x(i)) >= 0.5) CHECK(std::fabs(steep.u[i] - sharp.u[i]) < 0.01);
    }
    CHECK(initial_kind_from_string("step") == InitialKind::Step);
    CHECK(initial_kind_from_string("ExpDecay") == InitialKind::ExpDecay);
    CHECK_THROWS_AS(initial_kind_from_string("gauss"), ConfigError);
    CHECK(scheme_from_string("IMEX") == Scheme::IMEX);
    CHECK_THROWS_AS(scheme_from_string("euler"), ConfigError);
}

TEST_CASE("profile initial data") {
    WaveProfile p;
    const Grid g{-10.0, 0.05, 401};
    for (std::size_t i = 0; i < g.n; ++i) {
        p.x.push_back(g.x(i));
        p.u.push_back(0.5 * std::erfc(g.x(i)));
        p.w.push_back(0.5 * std::erfc(0.5 * g.x(i)));
    }
    p.params = make_params(1.0, 10.0);
    p.c = 1.0;
    const auto path = scratch("erfc.csv");
    save_profile(p, path);
    const auto same = initial_condition({InitialKind::ProfileFile, 0.0, 1.0, path}, g);
    CHECK(same.u == p.u);
    CHECK(same.w == p.w);
    // beyond the stored grid the tails keep decaying instead of freezing at the end values
    const Grid wide{-30.0, 0.05, 1201};
    const auto ext = initial_condition({InitialKind::ProfileFile, 0.0, 1.0, path}, wide);
    CHECK(ext.u.back() < 1e-12 * p.u.back());
    CHECK(ext.w.back() < p.w.back());
    CHECK(ext.w.back() > 0.0);
    CHECK(ext.u.front() == 1.0);
    for (std::size_t i = 0; i + 1 < wide.n; ++i) CHECK(ext.u[i] >= ext.u[i + 1]);
    CHECK_THROWS_AS(initial_condition({InitialKind::ProfileFile, 0.0, 1.0, scratch("none.csv")}, g), FileFormatError);
}

TEST_CASE("config validation") {
    const auto p = make_params(1.0, 10.0);
    SimConfig c = small_config(20.0, 1.0);
    CHECK_NOTHROW(c.validate(p));
    CHECK(c.nodes() == 401);
    SUBCASE("IMEX dt bound 0.5/(1+gamma k)") {
        c.dt = 0.05;
        CHECK_THROWS_AS(c.validate(p), ConfigError);
        c.dt = 0.045;
        CHECK_NOTHROW(c.validate(p));
    }
    SUBCASE("explicit dt bound 0.4 dx^2") {
        c.scheme = Scheme::ExplicitRK2;
        CHECK_THROWS_AS(c.validate(p), ConfigError);
        c.dt = 0.4 * c.dx * c.dx;
        CHECK_NOTHROW(c.validate(p));
    }
    SUBCASE("malformed values") {
        c.dx = -1.0;
        CHECK_THROWS_AS(c.validate(p), ConfigError);
    }
    SUBCASE("recenter fractions") {
        c.recenter_target = 0.9;
        CHECK_THROWS_AS(c.validate(p), ConfigError);
    }
    SUBCASE("bad eps surfaces as a config error") {
        CHECK_THROWS_AS(c.validate(ModelParams{1.0, 10.0, 0.6}), ConfigError);
    }
    SUBCASE("initial data of the wrong size") {
        CHECK_THROWS_AS(simulate(p, c, constant(Grid{0.0, 1.0, 10}, 0.0)), ConfigError);
    }
    SUBCASE("initial data outside [0,1]") {
        CHECK_THROWS_AS(simulate(p, c, constant(Grid::from_config(c), 1.5)), ConfigError);
        CHECK_THROWS_AS(simulate(p, c, constant(Grid::from_config(c), 1.0 + 1e-9)), ConfigError);
        CHECK_THROWS_AS(simulate(p, c, constant(Grid::from_config(c), -1e-9)), ConfigError);
    }
    SUBCASE("rounding overshoot in initial data is clamped") {
        c.t_end = 0.02;
        const auto r = simulate(p, c, constant(Grid::from_config(c), 1.0 + 1e-13));
        CHECK(r.final_state.u.front() == 1.0);
        CHECK(r.diagnostics.max_value <= 1.0 + 1e-12);
    }
}

TEST_CASE("equilibria are preserved") {
    const auto p = make_params(1.0, 10.0);
    const auto c = small_config(40.0, 5.0);
    const auto g = Grid::from_config(c);
    // (0,0) everywhere; the (1,1) left boundary starts a front, which stays within a few units of it by t=5.
    const auto zero = simulate(p, c, constant(g, 0.0));
    for (std::size_t i = 0; i < g.n; ++i) {
        if (g.x(i) < 0.0) continue;
        CHECK(zero.final_state.u[i] < 1e-20);
        CHECK(zero.final_state.w[i] < 1e-20);
    }
    // (1,1) everywhere; only the layer at the (0,0) right boundary may move.
    const auto one = simulate(p, c, constant(g, 1.0));
    for (std::size_t i = 0; i < g.n; ++i) {
        if (g.x(i) > -5.0) break;
        CHECK(one.final_state.u[i] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(one.final_state.w[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("a travelling wave is translated without change of shape") {
    const auto params = make_params(1.0, 10.0);
    const auto wave = shoot_reduced_wave(params);
    const auto path = scratch("wave_k10.csv");
    save_profile(wave, path);

    auto c = small_config(100.0, 20.0);
    c.x_min = -40.0;
    const auto g = Grid::from_config(c);
    const auto init = initial_condition({InitialKind::ProfileFile, 0.0, 1.0, path}, g);
    const auto res = simulate(params, c, init);
    const auto x_front = front_position(res.final_state.grid, res.final_state.u);
    REQUIRE(x_front);
    CHECK(*x_front == doctest::Approx(c_infinity(1.0) * 20.0).epsilon(0.02));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        if (x < -30.0 || x > 45.0) continue;
        worst = std::max(worst, std::fabs(res.final_state.u[i] - interpolate(wave.x, wave.u, x - *x_front)));
        worst = std::max(worst, std::fabs(res.final_state.w[i] - interpolate(wave.x, wave.w, x - *x_front)));
    }
    CHECK(worst < 1e-2);
}

TEST_CASE("speed estimate on synthetic traces") {
    FrontTrace t;
    for (int i = 0; i <= 200; ++i) {
        t.times.push_back(0.5 * i);
        t.positions.push_back(0.25 * i);
    }
    const auto e = estimate_front_speed(t);
    CHECK(e.value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.std_error < 1e-12);
    CHECK(std::fabs(e.drift) < 1e-12);
    CHECK(e.t_lo >= 30.0);
    CHECK(e.t_hi == 100.0);
    CHECK(e.samples == 141);

    FrontTrace accel = t;
    for (std::size_t i = 0; i < accel.times.size(); ++i) accel.positions[i] = 0.001 * accel.times[i] * accel.times[i];
    const auto a = estimate_front_speed(accel);
    CHECK(a.drift == doctest::Approx(0.002 * (a.t_hi - a.t_lo)).epsilon(1e-8));

    FrontTrace tiny;
    for (int i = 0; i < 8; ++i) {
        tiny.times.push_back(i);
        tiny.positions.push_back(i);
    }
    CHECK_THROWS_AS(estimate_front_speed(tiny), WindowTooShort);
    CHECK_THROWS_AS(estimate_front_speed(t, 0.8), DomainError);
    CHECK_THROWS_AS(estimate_front_speed(t, 0.0), DomainError);
}

TEST_CASE("front position") {
    const Grid g{0.0, 1.0, 5};
    CHECK_FALSE(front_position(g, {0, 0, 0, 0, 0}));
    CHECK_FALSE(front_position(g, {1, 1, 1, 1, 1}));
    CHECK(*front_position(g, {1, 1, 0.75, 0.25, 0}) == doctest::Approx(2.5));
    // rightmost crossing wins
    CHECK(*front_position(g, {1, 0, 1, 0, 0}) == doctest::Approx(2.5));
}

TEST_CASE("moving window keeps the front and its speed") {
    const auto params = make_params(1.0, 10.0);
    SimConfig c = small_config(100.0, 120.0);
    c.moving_window = true;
    const auto res = simulate(params, c, initial_condition({InitialKind::Step, 0.0, 1.0, {}}, Grid::from_config(c)));
    CHECK(res.trace.recenters.size() >= 1);
    for (const auto& ev : res.trace.recenters) CHECK(ev.shift_nodes > 0);
    // a Step front first retreats while it smooths out
    for (std::size_t i = 1; i < res.trace.positions.size(); ++i) {
        if (res.trace.times[i] < 10.0) continue;
        CHECK(res.trace.positions[i] >= res.trace.positions[i - 1] - 1e-9);
    }
    const auto e = estimate_front_speed(res.trace);
    CHECK(e.value == doctest::Approx(c_infinity(1.0)).epsilon(0.02));
    CHECK(res.diagnostics.min_value >= -1e-12);
    CHECK(res.diagnostics.max_value <= 1.0 + 1e-12);
}

TEST_CASE("IMEX and explicit schemes agree") {
    const auto params = make_params(1.0, 3.0);
    SimConfig imex = small_config(30.0, 5.0);
    imex.dx = 0.1;
    imex.dt = 0.002;
    SimConfig rk = imex;
    rk.scheme = Scheme::ExplicitRK2;
    const auto g = Grid::from_config(imex);
    const auto init = initial_condition({InitialKind::ExpDecay, 0.0, 1.0, {}}, g);
    const auto a = simulate(params, imex, init);
    const auto b = simulate(params, rk, init);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) worst = std::max(worst, std::fabs(a.final_state.u[i] - b.final_state.u[i]));
    CHECK(worst < 5e-3);
}

TEST_CASE("range and ordering invariants on random short runs") {
    Gen gen(123);
    for (int trial = 0; trial < 8; ++trial) {
        const auto params = make_params(gen.log_uniform(0.3, 3.0), gen.log_uniform(0.3, 30.0));
        SimConfig c = small_config(40.0, 4.0);
        c.dx = 0.1;
        c.dt = std::min(0.01, 0.45 / (1.0 + params.gamma * params.k));
        const auto g = Grid::from_config(c);
        const double x0 = gen.uniform(-5.0, 5.0);
        const auto hi = initial_condition({InitialKind::Step, x0 + gen.uniform(0.5, 5.0), 1.0, {}}, g);
        const auto lo = initial_condition({InitialKind::Step, x0, 1.0, {}}, g);
        const auto a = simulate(params, c, hi);
        const auto b = simulate(params, c, lo);
        CHECK(a.diagnostics.min_value >= -1e-12);
        CHECK(a.diagnostics.max_value <= 1.0 + 1e-12);
        for (std::size_t i = 0; i < g.n; ++i) {
            CHECK(a.final_state.u[i] >= b.final_state.u[i] - 1e-10);
            CHECK(a.final_state.w[i] >= b.final_state.w[i] - 1e-10);
        }
    }
}

TEST_CASE("radial residual") {
    const auto wave = shoot_reduced_wave(make_params(1.0, 10.0));
    const auto one = radial_supersolution_residual(wave, 1, 1.0);
    CHECK(one.min_residual == 0.0);
    CHECK(one.max_residual == 0.0);
    const auto three = radial_supersolution_residual(wave, 3, 1.0);
    CHECK(three.min_residual >= -1e-10);
    CHECK(three.negative == 0);
    const auto two = radial_supersolution_residual(wave, 2, 1.0);
    REQUIRE(two.residual.size() == three.residual.size());
    for (std::size_t i = 0; i < two.residual.size(); ++i) {
        CHECK(three.residual[i] == doctest::Approx(2.0 * two.residual[i]).epsilon(1e-14));
        CHECK(three.r[i] >= 1.0);
    }
    CHECK_THROWS_AS(radial_supersolution_residual(wave, 0, 1.0), DomainError);
    CHECK_THROWS_AS(radial_supersolution_residual(wave, 3, -1.0), DomainError);
}

TEST_CASE("trace and snapshot output") {
    const auto params = make_params(1.0, 10.0);
    SimConfig c = small_config(20.0, 2.0);
    c.snapshot_interval = 1.0;
    const auto dir = scratch("frames");
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto res = simulate(params, c, initial_condition({InitialKind::Step, 0.0, 1.0, {}}, Grid::from_config(c)),
                              SnapshotSink{dir});
    CHECK(res.diagnostics.snapshots == 3);
    CHECK(std::filesystem::exists(dir / "frame_000000.csv"));
    write_trace_csv(res.trace, scratch("trace.csv"));
    std::ifstream in(scratch("trace.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x_front");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == res.trace.times.size());
    CHECK(res.trace.times.front() == 0.0);
    CHECK(res.trace.times.back() == doctest::Approx(2.0));
}
