#include "tdw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <thread>

#include "tdw/dispersion.hpp"
#include "tdw/stefan.hpp"
#include "tdw/volpert.hpp"

#ifndef TDW_VERSION
#define TDW_VERSION "0.0.0"
#endif

namespace tdw {
namespace {

using json = nlohmann::ordered_json;

// Runs job(i, row) for every row on a shared work queue. A throwing job keeps
// whatever it stored in row.values and records the message.
std::vector<StudyRow> run_rows(std::size_t n, const SweepOptions& opts,
                               const std::function<void(std::size_t, StudyRow&)>& job) {
    std::vector<StudyRow> rows(n);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i, rows[i]);
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
        }
    };
    unsigned count = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    count = static_cast<unsigned>(std::min<std::size_t>(count, std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

void require_positive_list(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw DomainError(std::string(what) + " is empty");
    for (double x : v) {
        if (!(std::isfinite(x) && x > 0.0)) throw DomainError(std::string(what) + " entries must be positive");
    }
}

Check make_check(std::string name, double tolerance, double value, bool passed) {
    return {std::move(name), tolerance, value, passed};
}

json base_provenance() {
    return json{{"tool", "tdw"},
                {"version", tool_version()},
                {"compiler", __VERSION__},
                {"deterministic", true},
                {"seeds", "none (no random input)"}};
}

json bvp_json(const BvpConfig& b) {
    json j{{"intervals", b.intervals},
           {"newton_tol", b.newton_tol},
           {"max_newton", b.max_newton},
           {"continuation_step", b.continuation_step},
           {"mesh_passes", b.mesh_passes},
           {"monitor_share", b.monitor_share}};
    j["half_length"] = b.half_length ? json(*b.half_length) : json(nullptr);
    return j;
}

json sim_json(const SimConfig& s) {
    return json{{"domain_length", s.domain_length}, {"dx", s.dx},
                {"dt", s.dt}, {"t_end", s.t_end},
                {"scheme", to_string(s.scheme)}, {"moving_window", s.moving_window},
                {"x_min", s.x_min}, {"record_interval", s.record_interval},
                {"recenter_trigger", s.recenter_trigger}, {"recenter_target", s.recenter_target}};
}

// Integral of the piecewise-linear interpolant of g(x, f(x)) over [a, b], by
// composite trapezoid on the profile nodes plus the interpolated end points.
double window_integral(const std::vector<double>& x, const std::vector<double>& f, double a, double b,
                       const std::function<double(double, double)>& g) {
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(a, g(a, interpolate(x, f, a)));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > a && x[i] < b) pts.emplace_back(x[i], g(x[i], f[i]));
    }
    pts.emplace_back(b, g(b, interpolate(x, f, b)));
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        s += 0.5 * (pts[i].second + pts[i + 1].second) * (pts[i + 1].first - pts[i].first);
    return s;
}

// Shortest text that reads back to the same double.
std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return format_double(v.get<double>());
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    return s;
}

}  // namespace

const char* tool_version() { return TDW_VERSION; }

StudyTolerances StudyTolerances::from_config(const KeyValueConfig& config) {
    StudyTolerances t;
    t.pushed_rel = config.get_double("tol.pushed_rel", t.pushed_rel);
    t.boundary_rel = config.get_double("tol.boundary_rel", t.boundary_rel);
    t.bracket_rel = config.get_double("tol.bracket_rel", t.bracket_rel);
    t.k0_exact = config.get_double("tol.k0_exact", t.k0_exact);
    t.cbar_min = config.get_double("tol.cbar_min", t.cbar_min);
    t.mass_rel = config.get_double("tol.mass_rel", t.mass_rel);
    t.beta_rel = config.get_double("tol.beta_rel", t.beta_rel);
    t.beta_min_k = config.get_double("tol.beta_min_k", t.beta_min_k);
    t.eps_uniform_rel = config.get_double("tol.eps_uniform_rel", t.eps_uniform_rel);
    t.eps_profile_abs = config.get_double("tol.eps_profile_abs", t.eps_profile_abs);
    for (const auto& [key, value] : config.with_prefix("tol.")) {
        static const char* known[] = {"pushed_rel", "boundary_rel", "bracket_rel", "k0_exact", "cbar_min",
                                      "mass_rel", "beta_rel", "beta_min_k", "eps_uniform_rel", "eps_profile_abs"};
        if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return key == s; }) ==
            std::end(known))
            throw ConfigError(config.origin() + ": unknown tolerance 'tol." + key + "'");
    }
    return t;
}

json StudyTolerances::to_json() const {
    return json{{"pushed_rel", pushed_rel}, {"boundary_rel", boundary_rel},
                {"bracket_rel", bracket_rel}, {"k0_exact", k0_exact},
                {"cbar_min", cbar_min}, {"mass_rel", mass_rel},
                {"beta_rel", beta_rel}, {"beta_min_k", beta_min_k},
                {"eps_uniform_rel", eps_uniform_rel}, {"eps_profile_abs", eps_profile_abs}};
}

bool StudyRow::passed() const {
    return error.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool StudyReport::passed() const {
    // A failed solve always counts against the study.
    return std::all_of(rows.begin(), rows.end(), [](const StudyRow& r) { return r.passed(); });
}

json StudyReport::to_json() const {
    json out{{"study_id", study_id}, {"passed", passed()}, {"parameters", parameters}, {"provenance", provenance}};
    out["labels"] = labels;
    json rs = json::array();
    for (const auto& r : rows) {
        json j{{"values", r.values}, {"asserted", r.asserted()}, {"pass", r.passed()}};
        json cs = json::array();
        for (const auto& c : r.checks)
            cs.push_back(json{{"name", c.name}, {"tolerance", c.tolerance}, {"value", c.value}, {"pass", c.passed}});
        j["checks"] = cs;
        j["error"] = r.error.empty() ? json(nullptr) : json(r.error);
        rs.push_back(j);
    }
    out["rows"] = rs;
    json ts = json::array();
    for (const auto& t : tables) ts.push_back(json{{"name", t.name}, {"columns", t.columns}, {"rows", t.rows.size()}});
    out["tables"] = ts;
    return out;
}

std::string study_csv(const StudyReport& report) {
    std::string out;
    for (const auto& col : report.columns) out += col + ",";
    out += "checks,asserted,pass,error\n";
    for (const auto& r : report.rows) {
        for (const auto& col : report.columns) {
            out += r.values.contains(col) ? format_cell(r.values[col]) : "";
            out += ",";
        }
        std::string checks;
        for (const auto& c : r.checks) {
            char buf[64];
            std::snprintf(buf, sizeof buf, ":%.3g:", c.tolerance);
            checks += (checks.empty() ? "" : ";") + c.name + buf + (c.passed ? "pass" : "FAIL");
        }
        out += format_cell(checks) + "," + (r.asserted() ? "true" : "false") + "," + (r.passed() ? "true" : "false") +
               "," + format_cell(r.error) + "\n";
    }
    return out;
}

std::vector<std::filesystem::path> write_study(const StudyReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const auto put = [&](const std::filesystem::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw FileFormatError("cannot write " + p.string());
        f << text;
        written.push_back(p);
    };
    put(dir / (report.study_id + ".csv"), study_csv(report));
    for (const auto& t : report.tables) {
        std::string text;
        for (std::size_t i = 0; i < t.columns.size(); ++i) text += (i ? "," : "") + t.columns[i];
        text += "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_double(row[i]);
            text += "\n";
        }
        put(dir / (report.study_id + "_" + t.name + ".csv"), text);
    }
    put(dir / (report.study_id + ".summary.json"), report.to_json().dump(2) + "\n");
    return written;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g(300);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -6.0 + (6.0 - 0.02) * static_cast<double>(i) / 299.0;
    return g;
}

StudyReport decay_regime_table(double gamma, std::vector<double> k_list, std::vector<double> lambda_grid,
                               const StudyTolerances& tol, const SweepOptions& opts) {
    make_params(gamma, 1.0).validate();
    require_positive_list(k_list, "k_list");
    k_list = sorted_unique(std::move(k_list));
    if (lambda_grid.empty()) lambda_grid = default_lambda_grid();
    for (double l : lambda_grid) {
        if (!(std::isfinite(l) && l < 0.0)) throw DomainError("lambda_grid entries must be negative");
    }
    lambda_grid = sorted_unique(std::move(lambda_grid));

    StudyReport rep;
    rep.study_id = "decay-table";
    rep.parameters = json{{"gamma", gamma}, {"k_list", k_list}, {"lambda_grid_size", lambda_grid.size()},
                          {"lambda_min", lambda_grid.front()}, {"lambda_max", lambda_grid.back()}};
    rep.provenance = base_provenance();
    rep.provenance["tolerances"] = tol.to_json();
    rep.columns = {"gamma", "k", "k0", "c_inf", "c_lin", "lambda_lin", "lambda_inf", "lambda_star",
                   "expected", "ordering", "min_cbar", "argmin_lambda"};

    const double k0 = k_zero(gamma);
    const double cinf = c_infinity(gamma);
    std::vector<std::vector<std::vector<double>>> curves(k_list.size());
    rep.rows = run_rows(k_list.size(), opts, [&](std::size_t i, StudyRow& row) {
        const double k = k_list[i];
        const auto p = make_params(gamma, k);
        row.values = json{{"gamma", gamma}, {"k", k}, {"k0", k0}, {"c_inf", cinf}};
        const auto lin = linear_selection_point(p);
        const auto ord = decay_ordering(p);
        double min_cbar = INFINITY;
        double argmin = 0.0;
        for (double l : lambda_grid) {
            const double cb = c_bar(l, p);
            curves[i].push_back({k, l, cb});
            if (cb < min_cbar) {
                min_cbar = cb;
                argmin = l;
            }
        }
        row.values.update(json{{"c_lin", lin.c_lin}, {"lambda_lin", lin.lambda_lin},
                               {"lambda_inf", ord.lambda_inf}, {"lambda_star", ord.lambda_star},
                               {"expected", to_symbol(ord.expected)}, {"ordering", to_symbol(ord.observed)},
                               {"min_cbar", min_cbar}, {"argmin_lambda", argmin}});
        row.checks.push_back(make_check("ordering_matches_sign", 0.0, ord.observed == ord.expected ? 0.0 : 1.0,
                                        ord.observed == ord.expected && !ord.violation));
        if (ord.violation) row.error = *ord.violation;
        row.checks.push_back(make_check("cbar_geq_clin", tol.cbar_min, lin.c_lin - min_cbar,
                                        min_cbar >= lin.c_lin - tol.cbar_min));
        if (ord.expected == Ordering::Equal) {
            const double d = std::fabs(lin.c_lin - cinf);
            row.checks.push_back(make_check("k0_clin_eq_cinf", tol.k0_exact, d, d <= tol.k0_exact));
        }
    });
    Table t{"cbar", {"k", "lambda", "c_bar"}, {}};
    for (auto& c : curves) t.rows.insert(t.rows.end(), c.begin(), c.end());
    rep.tables.push_back(std::move(t));
    return rep;
}

StudyReport selection_sweep(double gamma, std::vector<double> k_list, const SimConfig& base,
                            const StudyTolerances& tol, const SweepOptions& opts) {
    make_params(gamma, 1.0).validate();
    require_positive_list(k_list, "k_list");
    k_list = sorted_unique(std::move(k_list));

    StudyReport rep;
    rep.study_id = "selection-sweep";
    rep.parameters = json{{"gamma", gamma}, {"k_list", k_list}, {"init", "Step"}};
    rep.provenance = base_provenance();
    rep.provenance["sim_config"] = sim_json(base);
    rep.provenance["tolerances"] = tol.to_json();
    rep.labels.push_back(
        "Measured speeds for k >= k0 validate the conjectured selection of c_inf by the PDE; "
        "this is an experiment, not a theorem check. For k < k0 only the proven bracket is asserted.");
    rep.columns = {"gamma", "k", "k0", "regime", "dt", "speed", "speed_stderr", "drift", "c_inf", "c_lin",
                   "rel_dev_c_inf", "rel_dev_c_lin", "bracket_lo", "bracket_hi", "recenters"};

    const double k0 = k_zero(gamma);
    const double cinf = c_infinity(gamma);
    rep.rows = run_rows(k_list.size(), opts, [&](std::size_t i, StudyRow& row) {
        const double k = k_list[i];
        const auto p = make_params(gamma, k);
        const auto lin = linear_selection_point(p);
        const double rel_k = (k - k0) / k0;
        const std::string regime = std::fabs(rel_k) <= 1e-12 ? "boundary" : (rel_k > 0 ? "pushed" : "unresolved");
        SimConfig cfg = base;
        cfg.dt = std::min(base.dt, 0.9 * 0.5 / (1.0 + gamma * k));
        if (cfg.scheme == Scheme::ExplicitRK2) cfg.dt = std::min(cfg.dt, 0.4 * cfg.dx * cfg.dx);
        const double lo = lin.c_lin * (1.0 - tol.bracket_rel);
        const double hi = cinf * (1.0 + tol.bracket_rel);
        row.values = json{{"gamma", gamma}, {"k", k}, {"k0", k0}, {"regime", regime}, {"dt", cfg.dt},
                          {"c_inf", cinf}, {"c_lin", lin.c_lin}, {"bracket_lo", lo}, {"bracket_hi", hi}};

        InitialSpec init;
        init.kind = InitialKind::Step;
        const auto res = simulate(p, cfg, initial_condition(init, Grid::from_config(cfg)));
        const auto est = estimate_front_speed(res.trace);
        const double dev_inf = (est.value - cinf) / cinf;
        row.values.update(json{{"speed", est.value}, {"speed_stderr", est.std_error}, {"drift", est.drift},
                               {"rel_dev_c_inf", dev_inf}, {"rel_dev_c_lin", (est.value - lin.c_lin) / lin.c_lin},
                               {"recenters", res.trace.recenters.size()}});
        if (regime == "pushed") {
            row.checks.push_back(make_check("speed_near_c_inf", tol.pushed_rel, std::fabs(dev_inf),
                                            std::fabs(dev_inf) < tol.pushed_rel));
        } else if (regime == "boundary") {
            row.checks.push_back(make_check("speed_near_c_inf_at_k0", tol.boundary_rel, std::fabs(dev_inf),
                                            std::fabs(dev_inf) < tol.boundary_rel));
        } else {
            row.checks.push_back(make_check("speed_in_bracket", tol.bracket_rel, est.value,
                                            est.value >= lo && est.value <= hi));
        }
    });
    return rep;
}

StudyReport large_k_convergence(double c, double gamma, std::vector<double> k_list, const BvpConfig& bvp,
                                const StudyTolerances& tol, const SweepOptions& opts) {
    make_params(gamma, 1.0).validate();
    require_positive_list(k_list, "k_list");
    k_list = sorted_unique(std::move(k_list));
    const StefanWave stefan = stefan_wave(c, gamma);  // throws below c_inf
    const double xs = stefan.half_point_offset();
    const double tail = c * gamma;

    StudyReport rep;
    rep.study_id = "large-k";
    rep.parameters = json{{"c", c}, {"gamma", gamma}, {"k_list", k_list}, {"beta", stefan.beta},
                          {"alpha", stefan.alpha}, {"free_boundary", xs}};
    rep.provenance = base_provenance();
    rep.provenance["bvp_config"] = bvp_json(bvp);
    rep.provenance["tolerances"] = tol.to_json();
    rep.labels.push_back("x is normalized by u(0) = 1/2; the Stefan free boundary then sits at x_s = ln2/alpha.");
    rep.labels.push_back(
        "w_jump_estimate = mean of w_k exp((x-x_s)/(c gamma)) over (x_s, x_s+0.5), which equals beta on the limit.");
    rep.columns = {"c", "gamma", "k", "sup_u_minus_U", "l1_w_minus_W", "mass", "mass_k_over_c", "beta",
                   "w_jump_estimate", "w_jump_rel_err", "w_raw_mean", "w_tail_estimate", "phi1_minus_c", "nodes"};

    rep.rows = run_rows(k_list.size(), opts, [&](std::size_t i, StudyRow& row) {
        const double k = k_list[i];
        const auto p = make_params(gamma, k);
        row.values = json{{"c", c}, {"gamma", gamma}, {"k", k}, {"beta", stefan.beta}};
        const WaveProfile wave = solve_tw_bvp(c, p, bvp);
        double sup = 0.0;
        for (std::size_t j = 0; j < wave.size(); ++j)
            sup = std::max(sup, std::fabs(wave.u[j] - stefan.u_normalized(wave.x[j])));
        double l1 = 0.0;
        for (std::size_t j = 0; j + 1 < wave.size(); ++j) {
            const double a = std::max(wave.x[j], -10.0);
            const double b = std::min(wave.x[j + 1], 10.0);
            if (b <= a) continue;
            const double da = std::fabs(interpolate(wave.x, wave.w, a) - stefan.w_normalized(a));
            const double db = std::fabs(interpolate(wave.x, wave.w, b) - stefan.w_normalized(b));
            l1 += 0.5 * (da + db) * (b - a);
        }
        const double mass = mass_identity(wave);
        const double ratio = mass * k / c;
        const auto detrend = [&](double x, double w) { return w * std::exp((x - xs) / tail); };
        const auto plain = [](double, double w) { return w; };
        const double jump = window_integral(wave.x, wave.w, xs, xs + 0.5, detrend) / 0.5;
        const double raw = window_integral(wave.x, wave.w, xs, xs + 0.5, plain) / 0.5;
        const double tail_est = window_integral(wave.x, wave.w, xs + 0.5, xs + 1.0, detrend) / 0.5;
        const double jump_err = std::fabs(jump - stefan.beta) / stefan.beta;
        const auto vp = volpert_functionals(wave, 0.0, p);
        row.values.update(json{{"sup_u_minus_U", sup}, {"l1_w_minus_W", l1}, {"mass", mass},
                               {"mass_k_over_c", ratio}, {"w_jump_estimate", jump}, {"w_jump_rel_err", jump_err},
                               {"w_raw_mean", raw}, {"w_tail_estimate", tail_est},
                               {"phi1_minus_c", vp.phi1_max - c}, {"nodes", wave.size()}});
        row.checks.push_back(make_check("mass_identity", tol.mass_rel, std::fabs(ratio - 1.0),
                                        std::fabs(ratio - 1.0) <= tol.mass_rel));
        if (k >= tol.beta_min_k)
            row.checks.push_back(make_check("w_jump_near_beta", tol.beta_rel, jump_err, jump_err <= tol.beta_rel));
    });
    // Uniform convergence is judged across rows, so it is attached after the sweep.
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        auto& cur = rep.rows[i];
        const auto& prev = rep.rows[i - 1];
        const bool have = cur.values.contains("sup_u_minus_U") && prev.values.contains("sup_u_minus_U");
        const double a = have ? prev.values["sup_u_minus_U"].get<double>() : NAN;
        const double b = have ? cur.values["sup_u_minus_U"].get<double>() : NAN;
        cur.checks.push_back(make_check("sup_strictly_decreasing", 0.0, b - a, have && b < a));
    }
    return rep;
}

StudyReport eps_speed_bounds(double gamma, double k, std::vector<double> eps_list, double c_profile,
                             const BvpConfig& bvp, const StudyTolerances& tol, const SweepOptions& opts) {
    const auto p = make_params(gamma, k);
    p.validate();
    if (eps_list.empty()) throw DomainError("eps_list is empty");
    for (double e : eps_list) {
        if (!(e > 0.0)) throw DomainError("eps_list entries must be positive");
        p.with_eps(e).validate();
    }
    eps_list = sorted_unique(std::move(eps_list));

    StudyReport rep;
    rep.study_id = "eps-bounds";
    rep.parameters = json{{"gamma", gamma}, {"k", k}, {"eps_list", eps_list}, {"c_profile", c_profile}};
    rep.provenance = base_provenance();
    rep.provenance["bvp_config"] = bvp_json(bvp);
    rep.provenance["tolerances"] = tol.to_json();
    rep.provenance["trial_grid"] = json{{"x_min", -40.0}, {"x_max", 40.0}, {"dx", 1e-3}};
    rep.labels.push_back("All speed columns are upper bounds on the minimal eps-speed, not the speed itself.");
    rep.columns = {"gamma", "k", "eps", "trial_phi1", "trial_phi2", "trial_upper_bound", "c_profile",
                   "wave_phi1", "wave_phi2", "wave_upper_bound", "eps0_wave_phi2", "eps0_wave_C"};

    std::vector<double> grid(80001);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = -40.0 + 1e-3 * static_cast<double>(i);
    const TrialSamples trial = glued_exponential_trial_pair(grid);
    const WaveProfile wave0 = solve_tw_bvp(c_profile, p, bvp);

    rep.rows = run_rows(eps_list.size(), opts, [&](std::size_t i, StudyRow& row) {
        const double eps = eps_list[i];
        row.values = json{{"gamma", gamma}, {"k", k}, {"eps", eps}, {"c_profile", c_profile}};
        const auto tr = volpert_functionals(trial, eps, p);
        row.values.update(json{{"trial_phi1", tr.phi1_max}, {"trial_phi2", tr.phi2_max},
                               {"trial_upper_bound", tr.speed_bound}});
        row.checks.push_back(make_check("trial_bound_finite", 0.0, tr.speed_bound, std::isfinite(tr.speed_bound)));
        const auto z = volpert_functionals(wave0, eps, p);
        row.values.update(json{{"eps0_wave_phi2", z.phi2_max}, {"eps0_wave_C", (z.phi2_max - c_profile) / eps}});
        const WaveProfile wave = solve_tw_bvp_eps(c_profile, eps, p, bvp);
        const auto wr = volpert_functionals(wave, eps, p);
        row.values.update(json{{"wave_phi1", wr.phi1_max}, {"wave_phi2", wr.phi2_max},
                               {"wave_upper_bound", wr.speed_bound}});
    });
    // eps-uniformity and the eps -> 0 limit are relations between rows.
    const auto& smallest = rep.rows.front();
    const bool have_ref = smallest.values.contains("trial_upper_bound");
    const double ref = have_ref ? smallest.values["trial_upper_bound"].get<double>() : NAN;
    for (auto& row : rep.rows) {
        if (!row.values.contains("trial_upper_bound")) continue;
        const double spread = std::fabs(row.values["trial_upper_bound"].get<double>() - ref) / ref;
        row.checks.push_back(make_check("trial_bound_eps_uniform", tol.eps_uniform_rel, spread,
                                        have_ref && spread <= tol.eps_uniform_rel));
    }
    auto& first = rep.rows.front();
    const bool have_wave = first.values.contains("wave_upper_bound");
    const double d = have_wave ? std::fabs(first.values["wave_upper_bound"].get<double>() - c_profile) : NAN;
    first.checks.push_back(make_check("wave_bound_near_c", tol.eps_profile_abs, d, have_wave && d <= tol.eps_profile_abs));
    return rep;
}

}  // namespace tdw
