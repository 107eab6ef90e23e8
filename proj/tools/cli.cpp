#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdw/bvp.hpp"
#include "tdw/config.hpp"
#include "tdw/dispersion.hpp"
#include "tdw/errors.hpp"
#include "tdw/experiments.hpp"
#include "tdw/pdesim.hpp"
#include "tdw/profile_io.hpp"
#include "tdw/shooting.hpp"
#include "tdw/stefan.hpp"

namespace tdw::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Invalid combinations of otherwise well-formed flags.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest text that reads back to the same double.
std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

// A real number or the keyword `cinf`.
double resolve_speed(const std::string& text, double gamma) {
    if (text == "cinf") return c_infinity(gamma);
    try {
        return parse_double(text);
    } catch (const FileFormatError&) {
        throw UsageError("--c expects a number or 'cinf', got '" + text + "'");
    }
}

struct Streams {
    std::ostream& out;
    std::ostream& err;
    bool json_mode{false};

    std::ostream& text() const { return json_mode ? err : out; }
    void emit(const json& doc) const {
        if (json_mode) out << doc.dump(2) << '\n';
    }
};

void write_manifest(const fs::path& path, const std::string& subcommand, const KeyValueConfig& params,
                    const json& outputs, const json& extra = json::object()) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    json m{{"subcommand", subcommand}, {"tool_version", tool_version()}};
    json p = json::object();
    for (const auto& [key, value] : params.values()) p[key] = value;
    m["parameters"] = p;
    m["outputs"] = outputs;
    for (const auto& [key, value] : extra.items()) m[key] = value;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write manifest " + path.string());
    f << m.dump(2) << '\n';
}

struct Manifest {
    std::string subcommand;
    KeyValueConfig parameters;
    json outputs;
};

Manifest load_manifest(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read manifest " + path.string());
    try {
        const json m = json::parse(f);
        Manifest out;
        out.subcommand = m.at("subcommand").get<std::string>();
        std::string text;
        for (const auto& [key, value] : m.at("parameters").items()) text += key + " = " + value.get<std::string>() + "\n";
        out.parameters = KeyValueConfig::parse(text, path.string());
        out.outputs = m.value("outputs", json::object());
        return out;
    } catch (const json::exception& e) {
        throw ConfigError("malformed manifest " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- dispersion

struct DispersionArgs {
    double gamma{};
    double k{};
    std::optional<std::string> c;
    std::optional<double> lambda;
    bool json{false};
};

int cmd_dispersion(const DispersionArgs& a, const Streams& io) {
    const auto p = make_params(a.gamma, a.k);
    const double cinf = c_infinity(a.gamma);
    const double k0 = k_zero(a.gamma);
    const auto lin = linear_selection_point(p);
    const auto ord = decay_ordering(p);
    const auto bounds = minimal_speed(p);
    const double rel = (a.k - k0) / k0;
    const std::string regime = std::fabs(rel) <= 1e-12 ? "boundary" : (rel > 0 ? "nonlinear" : "unresolved");

    json doc{{"gamma", a.gamma}, {"k", a.k}, {"c_inf", cinf}, {"k0", k0}, {"regime", regime},
             {"c_lin", lin.c_lin}, {"lambda_lin", lin.lambda_lin}, {"lambda_inf", ord.lambda_inf},
             {"lambda_star", ord.lambda_star}, {"ordering", to_symbol(ord.observed)}};
    doc["minimal_speed"] = json{{"lower", bounds.lower}, {"upper", bounds.upper},
                                {"exact", bounds.exact ? json(*bounds.exact) : json(nullptr)}};

    auto& t = io.text();
    t.precision(10);
    t << "gamma = " << a.gamma << ", k = " << a.k << "\n"
      << "c_inf      = " << cinf << "\n"
      << "k0         = " << k0 << "\n"
      << "regime     = " << regime << (regime == "nonlinear" ? " (c_min = c_inf)" : "") << "\n"
      << "c_lin      = " << lin.c_lin << "\n"
      << "lambda_lin = " << lin.lambda_lin << "\n"
      << "lambda_inf = " << ord.lambda_inf << "\n"
      << "lambda*    = " << ord.lambda_star << "\n"
      << "ordering   = lambda_inf " << to_symbol(ord.observed) << " lambda_lin " << to_symbol(ord.observed)
      << " lambda*\n";

    if (a.c) {
        const double c = resolve_speed(*a.c, a.gamma);
        const auto r = dispersion_roots(c, p);
        doc["roots"] = json{{"c", c}, {"class", to_string(r.cls)}, {"lambda_plus", r.lambda_plus},
                            {"lambda_fast", r.lambda_fast}, {"lambda_slow", r.lambda_slow}, {"imag", r.imag}};
        t << "roots at c = " << c << " (" << to_string(r.cls) << "): lambda_plus = " << r.lambda_plus;
        if (r.cls == RootClass::ComplexPair) {
            t << ", complex pair " << r.lambda_slow << " +- " << r.imag << "i\n";
        } else {
            t << ", lambda_fast = " << r.lambda_fast << ", lambda_slow = " << r.lambda_slow << "\n";
        }
    }
    if (a.lambda) {
        const double cb = c_bar(*a.lambda, p);
        doc["c_bar"] = json{{"lambda", *a.lambda}, {"c_bar", cb}};
        t << "c_bar(" << *a.lambda << ") = " << cb << "\n";
    }
    io.emit(doc);
    return kSuccess;
}

// ------------------------------------------------------------------- profile

struct ProfileArgs {
    std::optional<double> gamma;
    std::optional<double> k;
    std::string c{"cinf"};
    std::string method{"bvp"};
    double eps{0.0};
    std::string out{"profile.csv"};
    std::optional<int> intervals;
    double dx{1e-3};
    double half_length{20.0};
    std::optional<std::string> resume;
};

KeyValueConfig resolve_profile(const ProfileArgs& a) {
    KeyValueConfig cfg;
    if (!a.gamma) throw UsageError("profile: --gamma is required");
    if (a.method != "shoot" && a.method != "bvp" && a.method != "bvp-eps" && a.method != "stefan")
        throw UsageError("profile: --method must be one of shoot, bvp, bvp-eps, stefan");
    if (a.method != "stefan" && !a.k) throw UsageError("profile: --k is required for method " + a.method);
    cfg.set("gamma", fmt(*a.gamma));
    if (a.k) cfg.set("k", fmt(*a.k));
    cfg.set("c", a.c);
    cfg.set("method", a.method);
    cfg.set("eps", fmt(a.eps));
    cfg.set("out", a.out);
    cfg.set("intervals", std::to_string(a.intervals.value_or(static_cast<int>(BvpConfig{}.intervals))));
    cfg.set("dx", fmt(a.dx));
    cfg.set("half_length", fmt(a.half_length));
    return cfg;
}

int cmd_profile(const KeyValueConfig& cfg, const Streams& io) {
    const double gamma = cfg.require_double("gamma");
    const std::string method = cfg.require_string("method");
    const double eps = cfg.get_double("eps", 0.0);
    const fs::path out = cfg.require_string("out");
    const double c = resolve_speed(cfg.require_string("c"), gamma);
    BvpConfig bvp;
    bvp.intervals = static_cast<std::size_t>(cfg.get_double("intervals", static_cast<double>(bvp.intervals)));
    const double dx = cfg.get_double("dx", 1e-3);
    const double half = cfg.get_double("half_length", 20.0);
    const double k = cfg.get_double("k", 1.0);
    cfg.require_all_used();

    fs::path manifest = out;
    manifest.replace_extension(".manifest.json");
    write_manifest(manifest, "profile", cfg, json{{"profile", out.string()}, {"sidecar", metadata_path(out).string()}});

    auto& t = io.text();
    t.precision(10);
    json doc{{"method", method}, {"gamma", gamma}, {"c", c}, {"profile", out.string()},
             {"sidecar", metadata_path(out).string()}, {"manifest", manifest.string()}};

    if (method == "stefan") {
        const auto s = stefan_wave(c, gamma);
        if (!(dx > 0.0 && half > 0.0)) throw UsageError("profile: --dx and --half-length must be positive");
        std::vector<double> x;
        const auto n = static_cast<std::size_t>(std::llround(2.0 * half / dx));
        for (std::size_t i = 0; i <= n; ++i) x.push_back(-half + static_cast<double>(i) * dx);
        save_profile(sample_stefan(s, x), out);
        doc.update(json{{"alpha", s.alpha}, {"beta", s.beta}, {"jump_defect", s.jump_defect()},
                        {"free_boundary", s.half_point_offset()}, {"nodes", x.size()}});
        t << "Stefan-limit wave at c = " << c << ", gamma = " << gamma << "\n"
          << "alpha = " << s.alpha << "\nbeta  = " << s.beta << "\njump defect gamma c (1-beta) - alpha = "
          << s.jump_defect() << "\nwrote " << out.string() << " (" << x.size() << " nodes)\n";
        io.emit(doc);
        return kSuccess;
    }

    const auto p = make_params(gamma, k);
    doc["k"] = k;
    WaveProfile wave;
    if (method == "shoot") {
        if (std::fabs(c - c_infinity(gamma)) > 1e-12 * c_infinity(gamma))
            throw UsageError("profile: method shoot constructs the c_inf wave only; use --c cinf");
        wave = shoot_reduced_wave(p);
    } else if (method == "bvp") {
        wave = solve_tw_bvp(c, p, bvp);
    } else {
        wave = solve_tw_bvp_eps(c, eps, p, bvp);
    }
    save_profile(wave, out);
    doc["eps"] = wave.eps;
    doc["nodes"] = wave.size();
    doc["solver_residual"] = wave.solver_residual;

    t << to_string(wave.method) << " wave: gamma = " << gamma << ", k = " << k << ", c = " << c;
    if (wave.eps > 0.0) t << ", eps = " << wave.eps;
    t << "\nnodes = " << wave.size() << ", x in [" << wave.x.front() << ", " << wave.x.back() << "]\n"
      << "solver residual = " << wave.solver_residual << "\n";
    if (wave.eps == 0.0) {
        const auto r = full_tw_residual(wave);
        doc["residual_u"] = r.res_u;
        doc["residual_w"] = r.res_w;
        t << "travelling-wave residual: u " << r.res_u << ", w " << r.res_w << "\n";
    }

    const auto roots = dispersion_roots(c, p);
    const auto mn = mu_nu(c, p);
    json fits = json::object();
    try {
        const auto f = fit_decay_rate(wave, Side::PlusInfinity, Component::U);
        fits["plus_u"] = json{{"rate", f.rate}, {"r_squared", f.r_squared}, {"nodes", f.nodes},
                              {"lambda_slow", roots.lambda_slow}, {"lambda_fast", roots.lambda_fast}};
        t << "decay of u at +inf: " << f.rate << " (cubic roots " << roots.lambda_slow << ", " << roots.lambda_fast
          << ")\n";
    } catch (const Error& e) {
        fits["plus_u"] = json{{"error", e.what()}};
        t << "decay of u at +inf: not fitted (" << e.what() << ")\n";
    }
    try {
        const auto f = fit_decay_rate(wave, Side::MinusInfinity, Component::OneMinusU);
        fits["minus_one_minus_u"] = json{{"rate", f.rate}, {"r_squared", f.r_squared}, {"nodes", f.nodes},
                                         {"mu", mn.mu}, {"k_over_c", k / c}};
        t << "decay of 1-u at -inf: " << f.rate << " (mu = " << mn.mu << ", k/c = " << k / c << ")\n";
    } catch (const Error& e) {
        fits["minus_one_minus_u"] = json{{"error", e.what()}};
        t << "decay of 1-u at -inf: not fitted (" << e.what() << ")\n";
    }
    doc["decay_fits"] = fits;
    if (wave.eps == 0.0) {
        const double m = mass_identity(wave);
        doc["mass"] = json{{"integral", m}, {"expected", c / k}, {"rel_error", (m - c / k) / (c / k)}};
        t << "mass integral u(1-w) = " << m << " (c/k = " << c / k << ", rel. error " << (m - c / k) / (c / k)
          << ")\n";
        const auto b = check_apriori_bounds(wave);
        doc["apriori_bounds"] = json{{"u_mu", b.u_mu_ok}, {"u_nu", b.u_nu_ok}, {"w", b.w_ok},
                                     {"margin_u_mu", b.margin_u_mu}, {"margin_u_nu", b.margin_u_nu},
                                     {"margin_w", b.margin_w}};
        t << "a-priori bounds: " << (b.u_mu_ok && b.u_nu_ok && b.w_ok ? "hold" : "VIOLATED") << "\n";
    }
    t << "wrote " << out.string() << " and " << metadata_path(out).string() << "\n";
    io.emit(doc);
    return kSuccess;
}

// ------------------------------------------------------------------ simulate

struct SimSetup {
    ModelParams params;
    SimConfig config;
    InitialSpec init;
    double window_fraction{0.7};
    KeyValueConfig resolved;
};

SimSetup resolve_simulation(const KeyValueConfig& in) {
    SimSetup s;
    const SimConfig d;
    auto& c = s.config;
    const double gamma = in.require_double("gamma");
    const double k = in.require_double("k");
    const double eps = in.get_double("eps", 0.0);
    c.domain_length = in.get_double("domain_length", d.domain_length);
    c.dx = in.get_double("dx", d.dx);
    c.dt = in.get_double("dt", d.dt);
    c.t_end = in.get_double("t_end", d.t_end);
    c.scheme = scheme_from_string(in.get_string("scheme", to_string(d.scheme)));
    c.moving_window = in.get_bool("moving_window", d.moving_window);
    c.x_min = in.get_double("x_min", d.x_min);
    c.record_interval = in.get_double("record_interval", d.record_interval);
    c.recenter_trigger = in.get_double("recenter_trigger", d.recenter_trigger);
    c.recenter_target = in.get_double("recenter_target", d.recenter_target);
    c.snapshot_interval = in.get_double("snapshot_interval", d.snapshot_interval);
    s.init.kind = initial_kind_from_string(in.get_string("init", "Step"));
    s.init.x0 = in.get_double("init_x0", 0.0);
    s.init.rate = in.get_double("init_rate", 1.0);
    s.init.path = in.get_string("init_path", "");
    s.window_fraction = in.get_double("window_fraction", 0.7);
    in.require_all_used();
    try {
        s.params = make_params(gamma, k, eps);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    c.validate(s.params);
    if (s.init.kind == InitialKind::ProfileFile && s.init.path.empty())
        throw ConfigError("init = ProfileFile needs init_path");

    auto& r = s.resolved;
    r.set("gamma", fmt(gamma));
    r.set("k", fmt(k));
    r.set("eps", fmt(eps));
    r.set("domain_length", fmt(c.domain_length));
    r.set("dx", fmt(c.dx));
    r.set("dt", fmt(c.dt));
    r.set("t_end", fmt(c.t_end));
    r.set("scheme", to_string(c.scheme));
    r.set("moving_window", c.moving_window ? "true" : "false");
    r.set("x_min", fmt(c.x_min));
    r.set("record_interval", fmt(c.record_interval));
    r.set("recenter_trigger", fmt(c.recenter_trigger));
    r.set("recenter_target", fmt(c.recenter_target));
    r.set("snapshot_interval", fmt(c.snapshot_interval));
    r.set("init", to_string(s.init.kind));
    r.set("init_x0", fmt(s.init.x0));
    r.set("init_rate", fmt(s.init.rate));
    r.set("init_path", s.init.path.string());
    r.set("window_fraction", fmt(s.window_fraction));
    return s;
}

int cmd_simulate(const SimSetup& s, const fs::path& out_dir, const Streams& io) {
    const fs::path trace_path = out_dir / "trace.csv";
    const fs::path summary_path = out_dir / "summary.json";
    const fs::path manifest_path = out_dir / "manifest.json";
    fs::create_directories(out_dir);
    std::optional<SnapshotSink> sink;
    json outputs{{"trace", trace_path.string()}, {"summary", summary_path.string()}};
    if (s.config.snapshot_interval > 0.0) {
        sink = SnapshotSink{out_dir / "snapshots"};
        fs::create_directories(sink->directory);
        outputs["snapshots"] = sink->directory.string();
    }
    json solver{{"scheme", to_string(s.config.scheme)}, {"nodes", s.config.nodes()},
                {"steps", static_cast<long long>(std::llround(s.config.t_end / s.config.dt))}};
    write_manifest(manifest_path, "simulate", s.resolved, outputs, json{{"solver", solver}});

    const Grid grid = Grid::from_config(s.config);
    const auto init = initial_condition(s.init, grid);
    const auto res = simulate(s.params, s.config, init, sink);
    write_trace_csv(res.trace, trace_path);
    const auto est = estimate_front_speed(res.trace, s.window_fraction);

    const double gamma = s.params.gamma;
    const double k = s.params.k;
    const double cinf = c_infinity(gamma);
    const double k0 = k_zero(gamma);
    const auto lin = linear_selection_point(s.params);
    json doc{{"trace", trace_path.string()}, {"summary", summary_path.string()}, {"manifest", manifest_path.string()}};
    doc["speed"] = json{{"value", est.value}, {"stderr", est.std_error}, {"t_lo", est.t_lo}, {"t_hi", est.t_hi},
                        {"drift", est.drift}, {"samples", est.samples}};
    doc["reference"] = json{{"c_inf", cinf}, {"c_lin", lin.c_lin}, {"k0", k0},
                            {"rel_dev_c_inf", (est.value - cinf) / cinf},
                            {"label", k >= k0 ? "validation of the conjectured selection of c_inf (not a theorem)"
                                              : "k < k0: only the bracket [c_lin, c_inf] is proven"}};
    doc["diagnostics"] = json{{"steps", res.diagnostics.steps}, {"min_value", res.diagnostics.min_value},
                              {"max_value", res.diagnostics.max_value},
                              {"recenters", res.trace.recenters.size()}, {"snapshots", res.diagnostics.snapshots}};
    {
        std::ofstream f(summary_path, std::ios::binary);
        if (!f) throw FileFormatError("cannot write " + summary_path.string());
        f << doc.dump(2) << '\n';
    }

    auto& t = io.text();
    t.precision(8);
    t << "simulated gamma = " << gamma << ", k = " << k;
    if (s.params.eps > 0.0) t << ", eps = " << s.params.eps;
    t << " to t = " << s.config.t_end << " (" << res.diagnostics.steps << " steps, "
      << res.trace.recenters.size() << " recenterings)\n"
      << "front speed = " << est.value << " +- " << est.std_error << " over t in [" << est.t_lo << ", "
      << est.t_hi << "], drift " << est.drift << "\n"
      << "c_inf = " << cinf << " (rel. deviation " << (est.value - cinf) / cinf << "), c_lin = " << lin.c_lin
      << "\n";
    if (k >= k0) t << "note: agreement with c_inf validates a conjecture; PDE speed selection is not proven\n";
    t << "range [" << res.diagnostics.min_value << ", " << res.diagnostics.max_value << "]\n"
      << "wrote " << trace_path.string() << ", " << summary_path.string() << "\n";
    io.emit(doc);
    return kSuccess;
}

// --------------------------------------------------------------------- study

const std::vector<std::string> kStudies{"decay-table", "selection-sweep", "large-k", "eps-bounds"};

struct StudyArgs {
    std::string name;
    std::optional<std::string> config;
    std::optional<double> gamma;
    std::optional<std::string> ks;
    std::optional<double> k;
    std::optional<std::string> c;
    std::optional<std::string> eps_list;
    std::optional<int> workers;
    std::optional<int> intervals;
    std::optional<std::string> out_dir;
    std::optional<std::string> resume;
};

KeyValueConfig resolve_study(const StudyArgs& a) {
    KeyValueConfig in = a.config ? KeyValueConfig::load(*a.config) : KeyValueConfig{};
    if (a.gamma) in.set("gamma", fmt(*a.gamma));
    if (a.ks) in.set("ks", *a.ks);
    if (a.k) in.set("k", fmt(*a.k));
    if (a.c) in.set("c", *a.c);
    if (a.eps_list) in.set("eps_list", *a.eps_list);
    if (a.intervals) in.set("bvp.intervals", std::to_string(*a.intervals));

    KeyValueConfig r;
    const double gamma = in.get_double("gamma", 1.0);
    r.set("gamma", fmt(gamma));
    const auto& n = a.name;
    if (n == "decay-table") {
        r.set("ks", fmt_list(in.get_list("ks", {1, 3, 10})));
        r.set("lambda_min", fmt(in.get_double("lambda_min", -6.0)));
        r.set("lambda_max", fmt(in.get_double("lambda_max", -0.02)));
        r.set("lambda_points", fmt(in.get_double("lambda_points", 300)));
    } else if (n == "selection-sweep") {
        r.set("ks", fmt_list(in.get_list("ks", {1, 3, 10})));
        const SimConfig d;
        r.set("sim.domain_length", fmt(in.get_double("sim.domain_length", d.domain_length)));
        r.set("sim.dx", fmt(in.get_double("sim.dx", d.dx)));
        r.set("sim.dt", fmt(in.get_double("sim.dt", d.dt)));
        r.set("sim.t_end", fmt(in.get_double("sim.t_end", d.t_end)));
        r.set("sim.x_min", fmt(in.get_double("sim.x_min", d.x_min)));
        r.set("sim.record_interval", fmt(in.get_double("sim.record_interval", d.record_interval)));
        r.set("sim.scheme", to_string(scheme_from_string(in.get_string("sim.scheme", to_string(d.scheme)))));
        r.set("sim.moving_window", in.get_bool("sim.moving_window", d.moving_window) ? "true" : "false");
    } else if (n == "large-k") {
        r.set("c", fmt(resolve_speed(in.get_string("c", "1"), gamma)));
        r.set("ks", fmt_list(in.get_list("ks", {10, 100, 1000})));
        r.set("bvp.intervals", fmt(in.get_double("bvp.intervals", static_cast<double>(BvpConfig{}.intervals))));
    } else {
        r.set("k", fmt(in.get_double("k", 10.0)));
        r.set("c", fmt(resolve_speed(in.get_string("c", "1"), gamma)));
        r.set("eps_list", fmt_list(in.get_list("eps_list", {0.1, 0.01, 0.001})));
        r.set("bvp.intervals", fmt(in.get_double("bvp.intervals", static_cast<double>(BvpConfig{}.intervals))));
    }
    const auto tol = StudyTolerances::from_config(in);
    const json tol_json = tol.to_json();
    for (const auto& [key, value] : tol_json.items()) r.set("tol." + key, fmt(value.get<double>()));
    in.require_all_used();
    return r;
}

int cmd_study(const std::string& name, const KeyValueConfig& p, const fs::path& out_dir, unsigned workers,
              const Streams& io) {
    const auto tol = StudyTolerances::from_config(p);
    write_manifest(out_dir / "manifest.json", "study", p,
                   json{{"report", (out_dir / (name + ".csv")).string()},
                        {"summary", (out_dir / (name + ".summary.json")).string()}},
                   json{{"study", name}, {"tolerances", tol.to_json()}});
    SweepOptions opts;
    opts.workers = workers;
    const double gamma = p.require_double("gamma");
    StudyReport rep;
    if (name == "decay-table") {
        const double lo = p.require_double("lambda_min");
        const double hi = p.require_double("lambda_max");
        const auto pts = static_cast<std::size_t>(p.require_double("lambda_points"));
        if (pts < 2 || !(lo < hi)) throw ConfigError("need lambda_points >= 2 and lambda_min < lambda_max");
        std::vector<double> grid(pts);
        for (std::size_t i = 0; i < pts; ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pts - 1);
        rep = decay_regime_table(gamma, parse_list(p.require_string("ks")), grid, tol, opts);
    } else if (name == "selection-sweep") {
        SimConfig s;
        s.domain_length = p.require_double("sim.domain_length");
        s.dx = p.require_double("sim.dx");
        s.dt = p.require_double("sim.dt");
        s.t_end = p.require_double("sim.t_end");
        s.x_min = p.require_double("sim.x_min");
        s.record_interval = p.require_double("sim.record_interval");
        s.scheme = scheme_from_string(p.require_string("sim.scheme"));
        s.moving_window = p.get_bool("sim.moving_window", true);
        rep = selection_sweep(gamma, parse_list(p.require_string("ks")), s, tol, opts);
    } else if (name == "large-k") {
        BvpConfig b;
        b.intervals = static_cast<std::size_t>(p.require_double("bvp.intervals"));
        rep = large_k_convergence(p.require_double("c"), gamma, parse_list(p.require_string("ks")), b, tol, opts);
    } else {
        BvpConfig b;
        b.intervals = static_cast<std::size_t>(p.require_double("bvp.intervals"));
        rep = eps_speed_bounds(gamma, p.require_double("k"), parse_list(p.require_string("eps_list")),
                               p.require_double("c"), b, tol, opts);
    }
    const auto files = write_study(rep, out_dir);

    auto& t = io.text();
    t << "study " << name << ": " << (rep.passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& l : rep.labels) t << "note: " << l << "\n";
    t << study_csv(rep);
    for (const auto& f : files) t << "wrote " << f.string() << "\n";
    json doc = rep.to_json();
    json fl = json::array();
    for (const auto& f : files) fl.push_back(f.string());
    doc["files"] = fl;
    doc["manifest"] = (out_dir / "manifest.json").string();
    io.emit(doc);
    return rep.passed() ? kSuccess : kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Travelling waves of a reaction-diffusion system with degradation"};
    app.name("tdw");
    app.require_subcommand(1);
    bool json_mode = false;

    auto* disp = app.add_subcommand("dispersion", "closed-form speeds and decay rates");
    DispersionArgs da;
    disp->add_option("--gamma", da.gamma, "gamma > 0")->required();
    disp->add_option("--k", da.k, "k > 0")->required();
    disp->add_option("--c", da.c, "speed for the cubic roots (number or cinf)");
    disp->add_option("--lambda", da.lambda, "lambda < 0 for c_bar");
    disp->add_flag("--json", json_mode, "machine-readable output on stdout");

    auto* prof = app.add_subcommand("profile", "compute and store a travelling-wave profile");
    ProfileArgs pa;
    prof->add_option("--gamma", pa.gamma, "gamma > 0");
    prof->add_option("--k", pa.k, "k > 0");
    prof->add_option("--c", pa.c, "speed (number or cinf)")->capture_default_str();
    prof->add_option("--method", pa.method, "shoot | bvp | bvp-eps | stefan")->capture_default_str();
    prof->add_option("--eps", pa.eps, "regularization for bvp-eps")->capture_default_str();
    prof->add_option("--out", pa.out, "profile CSV path")->capture_default_str();
    prof->add_option("--intervals", pa.intervals, "BVP mesh intervals");
    prof->add_option("--dx", pa.dx, "Stefan sampling step")->capture_default_str();
    prof->add_option("--half-length", pa.half_length, "Stefan sampling half-width")->capture_default_str();
    prof->add_option("--resume", pa.resume, "rerun from a profile manifest");
    prof->add_flag("--json", json_mode, "machine-readable output on stdout");

    auto* sim = app.add_subcommand("simulate", "time-dependent simulation and speed measurement");
    std::optional<std::string> sim_config;
    std::optional<std::string> sim_out;
    std::optional<std::string> sim_resume;
    std::vector<std::string> sim_set;
    sim->add_option("config_file", sim_config, "key = value config file");
    sim->add_option("--config", sim_config, "key = value config file");
    sim->add_option("--out-dir", sim_out, "output directory (default sim_out)");
    sim->add_option("--resume", sim_resume, "rerun from a simulate manifest");
    sim->add_option("--set", sim_set, "override a config entry, key=value");
    sim->add_flag("--json", json_mode, "machine-readable output on stdout");

    auto* study = app.add_subcommand("study", "parameter studies");
    StudyArgs sa;
    study->add_option("name", sa.name, "decay-table | selection-sweep | large-k | eps-bounds");
    study->add_option("--config", sa.config, "key = value file with parameters and tol.* entries");
    study->add_option("--gamma", sa.gamma, "gamma > 0");
    study->add_option("--ks", sa.ks, "comma-separated k values");
    study->add_option("--k", sa.k, "k for eps-bounds");
    study->add_option("--c", sa.c, "speed (number or cinf)");
    study->add_option("--eps-list", sa.eps_list, "comma-separated eps values");
    study->add_option("--workers", sa.workers, "worker threads (0 = all cores)");
    study->add_option("--intervals", sa.intervals, "BVP mesh intervals");
    study->add_option("--out-dir", sa.out_dir, "output directory (default study_<name>)");
    study->add_option("--resume", sa.resume, "rerun from a study manifest");
    study->add_flag("--json", json_mode, "machine-readable output on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* active = &app;
        for (const auto* s : app.get_subcommands()) active = s;
        err << active->help();
        return kUsage;
    }

    const Streams io{out, err, json_mode};
    const auto fail = [&](int code, const std::string& kind, const std::string& msg) {
        err << "error: " << msg << "\n";
        if (json_mode) out << json{{"error", msg}, {"kind", kind}, {"exit_code", code}}.dump(2) << '\n';
        return code;
    };

    try {
        if (disp->parsed()) return cmd_dispersion(da, io);
        if (prof->parsed()) {
            if (pa.resume) {
                const auto m = load_manifest(*pa.resume);
                if (m.subcommand != "profile") throw ConfigError(*pa.resume + " is not a profile manifest");
                return cmd_profile(m.parameters, io);
            }
            return cmd_profile(resolve_profile(pa), io);
        }
        if (sim->parsed()) {
            KeyValueConfig in;
            fs::path out_dir = sim_out.value_or("sim_out");
            if (sim_resume) {
                const auto m = load_manifest(*sim_resume);
                if (m.subcommand != "simulate") throw ConfigError(*sim_resume + " is not a simulate manifest");
                in = m.parameters;
                if (!sim_out && m.outputs.contains("trace"))
                    out_dir = fs::path(m.outputs["trace"].get<std::string>()).parent_path();
            } else {
                if (!sim_config) throw UsageError("simulate: a config file or --resume is required");
                in = KeyValueConfig::load(*sim_config);
            }
            for (const auto& kv : sim_set) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
                in.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
            const auto setup = resolve_simulation(in);
            return cmd_simulate(setup, out_dir, io);
        }
        if (study->parsed()) {
            KeyValueConfig params;
            std::string name = sa.name;
            fs::path out_dir;
            if (sa.resume) {
                const auto m = load_manifest(*sa.resume);
                if (m.subcommand != "study") throw ConfigError(*sa.resume + " is not a study manifest");
                std::ifstream f(*sa.resume);
                name = json::parse(f).value("study", std::string());
                params = m.parameters;
                out_dir = sa.out_dir ? fs::path(*sa.out_dir) : fs::path(*sa.resume).parent_path();
                if (out_dir.empty()) out_dir = ".";
            }
            if (std::find(kStudies.begin(), kStudies.end(), name) == kStudies.end()) {
                throw UsageError("unknown study '" + name +
                                 "'; expected one of decay-table, selection-sweep, large-k, eps-bounds");
            }
            if (!sa.resume) {
                sa.name = name;
                params = resolve_study(sa);
                out_dir = sa.out_dir.value_or("study_" + name);
            }
            return cmd_study(name, params, out_dir, static_cast<unsigned>(sa.workers.value_or(0)), io);
        }
        return fail(kUsage, "usage", "no subcommand");
    } catch (const UsageError& e) {
        return fail(kUsage, "usage", e.what());
    } catch (const ConfigError& e) {
        return fail(kUsage, "config", e.what());
    } catch (const Error& e) {
        return fail(kFailure, "computation", e.what());
    } catch (const std::exception& e) {
        return fail(kFailure, "internal", e.what());
    }
}

}  // namespace tdw::cli
