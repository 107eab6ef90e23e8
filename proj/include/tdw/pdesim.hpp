#pragma once

// Time-dependent 1D solver for the reaction-diffusion system, front tracking
// and speed measurement.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tdw/model.hpp"
#include "tdw/profile.hpp"

namespace tdw {

enum class Scheme { IMEX, ExplicitRK2 };

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SimConfig {
    double domain_length{400.0};
    double dx{0.05};
    double dt{0.01};
    double t_end{300.0};
    Scheme scheme{Scheme::IMEX};
    bool moving_window{true};
    double x_min{-50.0};              ///< left end of the initial window
    double record_interval{0.5};      ///< time between front samples
    double recenter_trigger{0.8};     ///< recenter when the front passes this fraction of the window
    double recenter_target{0.5};      ///< ... and move it back to this fraction
    double snapshot_interval{0.0};    ///< 0 disables snapshots

    std::size_t nodes() const;
    /// Throws ConfigError for malformed values and for violated stability bounds.
    void validate(const ModelParams& params) const;
};

/// Uniform grid x_i = x_min + i dx, i = 0..n-1.
struct Grid {
    double x_min{};
    double dx{};
    std::size_t n{};

    double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
    static Grid from_config(const SimConfig& config);
};

enum class InitialKind { Step, ExpDecay, ProfileFile };

const char* to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

struct InitialSpec {
    InitialKind kind{InitialKind::Step};
    double x0{0.0};                    ///< step location, decay origin or profile shift
    double rate{1.0};                  ///< ExpDecay only
    std::filesystem::path path;        ///< ProfileFile only
};

struct InitialCondition {
    InitialKind kind{InitialKind::Step};
    std::vector<double> u;
    std::vector<double> w;
};

/**
 * Step: (1,1) for x < x0 and (0,0) otherwise. ExpDecay: min(1, e^{-rate (x-x0)})
 * in both components. ProfileFile: a stored wave with its x = 0 moved to x0,
 * linearly interpolated; off its grid the end decay rates are continued so the
 * far-field limits are exactly (1,1) and (0,0).
 */
InitialCondition initial_condition(const InitialSpec& spec, const Grid& grid);

struct RecenterEvent {
    double t;
    long shift_nodes;
    double new_x_min;
};

struct FrontTrace {
    std::vector<double> times;
    std::vector<double> positions;     ///< u = 1/2 crossing, absolute coordinates
    std::vector<RecenterEvent> recenters;
};

struct SimDiagnostics {
    std::size_t steps{0};
    double min_value{1.0};             ///< extremes over all steps and nodes
    double max_value{0.0};
    std::size_t snapshots{0};
};

struct SimState {
    Grid grid;
    double t{0.0};
    std::vector<double> u;
    std::vector<double> w;
};

struct SimResult {
    SimState final_state;
    FrontTrace trace;
    SimDiagnostics diagnostics;
};

/// Destination of snapshot frames.
struct SnapshotSink {
    std::filesystem::path directory;   ///< frames written as frame_<index>.csv
};

/**
 * Advances the system from init to config.t_end.
 *
 * IMEX: exact exponential step for w with u frozen (plus implicit eps-diffusion),
 * then implicit diffusion and semi-implicit reaction for u. ExplicitRK2: Heun's
 * method on the method-of-lines system. Dirichlet values (1,1) left, (0,0) right.
 *
 * Initial values within 1e-12 of [0,1] are clamped into it; anything further out
 * is rejected.
 *
 * Throws ConfigError for invalid configs or inits and StabilityViolation if a
 * value becomes non-finite or leaves [0,1] by more than 1e-6.
 */
SimResult simulate(const ModelParams& params, const SimConfig& config, const InitialCondition& init,
                   const std::optional<SnapshotSink>& snapshots = std::nullopt);

/// Rightmost u = 1/2 crossing, linearly interpolated; nullopt if there is none.
std::optional<double> front_position(const Grid& grid, const std::vector<double>& u);

struct SpeedEstimate {
    double value{};
    double std_error{};                ///< standard error of the fitted slope
    double t_lo{};
    double t_hi{};
    double drift{};                    ///< speed change across the window from a quadratic fit
    std::size_t samples{};
};

/**
 * Least-squares line through the trailing window_fraction of the trace
 * (window_fraction <= 0.7, so the first 30% of the run is always excluded).
 * Throws WindowTooShort with fewer than 10 samples in the window and
 * DomainError for window_fraction outside (0, 0.7].
 */
SpeedEstimate estimate_front_speed(const FrontTrace& trace, double window_fraction = 0.7);

struct RadialResidualReport {
    int n{};
    std::vector<double> r;
    std::vector<double> residual;
    double min_residual{};
    double max_residual{};
    std::size_t negative{};            ///< nodes below -1e-10
};

/**
 * Residual of the radial ansatz u(|x| - c t - r_offset - shift) in the u-equation
 * in n dimensions, -((n-1)/|x|) u', sampled on the profile nodes with
 * |x| >= r_offset.
 */
RadialResidualReport radial_supersolution_residual(const WaveProfile& profile, int n, double r_offset,
                                                   double shift = 0.0);

void write_trace_csv(const FrontTrace& trace, const std::filesystem::path& path);
void write_snapshot_csv(const SimState& state, const std::filesystem::path& path);

}  // namespace tdw
