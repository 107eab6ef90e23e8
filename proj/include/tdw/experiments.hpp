#pragma once

// Parameter studies over the dispersion, profile and simulation modules.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdw/bvp.hpp"
#include "tdw/config.hpp"
#include "tdw/pdesim.hpp"

namespace tdw {

/// Declared tolerances; defaults are the acceptance values.
struct StudyTolerances {
    double pushed_rel{0.02};        ///< selection: |speed - c_inf| / c_inf for k > k0
    double boundary_rel{0.03};      ///< selection at k = k0
    double bracket_rel{0.02};       ///< selection bracket [c_lin (1 - r), c_inf (1 + r)] for k < k0
    double k0_exact{1e-10};         ///< decay table: |c_lin - c_inf| at k0
    double cbar_min{1e-8};          ///< decay table: min c_bar >= c_lin - cbar_min
    double mass_rel{0.01};          ///< large-k: |mass k / c - 1|
    double beta_rel{0.05};          ///< large-k: jump estimate vs beta
    double beta_min_k{1000.0};      ///< large-k: beta is asserted for k >= this
    double eps_uniform_rel{0.05};   ///< eps-bounds: trial bound spread relative to the smallest-eps bound
    double eps_profile_abs{1e-2};   ///< eps-bounds: computed-wave bound vs c at the smallest eps

    /// Reads `tol.<field>` keys; absent keys keep their defaults.
    static StudyTolerances from_config(const KeyValueConfig& config);
    nlohmann::ordered_json to_json() const;
};

struct Check {
    std::string name;
    double tolerance{};
    double value{};                 ///< the quantity compared against tolerance
    bool passed{};
};

struct StudyRow {
    nlohmann::ordered_json values; ///< parameter tuple first, then results
    std::vector<Check> checks;      ///< empty for recorded-only rows
    std::string error;              ///< solver failure; the row then fails

    bool asserted() const { return !checks.empty(); }
    bool passed() const;
};

/// Plot-ready auxiliary data, one CSV per table.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct StudyReport {
    std::string study_id;
    nlohmann::ordered_json parameters;
    nlohmann::ordered_json provenance;
    std::vector<std::string> columns;  ///< column order of StudyRow::values
    std::vector<StudyRow> rows;         ///< sorted by parameter tuple
    std::vector<Table> tables;
    std::vector<std::string> labels;

    bool passed() const;                ///< every asserted row passed
    nlohmann::ordered_json to_json() const;
};

/// Worker threads for sweep rows; 0 means hardware concurrency.
struct SweepOptions {
    unsigned workers{0};
};

/**
 * Closed-form quantities per k: c_bar on lambda_grid, (lambda_lin, c_lin),
 * lambda_inf, lambda*_inf and the ordering flag, which is asserted against
 * sign(k - k0). The c_bar curves go to the auxiliary table "cbar".
 */
StudyReport decay_regime_table(double gamma, std::vector<double> k_list, std::vector<double> lambda_grid,
                               const StudyTolerances& tol = {}, const SweepOptions& opts = {});

/// Default lambda grid, -6 .. -0.02 in 300 points.
std::vector<double> default_lambda_grid();

/**
 * Front speed from Step data for each k. Speeds for k >= k0 are validations of
 * the conjectured selection of c_inf; for k < k0 only the bracket is asserted.
 * dt is capped per row at 0.9 times the IMEX stability bound.
 */
StudyReport selection_sweep(double gamma, std::vector<double> k_list, const SimConfig& base,
                            const StudyTolerances& tol = {}, const SweepOptions& opts = {});

/**
 * BVP waves at speed c for each k against the Stefan wave: sup|u_k - U|,
 * L1(w_k - W) on [-10, 10], mass k/c, and the jump estimate: the mean of
 * w_k e^{(x - x_s)/(c gamma)} over (x_s, x_s + 0.5) with x_s the free boundary.
 */
StudyReport large_k_convergence(double c, double gamma, std::vector<double> k_list, const BvpConfig& bvp = {},
                                const StudyTolerances& tol = {}, const SweepOptions& opts = {});

/**
 * Upper bounds on the minimal eps-speed from the Volpert functionals of the
 * glued-exponential trial pair and of the computed eps-wave at speed c_profile.
 * Also records the eps = 0 wave's coefficient C in phi2 <= c + C eps.
 */
StudyReport eps_speed_bounds(double gamma, double k, std::vector<double> eps_list, double c_profile,
                             const BvpConfig& bvp = {}, const StudyTolerances& tol = {},
                             const SweepOptions& opts = {});

/// Writes <dir>/<study_id>.csv, one CSV per auxiliary table and <dir>/<study_id>.summary.json.
std::vector<std::filesystem::path> write_study(const StudyReport& report, const std::filesystem::path& dir);

/// Main table as CSV text: declared columns, then checks, asserted, pass, error.
std::string study_csv(const StudyReport& report);

/// Tool version string stamped into provenance records.
const char* tool_version();

}  // namespace tdw
