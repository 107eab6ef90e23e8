#pragma once

// CSV + JSON sidecar storage of wave profiles.

#include <filesystem>
#include <string>

#include "tdw/profile.hpp"

namespace tdw {

/// Sidecar path next to a profile CSV: "wave.csv" -> "wave.meta.json".
std::filesystem::path metadata_path(const std::filesystem::path& csv);

/// Header `x,u,w`, one node per row, 17 significant digits.
void write_profile_csv(const WaveProfile& profile, const std::filesystem::path& csv);

/**
 * Writes the CSV and its sidecar with gamma, k, eps, c, method, solver_residual
 * and the finite-difference residuals of the stored grid functions.
 */
void save_profile(const WaveProfile& profile, const std::filesystem::path& csv);

/**
 * Reads a profile CSV; metadata is taken from the sidecar when it exists.
 * Throws FileFormatError on a missing file, a bad header, a malformed row or
 * an unreadable sidecar.
 */
WaveProfile load_profile(const std::filesystem::path& csv);

/// Parses a double with from_chars, throwing FileFormatError on trailing garbage.
double parse_double(const std::string& text);

}  // namespace tdw
