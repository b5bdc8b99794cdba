#pragma once

// Serialisation of results: JSON documents for bundles and reports, CSV for
// sampled profiles, trajectories and front traces. Absent bundle constants are
// written as null. CSV numbers use 17 significant digits, JSON numbers the
// shortest representation that reads back to the same double.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nlwave/bounds.hpp"
#include "nlwave/dispersion.hpp"
#include "nlwave/kernels.hpp"
#include "nlwave/simulate.hpp"
#include "nlwave/wave.hpp"

namespace nlwave::io {

using json = nlohmann::ordered_json;

json to_json(const ModelParams& params);
json to_json(const SpeedReport& report);
json to_json(const RootPair& roots);
json to_json(const BoundsBundle& bundle);
json to_json(const VerificationReport& report);
json to_json(const TailReport& report);
json to_json(const ValidationReport& report);
json to_json(const FrontTrace& trace);
json to_json(const DriftReport& report);

BoundsBundle bundle_from_json(const json& doc);

/// Profile metadata without the samples.
json profile_sidecar(const WaveProfile& profile);

void write_json(const std::filesystem::path& path, const json& doc);
json read_json(const std::filesystem::path& path);

/// `z,phi,psi` rows.
void write_profile_csv(const std::filesystem::path& path, const WaveProfile& profile);
/// Reads a profile CSV and its JSON sidecar (same stem, .json extension).
WaveProfile read_profile(const std::filesystem::path& csv_path);

/// `x,U,V` rows.
void write_state_csv(const std::filesystem::path& path, const SimState& state);
/// `t,x_front` rows.
void write_front_csv(const std::filesystem::path& path, const FrontTrace& trace);

/// One CSV per snapshot under `dir` plus manifest.json describing them.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory,
                      json manifest);

/// Formats a double with 17 significant digits.
std::string format_number(double value);

}  // namespace nlwave::io
