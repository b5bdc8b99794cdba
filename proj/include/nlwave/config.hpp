#pragma once

// Run configuration: one JSON document holding the model parameters, the two
// kernels and one block per command. Unknown keys are rejected; every error
// names the offending field.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlwave/dispersion.hpp"
#include "nlwave/kernels.hpp"

namespace nlwave {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KernelSpec {
    std::string family;  ///< uniform | triangular | truncated_gaussian | laplace | gaussian | tabulated
    double S = 0.0;
    double sigma = 0.0;
    double alpha = 0.0;
    std::filesystem::path table;  ///< resolved path for tabulated kernels

    Kernel build() const;
};

/// A speed given either directly or as a multiple of s*.
struct SpeedChoice {
    std::optional<double> s;
    std::optional<double> s_factor;
    bool critical = false;

    /// Resolves to a number given s*.
    double resolve(double s_star) const;
};

struct SpeedBlock {};

struct RootsBlock {
    SpeedChoice speed;
};

struct BoundsBlock {
    SpeedChoice speed;
    double grid_span = 50.0;
    std::size_t grid_n = 20000;
    double kink_radius = 1e-3;
};

struct WaveBlock {
    SpeedChoice speed;
    double L = 80.0;
    std::size_t n = 8000;
    double tol = 1e-6;
    std::size_t max_iter = 20000;
    double damping = 0.5;
    std::optional<std::filesystem::path> bundle;  ///< reuse a bundle written by `bounds`
};

struct SimulateBlock {
    std::string initial = "invasion";  ///< invasion | wave
    double X = 400.0;
    double h = 0.05;
    double T = 100.0;
    double dt = 0.0;  ///< 0 selects the stability bound
    std::vector<double> levels;  ///< empty: a*/2
    double skip_fraction = 0.3;
    std::size_t snapshot_every = 0;
    std::optional<std::filesystem::path> profile;  ///< required for initial = wave
};

struct ValidateBlock {
    std::vector<std::string> kernels{"J1", "J2"};
};

struct RunConfig {
    ModelParams params;
    KernelSpec J1;
    KernelSpec J2;
    std::optional<SpeedBlock> speed;
    std::optional<RootsBlock> roots;
    std::optional<BoundsBlock> bounds;
    std::optional<WaveBlock> wave;
    std::optional<SimulateBlock> simulate;
    std::optional<ValidateBlock> validate_kernel;
    std::optional<std::filesystem::path> output;
};

/// Relative paths inside the document are resolved against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// The configuration with every default filled in.
nlohmann::ordered_json resolved_json(const RunConfig& config);

}  // namespace nlwave
