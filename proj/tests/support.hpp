#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "nlwave/dispersion.hpp"
#include "nlwave/kernels.hpp"

namespace testing {

inline nlwave::ModelParams reference_params() { return {5.0, 1.0, 0.5}; }
inline nlwave::Kernel unit_uniform() { return nlwave::Kernel::uniform(1.0); }

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nlwave_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
