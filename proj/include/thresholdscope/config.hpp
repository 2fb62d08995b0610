#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thresholdscope/analysis.hpp"
#include "thresholdscope/errors.hpp"

namespace ts {

// Invalid configuration; what() carries the file, line and key.
struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

struct ShellWindow {
    double r1 = 0.0;  // 0 selects 2a for support radius a
    double r2 = 0.0;  // 0 selects 40a
    int count = 16;
};

struct OutputPaths {
    std::string json_path;
    std::string csv_path;
};

struct RunConfig {
    std::string source;
    PotentialSpec spec;
    GridSpec grid;
    ShellWindow shell_window;
    std::optional<Sweep> sweep;
    Tolerances tol;
    double l2_radius = 0.0;
    bool refinement_check = true;
    OutputPaths output;
    std::vector<std::string> warnings;

    std::vector<double> shells() const;
    AnalysisOptions options() const;
};

// YAML document with tables potential, grid, sweep, output (and optional tolerances).
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace ts
