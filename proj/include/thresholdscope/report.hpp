#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "thresholdscope/analysis.hpp"
#include "thresholdscope/config.hpp"

namespace ts {

using Json = nlohmann::ordered_json;

const char* version();

// Deterministic report: no timestamps, keys in fixed order, doubles in round-trip form.
Json report_json(const RunConfig& cfg, const Analysis& a);
Json sweep_json(const RunConfig& cfg, const std::vector<CriticalCoupling>& crit);

// Shell samples of one state: r, |Psi(r)|, then real and imaginary parts of each component,
// all with 17 significant digits.
std::string shell_csv(const std::vector<ShellSample>& samples);
// Paths for the states of a report: the configured path for the first, stem.<k>.ext after that.
std::vector<std::string> csv_paths(const std::string& path, std::size_t states);

// Analysis per configuration, writing the JSON report and shell CSV files when configured.
Analysis run_analysis(const RunConfig& cfg);

void write_file(const std::string& path, const std::string& text);

}  // namespace ts
