#pragma once

#include <map>
#include <string>
#include <vector>

#include "wginv/reconstruct.hpp"

namespace wginv {

/// One documented configuration key.
struct ConfigKeyDoc {
    std::string section;
    std::string key;
    std::string unit;  // "-" for dimensionless
    std::string def;
    std::string desc;
};

/// Full registry of recognized keys with units and defaults.
const std::vector<ConfigKeyDoc>& config_key_docs();

/// Parsed run configuration: the pipeline knobs plus CLI-level options.
struct RunConfig {
    PipelineConfig pipe;
    std::string forward_mode = "manufactured";  // zero | manufactured | scenario
    std::vector<double> forward_h{1.0 / 16.0, 1.0 / 32.0};
    std::string format = "csv";  // csv | csv+svg
    std::string out_dir = "out";
};

/// Parse the key = value / [section] format. Unknown sections or keys are
/// rejected with the offending line number; values are type-checked.
RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin);

/// Render the key table (section, key, unit, default, description) for
/// --help output.
std::string config_help_text();

}  // namespace wginv
