#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omnoise/params.hpp"

namespace omnoise {

// Device parameter files are flat key=value text, frequencies in Hz:
//   omega_m_hz, gamma_hz, kappa_hz, g0_hz, n_th, n_max, n_ba (optional).
// '#' starts a comment. Two built-in parameter sets are compiled in and
// resolve by name: "paper_device" and "paper_device_probe".

struct ConfigReport {
    std::vector<std::string> errors;    // missing keys, NaN values, invariant violations
    std::vector<std::string> warnings;  // e.g. sideband resolution
    std::vector<std::string> echo;      // normalized parameter lines (Hz and rad/s)
    std::map<std::string, double> values;  // parsed raw keys (Hz domain)
    std::optional<PhysParams> params;   // present when errors is empty

    bool ok() const { return errors.empty(); }
};

bool is_builtin_params(const std::string& name);
std::vector<std::string> builtin_params_names();

// Accepts a builtin name or a path. Never throws on content problems;
// everything lands in the report.
ConfigReport parse_params_source(const std::string& name_or_path);

// Convenience: parse and throw std::runtime_error with the itemized error
// list if invalid.
PhysParams load_params(const std::string& name_or_path);

// Rebuild from the Hz-domain key map (used by manifest replay).
ConfigReport params_from_values(const std::map<std::string, double>& values);

}  // namespace omnoise
