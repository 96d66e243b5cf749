#ifndef CDESIM_TOOLS_CLI_HPP_
#define CDESIM_TOOLS_CLI_HPP_

#include <string>
#include <vector>

#include "cdesim/simulator.hpp"

namespace cdesim::cli {

// Flat key=value config file with Table-1 defaults for unspecified keys.
// Unknown keys raise invalid_parameter_error listing the valid keys;
// out-of-range values raise with the violated bound.
SimConfig parse_config_file(const std::string& path, SimConfig base = SimConfig{});

// "start:step:stop" range or comma-separated list.
std::vector<double> parse_snr_list(const std::string& text);

// One key=value assignment applied to a config (the file parser and the flag
// layer share this).
void apply_config_key(SimConfig& config, const std::string& key, const std::string& value);

const std::vector<std::string>& valid_config_keys();

std::string sha256_file(const std::string& path);

int run_app(int argc, char** argv);

}  // namespace cdesim::cli

#endif  // CDESIM_TOOLS_CLI_HPP_
