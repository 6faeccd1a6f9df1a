#pragma once

#include <map>
#include <string>
#include <vector>

#include "ham/noise_model.hpp"

namespace ham {

// Flat dotted-key view of a config file. "[section]" headers prefix the keys
// that follow them; '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text, const std::string& origin = "config");
ConfigMap read_config_file(const std::string& path);
// Applies "key=value" overrides on top of m.
void apply_overrides(ConfigMap& m, const std::vector<std::string>& overrides);

// Throws ConfigError naming the offending key.
Scenario scenario_from_config(const ConfigMap& m);

// Canonical one-line rendering of the parsed scenario and its 64-bit FNV-1a hash.
std::string canonical_scenario(const Scenario& sc);
std::string scenario_hash(const Scenario& sc);

const std::vector<std::string>& known_config_keys();

}  // namespace ham
