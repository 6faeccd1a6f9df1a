#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ham {

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitBudget = 2, kExitContract = 3 };

const std::vector<std::string>& cli_commands();

// Runs one command against a config file with key=value overrides applied on
// top. selftest accepts an empty config path.
int run(const std::string& command, const std::string& config_path, const std::vector<std::string>& overrides,
        std::ostream& out, std::ostream& err);

}  // namespace ham
