#pragma once

#include <string>
#include <vector>

namespace fraclab {

struct CommandResult {
    int status = 0;  // 0 ok, 1 a check failed
    std::string json;
    std::string csv;   // empty when the command has no table
    std::string text;  // human summary for stdout
};

std::vector<std::string> command_names();

// config_json is an object of command parameters; see README for the keys of each command.
// Throws Error: Config for bad parameters, Numeric/Check for failed computations.
CommandResult run_command(const std::string& command, const std::string& config_json);

// Hash of the result-relevant part of a config (cache_dir, out, threads and format excluded).
std::string config_hash(const std::string& config_json);

}  // namespace fraclab
