#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alm/config.hpp"

namespace alm {

struct RunOptions {
    std::filesystem::path out_dir = "alm_out";
    bool ledger_dump = false;
};

struct RunSummary {
    std::vector<std::string> files;  // written outputs, manifest last
    std::string config_sha256;
};

std::string sha256_hex(const std::string& data);

// Runs the configured experiment and writes its outputs plus manifest.json
// into options.out_dir. Throws ConfigError for invalid input and other
// exceptions for runtime failures.
RunSummary run(const RunConfig& config, const RunOptions& options);

// Machine-readable error report written on failure.
std::string error_report(const std::string& kind, const std::string& message, int exit_code);

}  // namespace alm
