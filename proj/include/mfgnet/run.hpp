#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfgnet/config.hpp"

namespace mfgnet {

struct RunInputs {
    std::string command;  // validate, solve-fp, solve-hjb, solve-mfg, eig, simulate, check
    std::shared_ptr<const MetricNetwork> network;
    std::string network_path;
    std::string network_source;  // raw bytes, hashed into the manifest
    std::optional<RunConfig> config;  // defaults when absent
    std::string config_path;
    std::string config_source;
    std::string out_dir;  // no files are written when empty
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> k;
};

struct RunReport {
    std::string command;
    bool passed = true;
    std::optional<ErrorCode> failure;  // set when passed is false
    Json summary;
    std::string text;                // human readable summary
    std::vector<std::string> files;  // written outputs, relative to out_dir
};

[[nodiscard]] std::vector<std::string> run_commands();

/// Runs one command. Invalid inputs throw Error; an admissible run that fails its own checks
/// (invalid network, unconverged Picard, failed invariant) returns passed = false.
[[nodiscard]] RunReport run(const RunInputs& inputs);

[[nodiscard]] std::string sha256_hex(const std::string& bytes);
[[nodiscard]] const char* library_version();

/// Config entries keyed by edge name, rewritten for the pieces of a normalized network.
[[nodiscard]] RunConfig remap_config(const RunConfig& cfg, const MetricNetwork& original,
                                     const Normalization& norm);

}  // namespace mfgnet
