#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace iotphy::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNotFound = 2, kProtocolFailure = 3 };

// Thrown by commands to end with a specific exit code and message.
struct CommandError : std::runtime_error {
    CommandError(int code, const std::string& what) : std::runtime_error(what), exit_code(code) {}
    int exit_code;
};

struct GlobalOptions {
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

// IOTPHY_SEED if set and numeric, else 1.
std::uint64_t default_seed();

// Parses the argument as inline JSON when it starts with '{' or '[', else
// reads it as a file path.
nlohmann::json load_json(const std::string& arg);

void write_text(const std::filesystem::path& path, const std::string& text);

void register_lora_commands(CLI::App& app, GlobalOptions& global);
void register_ble_commands(CLI::App& app, GlobalOptions& global);
void register_ota_commands(CLI::App& app, GlobalOptions& global);
void register_iq_commands(CLI::App& app, GlobalOptions& global);

}  // namespace iotphy::cli
