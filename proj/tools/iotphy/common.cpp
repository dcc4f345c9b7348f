#include "common.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace iotphy::cli {

std::uint64_t default_seed() {
    const char* env = std::getenv("IOTPHY_SEED");
    if (env == nullptr || *env == '\0') return 1;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw CommandError(kUsage, std::string("IOTPHY_SEED is not a non-negative integer: ") + env);
}

nlohmann::json load_json(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    try {
        if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
            return nlohmann::json::parse(arg);
        }
        std::ifstream in(arg);
        if (!in) throw CommandError(kUsage, "cannot open " + arg);
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw CommandError(kUsage, "invalid JSON in " + arg + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CommandError(kUsage, "cannot write " + path.string());
    out << text;
}

}  // namespace iotphy::cli
