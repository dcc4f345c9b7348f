#include <fstream>
#include <iostream>
#include <iterator>
#include <random>

#include "common.hpp"
#include "iotphy/ota/session.hpp"

namespace iotphy::cli {
namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CommandError(kUsage, "cannot open image " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void run_ota(const std::string& session_arg, const std::string& out, const GlobalOptions& g) {
    const auto j = load_json(session_arg);
    auto file = ota::session_file_from_json(j);
    if (!j.contains("seed")) file.config.seed = g.seed;

    ota::SessionReport report;
    if (file.transfer_bytes) {
        std::mt19937_64 rng(file.config.seed ^ 0x5EEDF11EULL);
        std::vector<std::uint8_t> bytes(*file.transfer_bytes);
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
        const auto plan = ota::TransferPlan::raw(bytes, file.payload_size);
        report = ota::simulate_session(plan, bytes, file.config);
    } else {
        std::filesystem::path path = file.image_path;
        if (path.is_relative() && !std::filesystem::exists(path) && session_arg.front() != '{') {
            path = std::filesystem::path(session_arg).parent_path() / path;
        }
        const ota::FirmwareImage image{ota::ImageKind::fpga_bitstream, read_bytes(path)};
        const auto plan = ota::chunk_firmware(image, file.payload_size);
        report = ota::simulate_session(plan, image.data, file.config);
    }

    const auto text = ota::to_json(report).dump(2) + "\n";
    write_text(out, text);
    std::cout << text;
    if (!report.completed) throw CommandError(kProtocolFailure, "session did not complete: " + report.failure_reason);
}

}  // namespace

void register_ota_commands(CLI::App& app, GlobalOptions& global) {
    auto args = std::make_shared<std::pair<std::string, std::string>>();
    auto* o = app.add_subcommand("ota-sim", "Simulate an over-the-air update session");
    o->add_option("--session", args->first, "Session config JSON (file or inline)")->required();
    o->add_option("--out", args->second, "Report JSON output")->required();
    o->callback([args, &global] { run_ota(args->first, args->second, global); });
}

}  // namespace iotphy::cli
