#include <iostream>

#include "common.hpp"

int main(int argc, char** argv) {
    using namespace iotphy::cli;
    CLI::App app{"iotphy: LoRa / BLE baseband toolkit, I/Q word codec and OTA update simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "iotphy 0.1.0");

    GlobalOptions global;
    try {
        global.seed = default_seed();
    } catch (const CommandError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code;
    }
    app.add_option("--seed", global.seed, "Seed for every random draw (default: $IOTPHY_SEED or 1)");
    app.add_option("--threads", global.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

    register_lora_commands(app, global);
    register_ble_commands(app, global);
    register_ota_commands(app, global);
    register_iq_commands(app, global);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    } catch (const CommandError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}
