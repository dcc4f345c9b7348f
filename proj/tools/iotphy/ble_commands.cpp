#include <iostream>
#include <optional>

#include "common.hpp"
#include "iotphy/ble/gfsk.hpp"
#include "iotphy/ble/packet.hpp"
#include "iotphy/iq/iq_file.hpp"

namespace iotphy::cli {
namespace {

struct BeaconArgs {
    std::string pdu;
    std::optional<int> channel;
    std::string out;
    int osr = 4;
};

void run_beacon(const BeaconArgs& a) {
    auto req = ble::beacon_request_from_json(load_json(a.pdu));
    if (a.channel) req.channel = *a.channel;
    const auto packet = ble::make_packet(req.pdu, req.channel);
    ble::GfskConfig cfg;
    cfg.osr = a.osr;
    const auto bits = packet.to_bits();
    const auto buf = ble::gfsk_modulate(bits, cfg);
    iq::write_iq_file(a.out, buf, "BLE advertisement, channel " + std::to_string(req.channel));

    const auto crc = ble::crc24_bytes(packet.crc);
    nlohmann::ordered_json j;
    j["channel"] = req.channel;
    j["pdu_hex"] = to_hex(req.pdu.to_bytes());
    j["crc24"] = to_hex(std::vector<std::uint8_t>{static_cast<std::uint8_t>(packet.crc >> 16),
                                                  static_cast<std::uint8_t>(packet.crc >> 8),
                                                  static_cast<std::uint8_t>(packet.crc)});
    j["crc_air_hex"] = to_hex(crc);
    j["whitened_hex"] = to_hex(packet.whitened_bytes());
    j["air_hex"] = to_hex(packet.air_bytes());
    j["bits"] = bits.size();
    j["samples"] = buf.size();
    j["sample_rate_hz"] = buf.sample_rate_hz;
    std::cout << j.dump(2) << '\n';
}

}  // namespace

void register_ble_commands(CLI::App& app, GlobalOptions&) {
    auto args = std::make_shared<BeaconArgs>();
    auto* b = app.add_subcommand("ble-beacon", "Assemble and GFSK-modulate a BLE advertisement");
    b->add_option("--pdu", args->pdu, "Beacon JSON {adv_address, adv_data, channel} (file or inline)")->required();
    b->add_option("--channel", args->channel, "Advertising channel, overrides the JSON")->check(CLI::Range(37, 39));
    b->add_option("--out", args->out, "Output I/Q file")->required();
    b->add_option("--osr", args->osr, "Samples per bit")->check(CLI::Range(2, 64));
    b->callback([args] { run_beacon(*args); });
}

}  // namespace iotphy::cli
