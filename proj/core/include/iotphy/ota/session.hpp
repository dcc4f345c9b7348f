#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "iotphy/lora/params.hpp"
#include "iotphy/ota/firmware.hpp"
#include "iotphy/ota/protocol.hpp"

namespace iotphy::ota {

struct SessionConfig {
    lora::LoraParams link = default_link();
    double loss_prob = 0.0;
    std::uint64_t seed = 1;
    // When set, replaces the random channel: entry i says whether the i-th
    // transmitted packet (any kind) is delivered; packets past the end are.
    std::optional<std::vector<bool>> delivery_mask;
    TimingEnergyModel timing;
    unsigned retry_ceiling = 100;
    std::uint16_t device_id = 1;
    // Node-side decompression throughput used for the reported budget.
    double decompress_rate_bytes_per_s = 1.3e6;

    void validate() const;
};

enum class Side { ap, node };
enum class RadioState { tx, rx, idle, sleep };
std::string to_string(Side side);
std::string to_string(RadioState state);

struct TraceEntry {
    Side from = Side::ap;
    PacketKind kind = PacketKind::data;
    std::uint16_t seq = 0;
    Nanos start{0};
    Nanos end{0};
    std::size_t bytes = 0;
    bool delivered = true;
};

struct Segment {
    RadioState state = RadioState::rx;
    Nanos start{0};
    Nanos end{0};
};

struct SessionReport {
    bool completed = false;
    std::string failure_reason;
    double total_time_s = 0.0;
    double node_energy_mj = 0.0;
    std::uint64_t packets_sent = 0;
    std::uint64_t data_packets_sent = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t bytes_over_air = 0;
    std::uint64_t duplicates = 0;
    std::size_t data_packets = 0;  // distinct DATA sequence numbers
    std::size_t stream_bytes = 0;
    // Estimated time for the node to decompress the received stream; zero for
    // raw transfers. Not part of total_time_s.
    double decompress_time_budget_s = 0.0;
    std::size_t peak_decompress_bytes = 0;
    bool image_match = false;

    std::vector<TraceEntry> trace;
    // Node radio states from session start to session end, contiguous.
    std::vector<Segment> node_timeline;
    std::vector<FlashModel::Write> flash_writes;
    std::vector<std::string> log;
    FirmwareImage delivered;
};

// Discrete-event run of the access point and one node over a shared
// half-duplex link. A sender starts rx_to_tx after deciding to send, and not
// before the receiver has finished its own tx_to_rx turnaround. A packet is
// lost if the channel erases it or the receiver is transmitting at the time.
// `expected_image` is what the node should end up booting.
SessionReport simulate_session(const TransferPlan& plan, std::span<const std::uint8_t> expected_image,
                               const SessionConfig& config);
// chunk_firmware(image) then the above.
SessionReport simulate_session(const FirmwareImage& image, const SessionConfig& config);

// Summary fields only (no trace or timeline).
nlohmann::ordered_json to_json(const SessionReport& report);

// Independent check of the accounting: sum of power x duration over a
// timeline, in millijoules.
double integrate_energy_mj(std::span<const Segment> timeline, const PowerModel& power);

// Command-line session description:
// {image_path, loss_prob, seed, sf, bw_hz, cr, payload_size, preamble,
//  power_model: {tx_w, rx_w, idle_w, sleep_w}, transfer_bytes}
// transfer_bytes, when present, replaces the image with that many seeded
// random bytes sent uncompressed. Unknown keys are rejected.
struct SessionFile {
    SessionConfig config;
    std::string image_path;
    std::optional<std::size_t> transfer_bytes;
    std::size_t payload_size = kMaxDataPayload;
};
SessionFile session_file_from_json(const nlohmann::json& j);

}  // namespace iotphy::ota
