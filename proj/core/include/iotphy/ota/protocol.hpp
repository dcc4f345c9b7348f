#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "iotphy/lora/params.hpp"
#include "iotphy/ota/firmware.hpp"
#include "iotphy/ota/packet.hpp"

namespace iotphy::ota {

using Nanos = std::chrono::nanoseconds;
using namespace std::chrono_literals;

// Node power draw per radio state, in watts.
struct PowerModel {
    double tx_w = 0.125;
    double rx_w = 0.040;
    double idle_w = 0.005;
    double sleep_w = 1e-5;

    void validate() const;  // all finite and non-negative
};

struct TimingEnergyModel {
    Nanos rx_to_tx = 11us;
    Nanos tx_to_rx = 45us;
    Nanos freq_switch = 220us;
    Nanos wake = 22ms;
    Nanos reprogram = 22ms;
    // How far ahead of the REQUEST the node is told to wake.
    Nanos wake_lead = 50ms;
    PowerModel power;

    void validate() const;
};

// SF 8, 500 kHz, coding rate 4/6, 8-symbol preamble.
lora::LoraParams default_link();

// Airtime of a packet of `wire_bytes` bytes, rounded to the nanosecond.
Nanos packet_airtime(const lora::LoraParams& link, std::size_t wire_bytes);

// 2 * (airtime(full DATA) + airtime(ACK) + rx_to_tx + tx_to_rx).
Nanos ack_timeout(const lora::LoraParams& link, const TimingEnergyModel& timing, std::size_t payload_size);

// ---- events ---------------------------------------------------------------

struct Start {};
struct PacketReceived {
    OtaPacket packet;
};
// Retransmission timer; `gen` identifies which timer expired.
struct Timeout {
    std::uint64_t gen = 0;
};
// Node wake-up completed.
struct TimerFired {};
struct ProgramDone {
    bool ok = false;
    std::string error;
};
using Event = std::variant<Start, PacketReceived, Timeout, TimerFired, ProgramDone>;

// ---- actions --------------------------------------------------------------

struct Send {
    OtaPacket packet;
};
// Relative to the end of the transmission issued in the same step (or to the
// step time when nothing is sent).
struct StartTimer {
    Nanos after{0};
    std::uint64_t gen = 0;
};
struct WriteFlash {
    std::size_t address = 0;
    std::vector<std::uint8_t> bytes;
};
// Sleep until wake_at, spend the wake-up time, then deliver TimerFired.
struct SleepUntil {
    Nanos wake_at{0};
};
struct Reprogram {
    StreamFormat format = StreamFormat::raw;
    std::size_t stream_size = 0;
};
struct Finish {
    bool ok = false;
    std::string reason;
};
struct Log {
    std::string message;
};
using Action = std::variant<Send, StartTimer, WriteFlash, SleepUntil, Reprogram, Finish, Log>;

template <class State>
struct Step {
    State state;
    std::vector<Action> actions;
};

// ---- access point -----------------------------------------------------------

enum class ApPhase { idle, await_ready, transfer, await_end_ack, done, failed };
std::string to_string(ApPhase phase);

struct ApContext {
    const TransferPlan* plan = nullptr;
    std::vector<std::uint16_t> device_ids{1};
    Nanos ack_timeout{0};
    Nanos wake_lead{0};
    // Wait for READY after a REQUEST ends.
    Nanos ready_timeout{0};
    unsigned retry_ceiling = 100;
};

struct ApState {
    ApPhase phase = ApPhase::idle;
    std::uint16_t next_seq = 0;
    unsigned retries = 0;  // for the packet currently outstanding
    std::uint64_t timer_gen = 0;
    std::uint64_t retransmissions = 0;
};

// Stop-and-wait sender: REQUEST, wait for READY, then each DATA until its ACK,
// then END until its ACK. A timeout resends the outstanding packet; more than
// retry_ceiling retries of one packet fails the session.
Step<ApState> ap_step(const ApState& state, const ApContext& ctx, const Event& event, Nanos now);

// ---- node -------------------------------------------------------------------

enum class NodePhase { listen, asleep, transfer, reprogram, done, failed };
std::string to_string(NodePhase phase);

struct NodeContext {
    std::uint16_t device_id = 1;
};

struct NodeState {
    NodePhase phase = NodePhase::listen;
    std::uint16_t next_expected_seq = 0;
    std::size_t flash_cursor = 0;  // bytes staged so far
    StreamFormat format = StreamFormat::raw;
    std::size_t payload_size = kMaxDataPayload;
    std::uint32_t total_bytes = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t violations = 0;
};

// Receiver: on a REQUEST naming it, sleeps until the wake time and answers
// READY. DATA with the expected seq is written to staging + payload_size * seq
// and ACKed; an older seq is re-ACKed without writing; anything else is logged
// and ignored. END with the right count starts reprogramming.
Step<NodeState> node_step(const NodeState& state, const NodeContext& ctx, const Event& event, Nanos now);

}  // namespace iotphy::ota
