#include "iotphy/ota/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iotphy/lora/airtime.hpp"

namespace iotphy::ota {

void PowerModel::validate() const {
    for (const double w : {tx_w, rx_w, idle_w, sleep_w}) {
        if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("power draw must be finite and non-negative");
    }
}

void TimingEnergyModel::validate() const {
    for (const Nanos d : {rx_to_tx, tx_to_rx, freq_switch, wake, reprogram, wake_lead}) {
        if (d < 0ns) throw std::invalid_argument("timing constants must be non-negative");
    }
    power.validate();
}

lora::LoraParams default_link() {
    lora::LoraParams p;
    p.sf = 8;
    p.bw_hz = 500000;
    p.coding_rate_denominator = 6;
    p.preamble_len = 8;
    return p;
}

Nanos packet_airtime(const lora::LoraParams& link, std::size_t wire_bytes) {
    return Nanos(std::llround(lora::airtime_s(link, wire_bytes) * 1e9));
}

Nanos ack_timeout(const lora::LoraParams& link, const TimingEnergyModel& timing, std::size_t payload_size) {
    return 2 * (packet_airtime(link, wire_size(PacketKind::data, payload_size)) +
                packet_airtime(link, wire_size(PacketKind::ack)) + timing.rx_to_tx + timing.tx_to_rx);
}

std::string to_string(ApPhase phase) {
    switch (phase) {
        case ApPhase::idle: return "idle";
        case ApPhase::await_ready: return "await_ready";
        case ApPhase::transfer: return "transfer";
        case ApPhase::await_end_ack: return "await_end_ack";
        case ApPhase::done: return "done";
        case ApPhase::failed: return "failed";
    }
    return "unknown";
}

std::string to_string(NodePhase phase) {
    switch (phase) {
        case NodePhase::listen: return "listen";
        case NodePhase::asleep: return "asleep";
        case NodePhase::transfer: return "transfer";
        case NodePhase::reprogram: return "reprogram";
        case NodePhase::done: return "done";
        case NodePhase::failed: return "failed";
    }
    return "unknown";
}

namespace {

template <class... F>
struct Overload : F... {
    using F::operator()...;
};

OtaPacket make_request(const ApContext& ctx, Nanos now) {
    const auto& plan = *ctx.plan;
    return OtaPacket::request(plan.format, static_cast<std::uint8_t>(plan.payload_size),
                              static_cast<std::uint32_t>(plan.stream.size()),
                              static_cast<std::uint64_t>((now + ctx.wake_lead).count()), ctx.device_ids);
}

OtaPacket make_data(const ApContext& ctx, std::uint16_t seq) {
    const auto payload = ctx.plan->payload(seq);
    return OtaPacket::data(seq, {payload.begin(), payload.end()});
}

OtaPacket make_end(const ApContext& ctx) {
    return OtaPacket::end(static_cast<std::uint16_t>(ctx.plan->packet_count()),
                          static_cast<std::uint32_t>(ctx.plan->stream.size()));
}

// Sends the packet for the current phase and arms a fresh timer.
void send_outstanding(ApState& s, const ApContext& ctx, std::vector<Action>& out, Nanos now) {
    Nanos wait = ctx.ack_timeout;
    switch (s.phase) {
        case ApPhase::await_ready:
            out.push_back(Send{make_request(ctx, now)});
            wait = ctx.ready_timeout;
            break;
        case ApPhase::transfer:
            out.push_back(Send{make_data(ctx, s.next_seq)});
            break;
        case ApPhase::await_end_ack:
            out.push_back(Send{make_end(ctx)});
            break;
        default:
            return;
    }
    out.push_back(StartTimer{wait, ++s.timer_gen});
}

void advance(ApState& s, const ApContext& ctx, std::vector<Action>& out, Nanos now) {
    s.retries = 0;
    s.phase = s.next_seq < ctx.plan->packet_count() ? ApPhase::transfer : ApPhase::await_end_ack;
    send_outstanding(s, ctx, out, now);
}

}  // namespace

Step<ApState> ap_step(const ApState& state, const ApContext& ctx, const Event& event, Nanos now) {
    if (ctx.plan == nullptr) throw std::invalid_argument("access point has no transfer plan");
    Step<ApState> r{state, {}};
    auto& s = r.state;
    auto& out = r.actions;
    const bool finished = s.phase == ApPhase::done || s.phase == ApPhase::failed;

    std::visit(
        Overload{
            [&](const Start&) {
                if (s.phase != ApPhase::idle) return;
                s.phase = ApPhase::await_ready;
                send_outstanding(s, ctx, out, now);
            },
            [&](const Timeout& t) {
                if (finished || t.gen != s.timer_gen) return;
                if (++s.retries > ctx.retry_ceiling) {
                    const std::string what = s.phase == ApPhase::await_ready ? "REQUEST"
                                             : s.phase == ApPhase::transfer
                                                 ? "DATA " + std::to_string(s.next_seq)
                                                 : "END";
                    s.phase = ApPhase::failed;
                    ++s.timer_gen;
                    out.push_back(Finish{false, what + " unacknowledged after " +
                                                    std::to_string(ctx.retry_ceiling) + " retries"});
                    return;
                }
                ++s.retransmissions;
                send_outstanding(s, ctx, out, now);
            },
            [&](const PacketReceived& rx) {
                const auto& p = rx.packet;
                if (s.phase == ApPhase::await_ready && p.kind == PacketKind::ready &&
                    std::find(ctx.device_ids.begin(), ctx.device_ids.end(), p.device_id) != ctx.device_ids.end()) {
                    s.next_seq = 0;
                    advance(s, ctx, out, now);
                } else if (s.phase == ApPhase::transfer && p.kind == PacketKind::ack && p.seq == s.next_seq) {
                    ++s.next_seq;
                    advance(s, ctx, out, now);
                } else if (s.phase == ApPhase::await_end_ack && p.kind == PacketKind::ack &&
                           p.seq == ctx.plan->packet_count()) {
                    s.phase = ApPhase::done;
                    ++s.timer_gen;
                    out.push_back(Finish{true, {}});
                }
                // Anything else is stale (an old ACK or a repeated READY).
            },
            [&](const TimerFired&) {},
            [&](const ProgramDone&) {},
        },
        event);
    return r;
}

Step<NodeState> node_step(const NodeState& state, const NodeContext& ctx, const Event& event, Nanos now) {
    Step<NodeState> r{state, {}};
    auto& s = r.state;
    auto& out = r.actions;
    auto violation = [&](const std::string& what) {
        ++s.violations;
        out.push_back(Log{"node in " + to_string(s.phase) + ": " + what});
    };

    std::visit(
        Overload{
            [&](const Start&) {},
            [&](const Timeout&) {},
            [&](const TimerFired&) {
                if (s.phase != NodePhase::asleep) return violation("unexpected wake timer");
                s.phase = NodePhase::transfer;
                out.push_back(Send{OtaPacket::ready(ctx.device_id)});
            },
            [&](const ProgramDone& d) {
                if (s.phase != NodePhase::reprogram) return violation("unexpected programming result");
                s.phase = d.ok ? NodePhase::done : NodePhase::failed;
                out.push_back(Finish{d.ok, d.error});
            },
            [&](const PacketReceived& rx) {
                const auto& p = rx.packet;
                switch (p.kind) {
                    case PacketKind::request: {
                        if (std::find(p.device_ids.begin(), p.device_ids.end(), ctx.device_id) == p.device_ids.end()) {
                            return;
                        }
                        if (s.phase == NodePhase::transfer && s.next_expected_seq == 0) {
                            // Our READY was lost; answer again.
                            out.push_back(Send{OtaPacket::ready(ctx.device_id)});
                            return;
                        }
                        if (s.phase == NodePhase::asleep) return;  // radio off
                        if (s.phase != NodePhase::listen) return violation("REQUEST during an update");
                        if (p.payload_size == 0 || p.payload_size > kMaxDataPayload) {
                            return violation("REQUEST with bad payload size");
                        }
                        s.format = p.format;
                        s.payload_size = p.payload_size;
                        s.total_bytes = p.total_bytes;
                        s.next_expected_seq = 0;
                        s.flash_cursor = 0;
                        const Nanos wake_at(static_cast<std::int64_t>(p.wake_time_ns));
                        if (wake_at <= now) {
                            s.phase = NodePhase::transfer;
                            out.push_back(Send{OtaPacket::ready(ctx.device_id)});
                        } else {
                            s.phase = NodePhase::asleep;
                            out.push_back(SleepUntil{wake_at});
                        }
                        return;
                    }
                    case PacketKind::data: {
                        if (s.phase != NodePhase::transfer) return violation("DATA outside a transfer");
                        if (p.seq < s.next_expected_seq) {
                            ++s.duplicates;
                            out.push_back(Send{OtaPacket::ack(p.seq)});
                            return;
                        }
                        if (p.seq > s.next_expected_seq) return violation("DATA " + std::to_string(p.seq) + " ahead of sequence");
                        const std::size_t offset = s.payload_size * p.seq;
                        if (p.payload.empty() || offset + p.payload.size() > s.total_bytes ||
                            (p.payload.size() != s.payload_size && offset + p.payload.size() != s.total_bytes)) {
                            return violation("DATA " + std::to_string(p.seq) + " has the wrong length");
                        }
                        out.push_back(WriteFlash{FlashModel::kStaging + offset, p.payload});
                        s.flash_cursor = offset + p.payload.size();
                        ++s.next_expected_seq;
                        out.push_back(Send{OtaPacket::ack(p.seq)});
                        return;
                    }
                    case PacketKind::end: {
                        if (s.phase == NodePhase::reprogram || s.phase == NodePhase::done ||
                            s.phase == NodePhase::failed) {
                            if (p.seq == s.next_expected_seq) out.push_back(Send{OtaPacket::ack(p.seq)});
                            return;
                        }
                        if (s.phase != NodePhase::transfer) return violation("END outside a transfer");
                        if (p.seq != s.next_expected_seq || p.total_bytes != s.flash_cursor ||
                            p.total_bytes != s.total_bytes) {
                            return violation("END does not match the received stream");
                        }
                        s.phase = NodePhase::reprogram;
                        out.push_back(Send{OtaPacket::ack(p.seq)});
                        out.push_back(Reprogram{s.format, s.flash_cursor});
                        return;
                    }
                    case PacketKind::ready:
                    case PacketKind::ack:
                        return violation(to_string(p.kind) + " is not addressed to a node");
                }
            },
        },
        event);
    return r;
}

}  // namespace iotphy::ota
