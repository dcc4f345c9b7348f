#include "iotphy/ota/session.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "iotphy/channel/channel.hpp"

namespace iotphy::ota {

void SessionConfig::validate() const {
    link.validate();
    timing.validate();
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) throw std::invalid_argument("loss_prob must lie in [0, 1]");
    if (!(decompress_rate_bytes_per_s > 0.0)) throw std::invalid_argument("decompress rate must be positive");
}

std::string to_string(Side side) { return side == Side::ap ? "ap" : "node"; }

std::string to_string(RadioState state) {
    switch (state) {
        case RadioState::tx: return "tx";
        case RadioState::rx: return "rx";
        case RadioState::idle: return "idle";
        case RadioState::sleep: return "sleep";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kMaxEvents = 50'000'000;

struct Queued {
    Nanos at;
    std::uint64_t order;
    Side to;
    Event event;
};

struct Later {
    bool operator()(const Queued& a, const Queued& b) const {
        return a.at != b.at ? a.at > b.at : a.order > b.order;
    }
};

struct Radio {
    Nanos tx_start{0};
    Nanos tx_end{0};
    Nanos rx_ready{0};
};

template <class... F>
struct Overload : F... {
    using F::operator()...;
};

class Simulator {
public:
    Simulator(const TransferPlan& plan, const SessionConfig& cfg)
        : cfg_(cfg),
          channel_(cfg.delivery_mask ? channel::ErasureChannel::scripted(*cfg.delivery_mask)
                                     : channel::ErasureChannel::random(cfg.loss_prob, cfg.seed)) {
        ap_ctx_.plan = &plan;
        ap_ctx_.device_ids = {cfg.device_id};
        ap_ctx_.ack_timeout = ack_timeout(cfg.link, cfg.timing, plan.payload_size);
        ap_ctx_.wake_lead = cfg.timing.wake_lead;
        ap_ctx_.ready_timeout = cfg.timing.wake_lead + cfg.timing.wake + ap_ctx_.ack_timeout;
        ap_ctx_.retry_ceiling = cfg.retry_ceiling;
        node_ctx_.device_id = cfg.device_id;
    }

    SessionReport run() {
        push(Nanos{0}, Side::ap, Start{});
        std::size_t handled = 0;
        while (!queue_.empty() && !(ap_finished_ && node_finished_) && !ap_failed_) {
            if (++handled > kMaxEvents) {
                report_.failure_reason = "event limit reached";
                break;
            }
            Queued q = queue_.top();
            queue_.pop();
            if (q.to == Side::ap) {
                auto step = ap_step(ap_, ap_ctx_, q.event, q.at);
                ap_ = step.state;
                apply(Side::ap, step.actions, q.at);
            } else {
                auto step = node_step(node_, node_ctx_, q.event, q.at);
                node_ = step.state;
                apply(Side::node, step.actions, q.at);
            }
        }

        const Nanos end = std::max(ap_end_, node_end_);
        report_.completed = ap_finished_ && node_finished_ && node_ok_;
        if (!report_.completed && report_.failure_reason.empty()) {
            report_.failure_reason = !ap_failure_.empty() ? ap_failure_ : node_failure_;
            if (report_.failure_reason.empty()) report_.failure_reason = "session stalled";
        }
        report_.total_time_s = std::chrono::duration<double>(end).count();
        report_.retransmissions = ap_.retransmissions;
        report_.duplicates = node_.duplicates;
        report_.data_packets = ap_ctx_.plan->packet_count();
        report_.stream_bytes = ap_ctx_.plan->stream.size();
        report_.node_timeline = build_timeline(end);
        report_.node_energy_mj = integrate_energy_mj(report_.node_timeline, cfg_.timing.power);
        report_.flash_writes = flash_.write_log();
        return std::move(report_);
    }

    const FlashModel& flash() const { return flash_; }

private:
    void push(Nanos at, Side to, Event e) { queue_.push({at, order_++, to, std::move(e)}); }

    Radio& radio(Side s) { return s == Side::ap ? ap_radio_ : node_radio_; }

    void mark(RadioState state, Nanos start, Nanos end) {
        if (end > start) explicit_.push_back({state, start, end});
    }

    void apply(Side side, const std::vector<Action>& actions, Nanos now) {
        Nanos base = now;  // end of this step's transmission
        for (const auto& action : actions) {
            std::visit(Overload{
                           [&](const Send& s) { base = transmit(side, s.packet, now); },
                           [&](const StartTimer& t) { push(base + t.after, side, Timeout{t.gen}); },
                           [&](const WriteFlash& w) { flash_.write(w.address, w.bytes); },
                           [&](const SleepUntil& s) {
                               const Nanos sleep_end = std::max(s.wake_at, base);
                               mark(RadioState::sleep, base, sleep_end);
                               mark(RadioState::idle, sleep_end, sleep_end + cfg_.timing.wake);
                               push(sleep_end + cfg_.timing.wake, Side::node, TimerFired{});
                           },
                           [&](const Reprogram& r) { reprogram(r, base); },
                           [&](const Finish& f) { finish(side, f, base); },
                           [&](const Log& l) { report_.log.push_back(l.message); },
                       },
                       action);
        }
    }

    Nanos transmit(Side from, const OtaPacket& packet, Nanos now) {
        const auto bytes = serialize(packet);
        const Side to = from == Side::ap ? Side::node : Side::ap;
        Radio& tx = radio(from);
        Radio& rx = radio(to);
        const Nanos start = std::max({now + cfg_.timing.rx_to_tx, tx.tx_end + cfg_.timing.rx_to_tx, rx.rx_ready});
        const Nanos end = start + packet_airtime(cfg_.link, bytes.size());
        tx.tx_start = start;
        tx.tx_end = end;
        tx.rx_ready = end + cfg_.timing.tx_to_rx;
        if (from == Side::node) mark(RadioState::tx, start, end);

        // Half duplex: the receiver cannot hear while its own transmission overlaps.
        const bool collided = rx.tx_start < end && start < rx.tx_end;
        const bool delivered = channel_.next_delivered() && !collided;
        report_.trace.push_back({from, packet.kind, packet.seq, start, end, bytes.size(), delivered});
        ++report_.packets_sent;
        if (packet.kind == PacketKind::data) ++report_.data_packets_sent;
        report_.bytes_over_air += bytes.size();
        if (delivered) {
            if (auto parsed = parse(bytes)) push(end, to, PacketReceived{std::move(*parsed)});
        }
        return end;
    }

    void reprogram(const Reprogram& r, Nanos at) {
        const auto result = reassemble_and_program(flash_, r.format, r.stream_size);
        report_.peak_decompress_bytes = result.peak_decompress_bytes;
        if (r.format == StreamFormat::compressed && result.ok) {
            report_.decompress_time_budget_s =
                static_cast<double>(result.image.data.size()) / cfg_.decompress_rate_bytes_per_s;
        }
        report_.delivered = result.image;
        const Nanos done = at + cfg_.timing.reprogram;
        mark(RadioState::idle, at, done);
        push(done, Side::node, ProgramDone{result.ok, result.error});
    }

    void finish(Side side, const Finish& f, Nanos at) {
        if (side == Side::ap) {
            ap_finished_ = true;
            ap_end_ = at;
            if (!f.ok) {
                ap_failed_ = true;
                ap_failure_ = f.reason;
            }
        } else {
            node_finished_ = true;
            node_ok_ = f.ok;
            node_end_ = at;
            if (!f.ok) node_failure_ = "programming failed: " + f.reason;
        }
    }

    // Explicit tx/sleep/idle intervals, with rx (radio listening) filling the
    // gaps from zero to the end of the session.
    std::vector<Segment> build_timeline(Nanos end) {
        std::sort(explicit_.begin(), explicit_.end(),
                  [](const Segment& a, const Segment& b) { return a.start < b.start; });
        std::vector<Segment> out;
        Nanos t{0};
        for (auto seg : explicit_) {
            seg.start = std::max(seg.start, t);
            seg.end = std::min(seg.end, end);
            if (seg.end <= seg.start) continue;
            if (seg.start > t) out.push_back({RadioState::rx, t, seg.start});
            out.push_back(seg);
            t = seg.end;
        }
        if (end > t) out.push_back({RadioState::rx, t, end});
        return out;
    }

    const SessionConfig& cfg_;
    channel::ErasureChannel channel_;
    ApContext ap_ctx_;
    NodeContext node_ctx_;
    ApState ap_;
    NodeState node_;
    Radio ap_radio_;
    Radio node_radio_;
    FlashModel flash_;
    std::priority_queue<Queued, std::vector<Queued>, Later> queue_;
    std::uint64_t order_ = 0;
    std::vector<Segment> explicit_;
    SessionReport report_;
    bool ap_finished_ = false;
    bool ap_failed_ = false;
    bool node_finished_ = false;
    bool node_ok_ = false;
    Nanos ap_end_{0};
    Nanos node_end_{0};
    std::string ap_failure_;
    std::string node_failure_;
};

}  // namespace

SessionReport simulate_session(const TransferPlan& plan, std::span<const std::uint8_t> expected_image,
                               const SessionConfig& config) {
    config.validate();
    Simulator sim(plan, config);
    auto report = sim.run();
    report.image_match = report.completed && std::equal(report.delivered.data.begin(), report.delivered.data.end(),
                                                        expected_image.begin(), expected_image.end());
    return report;
}

SessionReport simulate_session(const FirmwareImage& image, const SessionConfig& config) {
    const auto plan = chunk_firmware(image);
    return simulate_session(plan, image.data, config);
}

double integrate_energy_mj(std::span<const Segment> timeline, const PowerModel& power) {
    double joules = 0.0;
    for (const auto& s : timeline) {
        double w = 0.0;
        switch (s.state) {
            case RadioState::tx: w = power.tx_w; break;
            case RadioState::rx: w = power.rx_w; break;
            case RadioState::idle: w = power.idle_w; break;
            case RadioState::sleep: w = power.sleep_w; break;
        }
        joules += w * std::chrono::duration<double>(s.end - s.start).count();
    }
    return joules * 1e3;
}

nlohmann::ordered_json to_json(const SessionReport& r) {
    nlohmann::ordered_json j;
    j["completed"] = r.completed;
    if (!r.completed) j["failure_reason"] = r.failure_reason;
    j["total_time_s"] = r.total_time_s;
    j["node_energy_mj"] = r.node_energy_mj;
    j["packets_sent"] = r.packets_sent;
    j["data_packets"] = r.data_packets;
    j["data_packets_sent"] = r.data_packets_sent;
    j["retransmissions"] = r.retransmissions;
    j["duplicates"] = r.duplicates;
    j["bytes_over_air"] = r.bytes_over_air;
    j["stream_bytes"] = r.stream_bytes;
    j["decompress_time_budget"] = r.decompress_time_budget_s;
    j["peak_decompress_bytes"] = r.peak_decompress_bytes;
    j["image_match"] = r.image_match;
    return j;
}

SessionFile session_file_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("session config must be a JSON object");
    static const std::vector<std::string> known{"image_path", "loss_prob", "seed",     "sf",
                                                "bw_hz",      "cr",        "payload_size", "preamble",
                                                "power_model", "transfer_bytes"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("unknown session field '" + key + "'");
        }
    }
    SessionFile f;
    auto& c = f.config;
    if (j.contains("image_path")) f.image_path = j.at("image_path").get<std::string>();
    if (j.contains("transfer_bytes")) f.transfer_bytes = j.at("transfer_bytes").get<std::size_t>();
    if (f.image_path.empty() && !f.transfer_bytes) {
        throw std::invalid_argument("session config needs image_path or transfer_bytes");
    }
    if (j.contains("loss_prob")) c.loss_prob = j.at("loss_prob").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("sf")) c.link.sf = j.at("sf").get<int>();
    if (j.contains("bw_hz")) c.link.bw_hz = j.at("bw_hz").get<double>();
    if (j.contains("cr")) c.link.coding_rate_denominator = j.at("cr").get<int>();
    if (j.contains("preamble")) c.link.preamble_len = j.at("preamble").get<int>();
    if (j.contains("payload_size")) f.payload_size = j.at("payload_size").get<std::size_t>();
    if (f.payload_size == 0 || f.payload_size > kMaxDataPayload) {
        throw std::invalid_argument("payload_size must be 1..60");
    }
    if (j.contains("power_model")) {
        const auto& p = j.at("power_model");
        for (const auto& [key, value] : p.items()) {
            if (key != "tx_w" && key != "rx_w" && key != "idle_w" && key != "sleep_w") {
                throw std::invalid_argument("unknown power_model field '" + key + "'");
            }
        }
        auto& pm = c.timing.power;
        if (p.contains("tx_w")) pm.tx_w = p.at("tx_w").get<double>();
        if (p.contains("rx_w")) pm.rx_w = p.at("rx_w").get<double>();
        if (p.contains("idle_w")) pm.idle_w = p.at("idle_w").get<double>();
        if (p.contains("sleep_w")) pm.sleep_w = p.at("sleep_w").get<double>();
    }
    c.validate();
    return f;
}

}  // namespace iotphy::ota
