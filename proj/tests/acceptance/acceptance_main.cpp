// End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "iotphy/ble/gfsk.hpp"
#include "iotphy/ble/packet.hpp"
#include "iotphy/ble/schedule.hpp"
#include "iotphy/channel/channel.hpp"
#include "iotphy/iq/spectrum.hpp"
#include "iotphy/iq/word_codec.hpp"
#include "iotphy/lora/demodulator.hpp"
#include "iotphy/lora/modulator.hpp"
#include "iotphy/lora/ser.hpp"
#include "iotphy/ota/firmware.hpp"
#include "iotphy/ota/lz.hpp"
#include "iotphy/ota/session.hpp"
#include "oracles/ble_oracle.hpp"
#include "oracles/gen.hpp"
#include "oracles/lora_oracle.hpp"

using namespace iotphy;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

lora::LoraParams make(int sf, double bw, int osr) {
    lora::LoraParams p;
    p.sf = sf;
    p.bw_hz = bw;
    p.osr = osr;
    return p;
}

// ---- 1 ----------------------------------------------------------------------

Outcome lora_roundtrip() {
    const auto t0 = Clock::now();
    oracle::Gen g(1001);
    std::size_t configs = 0;
    std::size_t errors = 0;
    std::size_t symbols = 0;
    std::string first_bad;
    for (int sf = 6; sf <= 12; ++sf) {
        for (double bw : {125000.0, 250000.0, 500000.0}) {
            for (int osr : {1, 2, 4}) {
                const auto p = make(sf, bw, osr);
                ++configs;
                for (int frame = 0; frame < 10; ++frame) {
                    lora::LoraFrame f;
                    f.params = p;
                    for (int k = 0; k < 100; ++k) f.symbols.push_back(static_cast<std::uint32_t>(g.size(0, p.chips() - 1)));
                    const auto d = lora::demodulate_frame(lora::modulate_frame(f), p);
                    symbols += f.symbols.size();
                    std::size_t e = f.symbols.size();
                    if (d && d->result.symbols.size() == f.symbols.size()) {
                        e = 0;
                        for (std::size_t k = 0; k < f.symbols.size(); ++k) e += d->result.symbols[k] != f.symbols[k];
                    }
                    if (e && first_bad.empty()) first_bad = fmt(" first failure sf=%d bw=%.0f osr=%d", sf, bw, osr);
                    errors += e;
                }
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return {errors == 0 && secs < 120.0,
            fmt("%zu configs, %zu symbols, %zu errors, %.1f s", configs, symbols, errors, secs) + first_bad};
}

// ---- 2 ----------------------------------------------------------------------

Outcome oracle_equivalence() {
    oracle::Gen g(1002);
    std::string detail;
    bool ok = true;
    for (int sf = 6; sf <= 9; ++sf) {
        const auto p = make(sf, 125000.0, 1);
        lora::SymbolDemodulator demod(p);
        // Noise around the decision threshold so wrong answers happen too.
        const double snr = lora::approximate_threshold_db(p) - 2.0;
        int agree = 0;
        int ties = 0;
        int bad = 0;
        constexpr int kTrials = 200;
        for (int t = 0; t < kTrials; ++t) {
            const auto s = static_cast<std::uint32_t>(g.size(0, p.chips() - 1));
            const auto noisy = channel::awgn(lora::chirp_gen(p, s, lora::ChirpDirection::up), snr, g.u64());
            const auto fast = demod.demod(noisy.samples, lora::ChirpDirection::up);
            const auto slow = oracle::brute_force_correlation(noisy.samples, p, lora::ChirpDirection::up);
            if (fast.value == slow.index) {
                ++agree;
            } else if (std::abs(slow.value - slow.runner_up) < 1e-9 * slow.value) {
                ++ties;
            } else {
                ++bad;
            }
        }
        ok = ok && agree * 100 >= kTrials * 99 && bad == 0;
        detail += fmt("sf%d %d/%d agree (%d ties) ", sf, agree, kTrials, ties);
    }
    return {ok, detail};
}

// ---- 3, 5, 6 ----------------------------------------------------------------

lora::ThresholdSearch search_from(double start) {
    lora::ThresholdSearch s;
    s.trials = 10000;
    s.seed = 1003;
    s.start_db = start;
    return s;
}

double solo_threshold(const lora::LoraParams& p) {
    const auto r = lora::find_ser_threshold([&](double snr) { return std::vector<lora::StreamSpec>{{p, snr}}; }, 0,
                                            search_from(lora::approximate_threshold_db(p)));
    return r.found ? r.snr_db : std::nan("");
}

Outcome processing_gain() {
    std::vector<double> th;
    std::string detail = "thresholds";
    for (int sf = 6; sf <= 12; ++sf) {
        th.push_back(solo_threshold(make(sf, 125000.0, 1)));
        detail += fmt(" sf%d=%.2f", sf, th.back());
    }
    bool ok = true;
    detail += " dB; steps";
    for (std::size_t i = 1; i < th.size(); ++i) {
        const double step = th[i - 1] - th[i];
        ok = ok && step >= 2.5 && step <= 3.5;
        detail += fmt(" %.2f", step);
    }
    return {ok, detail};
}

// SF8/BW125 at osr 2 and SF8/BW250 at osr 1 share a 250 kHz sample rate.
const lora::LoraParams kNarrow = make(8, 125000.0, 2);
const lora::LoraParams kWide = make(8, 250000.0, 1);

double threshold_with(const lora::LoraParams& desired, const lora::LoraParams& other,
                      std::function<double(double)> other_snr, double start) {
    const auto r = lora::find_ser_threshold(
        [&](double snr) { return std::vector<lora::StreamSpec>{{desired, snr}, {other, other_snr(snr)}}; }, 0,
        search_from(start));
    return r.found ? r.snr_db : std::nan("");
}

Outcome concurrent_reception(double solo_narrow, double solo_wide) {
    const auto equal = [](double s) { return s; };
    const double conc_narrow = threshold_with(kNarrow, kWide, equal, solo_narrow);
    const double conc_wide = threshold_with(kWide, kNarrow, equal, solo_wide);
    const double d_narrow = conc_narrow - solo_narrow;
    const double d_wide = conc_wide - solo_wide;
    return {d_narrow <= 2.5 && d_wide <= 1.0,
            fmt("BW125 solo %.2f concurrent %.2f shift %.2f dB (<= 2.5); BW250 solo %.2f concurrent %.2f shift %.2f dB "
                "(<= 1.0)",
                solo_narrow, conc_narrow, d_narrow, solo_wide, conc_wide, d_wide)};
}

Outcome near_far(double solo_narrow, double solo_wide) {
    // Interferer power equal to the (unit) noise power: 0 dB on the same axis.
    const auto at_noise = [](double) { return 0.0; };
    const double nf_narrow = threshold_with(kNarrow, kWide, at_noise, solo_narrow);
    const double nf_wide = threshold_with(kWide, kNarrow, at_noise, solo_wide);
    const double d_narrow = nf_narrow - solo_narrow;
    const double d_wide = nf_wide - solo_wide;
    return {std::abs(d_narrow - 3.0) <= 1.0 && std::abs(d_wide - 3.0) <= 1.0,
            fmt("BW125 shift %.2f dB, BW250 shift %.2f dB (target 3 +/- 1)", d_narrow, d_wide)};
}

// ---- 4 ----------------------------------------------------------------------

Outcome chirp_discrimination() {
    oracle::Gen g(1004);
    bool ok = true;
    std::string detail;
    for (int sf = 6; sf <= 12; ++sf) {
        const auto p = make(sf, 125000.0, 1);
        lora::SymbolDemodulator demod(p);
        int correct[2] = {0, 0};
        for (int d = 0; d < 2; ++d) {
            const auto dir = d == 0 ? lora::ChirpDirection::up : lora::ChirpDirection::down;
            for (int t = 0; t < 1000; ++t) {
                const auto s = static_cast<std::uint32_t>(g.size(0, p.chips() - 1));
                const auto noisy = channel::awgn(lora::chirp_gen(p, s, dir), 0.0, g.u64());
                correct[d] += demod.detect_direction(noisy.samples) == dir;
            }
        }
        ok = ok && correct[0] >= 990 && correct[1] >= 990;
        detail += fmt("sf%d up %d down %d; ", sf, correct[0], correct[1]);
    }
    return {ok, detail + "of 1000 at 0 dB"};
}

// ---- 7 ----------------------------------------------------------------------

Outcome ble_bit_exact() {
    oracle::Gen g(1007);
    int crc_ok = 0;
    int white_ok = 0;
    for (int t = 0; t < 1000; ++t) {
        ble::BleAdvPdu pdu;
        pdu.pdu_type = static_cast<std::uint8_t>(g.integer(0, 15));
        pdu.flags = static_cast<std::uint8_t>(g.integer(0, 15));
        for (auto& b : pdu.adv_address) b = static_cast<std::uint8_t>(g.u64());
        pdu.adv_data = g.bytes(g.size(0, ble::kMaxAdvData));
        const int ch = g.integer(37, 39);
        const auto pkt = ble::make_packet(pdu, ch);
        const auto body = pdu.to_bytes();
        crc_ok += pkt.crc == oracle::crc24_bitwise(body);
        auto clear = body;
        const auto crc_bytes = ble::crc24_bytes(pkt.crc);
        clear.insert(clear.end(), crc_bytes.begin(), crc_bytes.end());
        white_ok += pkt.whitened_bytes() == oracle::whiten_bitwise(clear, ch);
    }
    const bool empty_ok = ble::crc24({}) == 0x555555;
    int involution = 0;
    for (int ch = 0; ch <= 39; ++ch) {
        bool all = true;
        for (int t = 0; t < 50; ++t) {
            const auto x = g.bytes(g.size(0, 64));
            all = all && ble::whiten(ble::whiten(x, ch), ch) == x;
        }
        involution += all;
    }
    return {crc_ok == 1000 && white_ok == 1000 && empty_ok && involution == 40,
            fmt("CRC %d/1000, whitening %d/1000, empty CRC 0x%06X, involution %d/40 channels", crc_ok, white_ok,
                ble::crc24({}), involution)};
}

// ---- 8 ----------------------------------------------------------------------

Outcome gfsk() {
    oracle::Gen g(1008);
    const ble::GfskConfig cfg;
    const auto bits = g.bits(10000);
    const auto sig = ble::gfsk_modulate(bits, cfg);
    double env = 0.0;
    for (const auto& s : sig.samples) env = std::max(env, std::abs(std::abs(s) - 1.0));
    const auto back = ble::gfsk_demodulate(sig, cfg);
    std::size_t errors = back.size() == bits.size() ? 0 : bits.size();
    for (std::size_t i = 0; i < std::min(back.size(), bits.size()); ++i) errors += back[i] != bits[i];
    const double obw = iq::occupied_bandwidth_hz(sig);
    return {env <= 1e-9 && errors == 0 && obw <= 2.2e6,
            fmt("envelope error %.2e, %zu bit errors / 10000, 99%% OBW %.3f MHz", env, errors, obw / 1e6)};
}

// ---- 9 ----------------------------------------------------------------------

Outcome adv_timing() {
    using namespace std::chrono_literals;
    bool ok = true;
    std::size_t checked = 0;
    for (const auto interval : {20ms, 21ms, 100ms, 1000ms}) {
        const auto ev = ble::advertising_schedule(interval, 3ms, 10);
        for (const std::uint64_t fs : {1000000ULL, 4000000ULL}) {
            const auto hop = ble::sample_index(220us, fs);
            const auto period = ble::sample_index(interval, fs);
            for (std::size_t i = 1; i < ev.size(); ++i) {
                const auto a = ble::sample_index(ev[i - 1].start, fs);
                const auto b = ble::sample_index(ev[i].start, fs);
                if (i % 3 != 0) {
                    ok = ok && b - a == hop && ev[i].channel == ev[i - 1].channel + 1;
                } else {
                    ok = ok && b - ble::sample_index(ev[i - 3].start, fs) == period && period >= ble::sample_index(20ms, fs);
                }
                ++checked;
            }
        }
    }
    bool rejects = false;
    try {
        ble::advertising_schedule(19ms, 0ns, 1);
    } catch (const std::invalid_argument&) {
        rejects = true;
    }
    return {ok && rejects, fmt("%zu gaps exact to the sample at 1 and 4 MS/s, 19 ms interval %s", checked,
                               rejects ? "rejected" : "accepted")};
}

// ---- 10 ---------------------------------------------------------------------

Outcome ota_session() {
    oracle::Gen g(1010);
    const auto plan = ota::TransferPlan::raw(g.bytes(99000));
    std::vector<double> times;
    bool identical = true;
    double energy0 = 0.0;
    std::string detail;
    for (double loss : {0.0, 0.05, 0.1, 0.2}) {
        ota::SessionConfig cfg;
        cfg.loss_prob = loss;
        cfg.seed = 42;
        const auto r = ota::simulate_session(plan, plan.stream, cfg);
        identical = identical && r.completed && r.image_match;
        times.push_back(r.total_time_s);
        if (loss == 0.0) energy0 = r.node_energy_mj;
        detail += fmt("loss %.2f: %.1f s; ", loss, r.total_time_s);
    }
    const bool time_ok = times[0] >= 75.0 && times[0] <= 225.0;
    const bool energy_ok = std::abs(energy0 - 6144.0) <= 0.5 * 6144.0;
    bool monotone = true;
    for (std::size_t i = 1; i < times.size(); ++i) monotone = monotone && times[i] > times[i - 1];
    return {time_ok && energy_ok && monotone && identical,
            detail + fmt("zero-loss energy %.0f mJ; %s; images %s", energy0, monotone ? "monotone" : "NOT monotone",
                         identical ? "identical" : "DIFFER")};
}

// ---- 11 ---------------------------------------------------------------------

Outcome compression() {
    oracle::Gen g(1011);
    std::vector<std::vector<std::uint8_t>> corpus;
    corpus.emplace_back();
    corpus.emplace_back(ota::kMaxBlockSize, 0x00);
    corpus.emplace_back(ota::kMaxBlockSize, 0xFF);
    std::vector<std::uint8_t> pat;
    for (std::size_t i = 0; i < ota::kMaxBlockSize; ++i) pat.push_back(static_cast<std::uint8_t>(i % 251));
    corpus.push_back(pat);
    std::vector<std::uint8_t> near;  // one-byte mutations break matches constantly
    for (std::size_t i = 0; i < ota::kMaxBlockSize; ++i) near.push_back(static_cast<std::uint8_t>(i % 7 == 0 ? g.u64() : 0x55));
    corpus.push_back(near);
    for (int t = 0; t < 1000; ++t) corpus.push_back(g.bytes(g.size(0, ota::kMaxBlockSize)));

    std::size_t ok = 0;
    std::size_t peak = 0;
    for (const auto& x : corpus) {
        ota::PeakCountingResource mem;
        const auto c = ota::compress_block(x);
        const auto y = ota::decompress_block(c, &mem);
        ok += std::equal(y.begin(), y.end(), x.begin(), x.end());
        peak = std::max(peak, mem.peak());
    }
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto x = g.bytes(ota::kMaxBlockSize);
        worst = std::max(worst, static_cast<double>(ota::compress_block(x).size()) / static_cast<double>(x.size()));
    }
    constexpr std::size_t kSlack = 64;
    return {ok == corpus.size() && peak <= ota::kMaxBlockSize + kSlack && worst <= 1.05,
            fmt("%zu/%zu roundtrips, decoder peak %zu B (block %zu), worst random expansion %.3f%%", ok, corpus.size(),
                peak, ota::kMaxBlockSize, (worst - 1.0) * 100.0)};
}

// ---- 12 ---------------------------------------------------------------------

Outcome framing() {
    oracle::Gen g(1012);
    int roundtrip = 0;
    int resync = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<iq::QuantizedSample> x(g.size(10, 100));
        for (auto& s : x) {
            s.i_q13 = static_cast<std::int16_t>(g.integer(iq::kQ13Min, iq::kQ13Max));
            s.q_q13 = static_cast<std::int16_t>(g.integer(iq::kQ13Min, iq::kQ13Max));
        }
        auto bits = iq::frame_words(x);
        roundtrip += iq::deframe_words(bits).samples == x;

        const std::size_t at = g.size(0, bits.size() - 1);
        if (g.coin()) {
            bits.insert(bits.begin() + static_cast<std::ptrdiff_t>(at), static_cast<std::uint8_t>(g.coin()));
        } else {
            bits.erase(bits.begin() + static_cast<std::ptrdiff_t>(at));
        }
        const auto y = iq::deframe_words(bits).samples;
        const std::size_t from = std::min(x.size(), at / iq::kWordBits + 2);
        const std::size_t tail = x.size() - from;
        resync += y.size() >= tail && std::equal(x.begin() + static_cast<std::ptrdiff_t>(from), x.end(),
                                                 y.end() - static_cast<std::ptrdiff_t>(tail));
    }
    return {roundtrip == 1000 && resync == 1000,
            fmt("roundtrip %d/1000, resync within 2 words %d/1000", roundtrip, resync)};
}

}  // namespace

int main() {
    std::vector<std::pair<int, std::string>> names{
        {1, "LoRa roundtrip"},         {2, "oracle equivalence"},  {3, "processing gain"},
        {4, "chirp discrimination"},   {5, "concurrent reception"}, {6, "near-far"},
        {7, "BLE bit-exactness"},      {8, "GFSK"},                {9, "advertising timing"},
        {10, "OTA session"},           {11, "compression"},        {12, "framing codec"}};
    std::vector<Outcome> out(13);

    // Timed on its own so the runtime bound is not distorted by other work.
    out[1] = lora_roundtrip();

    auto solo_n = std::async(std::launch::async, [] { return solo_threshold(kNarrow); });
    auto solo_w = std::async(std::launch::async, [] { return solo_threshold(kWide); });
    auto c3 = std::async(std::launch::async, processing_gain);
    const double sn = solo_n.get();
    const double sw = solo_w.get();
    auto c5 = std::async(std::launch::async, [=] { return concurrent_reception(sn, sw); });
    auto c6 = std::async(std::launch::async, [=] { return near_far(sn, sw); });

    out[2] = oracle_equivalence();
    out[4] = chirp_discrimination();
    out[7] = ble_bit_exact();
    out[8] = gfsk();
    out[9] = adv_timing();
    out[10] = ota_session();
    out[11] = compression();
    out[12] = framing();
    out[3] = c3.get();
    out[5] = c5.get();
    out[6] = c6.get();

    int failures = 0;
    for (const auto& [n, name] : names) {
        const auto& o = out[static_cast<std::size_t>(n)];
        failures += !o.pass;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(names.size()) - failures, names.size());
    return failures == 0 ? 0 : 1;
}
