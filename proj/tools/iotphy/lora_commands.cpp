#include <iostream>
#include <optional>
#include <sstream>

#include "common.hpp"
#include "iotphy/ble/gfsk.hpp"
#include "iotphy/channel/channel.hpp"
#include "iotphy/common/bits.hpp"
#include "iotphy/iq/iq_file.hpp"
#include "iotphy/lora/airtime.hpp"
#include "iotphy/lora/demodulator.hpp"
#include "iotphy/lora/modulator.hpp"
#include "iotphy/lora/ser.hpp"

namespace iotphy::cli {
namespace {

lora::LoraParams load_params(const std::string& arg) {
    try {
        return load_json(arg).get<lora::LoraParams>();
    } catch (const nlohmann::json::exception& e) {
        throw CommandError(kUsage, std::string("bad LoRa config: ") + e.what());
    }
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

struct ModArgs {
    std::string config;
    std::string payload_hex;
    std::string out;
    std::optional<double> snr_db;
};

void run_mod(const ModArgs& a, const GlobalOptions& g) {
    const auto params = load_params(a.config);
    const auto payload = parse_hex(a.payload_hex);
    const lora::LoraFrame frame{lora::pack_bits(payload, params.sf), params};
    auto buf = lora::modulate_frame(frame);
    if (a.snr_db) buf = channel::awgn(buf, *a.snr_db, g.seed);
    iq::write_iq_file(a.out, buf, "LoRa frame, " + std::to_string(payload.size()) + " payload bytes");

    nlohmann::ordered_json j;
    j["samples"] = buf.size();
    j["sample_rate_hz"] = buf.sample_rate_hz;
    j["payload_symbols"] = frame.symbols.size();
    j["airtime_s"] = lora::airtime_s(params, payload.size());
    j["data_rate_bps"] = lora::data_rate_bps(params);
    std::cout << j.dump(2) << '\n';
}

struct DemodArgs {
    std::string config;
    std::string in;
    bool json = false;
    std::optional<std::size_t> payload_bytes;
};

void run_demod(const DemodArgs& a) {
    const auto params = load_params(a.config);
    const auto buf = iq::read_iq_file(a.in);
    const auto decoded = lora::demodulate_frame(buf, params, a.payload_bytes);
    if (!decoded) throw CommandError(kNotFound, "no LoRa preamble/SFD found in " + a.in);
    if (!a.json) {
        std::cout << to_hex(decoded->bytes) << '\n';
        return;
    }
    const auto& r = decoded->result;
    nlohmann::ordered_json j;
    j["payload_hex"] = to_hex(decoded->bytes);
    j["symbols"] = r.symbols;
    j["fft_peak_magnitudes"] = r.fft_peak_magnitudes;
    std::vector<std::string> dirs;
    for (const auto d : r.chirp_directions) dirs.emplace_back(lora::to_string(d));
    j["chirp_directions"] = dirs;
    j["start_offset_samples"] = r.start_offset_samples;
    j["frame_start"] = decoded->sync.frame_start;
    j["sync_values"] = decoded->sync.sync_values;
    j["dropped_samples"] = decoded->dropped_samples;
    j["truncated"] = decoded->truncated;
    std::cout << j.dump(2) << '\n';
}

// {snr_start_db, snr_stop_db, snr_step_db, trials_per_point, seed?,
//  params: LoRa config} or {..., modulation: "gfsk", params: GFSK config}.
void run_sweep(const std::string& spec_arg, const std::string& out, const GlobalOptions& g) {
    const auto spec = load_json(spec_arg);
    double start = 0, stop = 0, step = 0;
    std::size_t trials = 0;
    std::uint64_t seed = g.seed;
    std::string modulation = "lora";
    try {
        for (const auto& [key, value] : spec.items()) {
            if (key != "snr_start_db" && key != "snr_stop_db" && key != "snr_step_db" && key != "trials_per_point" &&
                key != "seed" && key != "params" && key != "modulation") {
                throw CommandError(kUsage, "unknown sweep field '" + key + "'");
            }
        }
        start = spec.at("snr_start_db").get<double>();
        stop = spec.at("snr_stop_db").get<double>();
        step = spec.at("snr_step_db").get<double>();
        trials = spec.at("trials_per_point").get<std::size_t>();
        if (spec.contains("seed")) seed = spec.at("seed").get<std::uint64_t>();
        if (spec.contains("modulation")) modulation = spec.at("modulation").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw CommandError(kUsage, std::string("bad sweep spec: ") + e.what());
    }
    if (!(step > 0.0)) throw CommandError(kUsage, "snr_step_db must be positive");
    if (trials < 100) throw CommandError(kUsage, "trials_per_point must be at least 100");
    if (stop < start) throw CommandError(kUsage, "snr_stop_db below snr_start_db");

    std::ostringstream csv;
    csv << "snr_db,symbol_errors,trials,ser\n";
    if (modulation == "lora") {
        const auto params = spec.contains("params") ? spec.at("params").get<lora::LoraParams>() : lora::LoraParams{};
        for (const auto& p : lora::ser_sweep(params, start, stop, step, trials, seed, g.threads)) {
            csv << format_double(p.snr_db) << ',' << p.symbol_errors << ',' << p.trials << ','
                << format_double(p.ser()) << '\n';
        }
    } else if (modulation == "gfsk") {
        ble::GfskConfig cfg;
        if (spec.contains("params")) {
            const auto& pj = spec.at("params");
            for (const auto& [key, value] : pj.items()) {
                if (key == "bit_rate_bps") cfg.bit_rate_bps = value.get<double>();
                else if (key == "modulation_index") cfg.modulation_index = value.get<double>();
                else if (key == "gaussian_bt") cfg.gaussian_bt = value.get<double>();
                else if (key == "osr") cfg.osr = value.get<int>();
                else throw CommandError(kUsage, "unknown GFSK config field '" + key + "'");
            }
        }
        cfg.validate();
        for (std::size_t i = 0;; ++i) {
            const double snr = start + static_cast<double>(i) * step;
            if (snr > stop + 1e-9) break;
            const auto p = ble::measure_ber(cfg, snr, trials, lora::point_seed(seed, snr));
            csv << format_double(p.snr_db) << ',' << p.bit_errors << ',' << p.bits << ','
                << format_double(p.ber()) << '\n';
        }
    } else {
        throw CommandError(kUsage, "modulation must be \"lora\" or \"gfsk\"");
    }
    write_text(out, csv.str());
}

struct ConcurrentArgs {
    std::string configs;
    double snr_a = 0.0;
    double snr_b = 0.0;
    std::string out;
    std::size_t trials = 10000;
};

void run_concurrent(const ConcurrentArgs& a, const GlobalOptions& g) {
    const auto j = load_json(a.configs);
    if (!j.is_array() || j.size() != 2) throw CommandError(kUsage, "--configs must be a JSON array of two LoRa configs");
    std::vector<lora::StreamSpec> streams{{j[0].get<lora::LoraParams>(), a.snr_a},
                                          {j[1].get<lora::LoraParams>(), a.snr_b}};
    if (streams[0].params.sample_rate_hz() != streams[1].params.sample_rate_hz()) {
        throw CommandError(kUsage, "both configs must share one sample rate (bw_hz * osr)");
    }
    if (lora::chirp_slope(streams[0].params) == lora::chirp_slope(streams[1].params)) {
        std::cerr << "warning: equal chirp slopes, the streams are not orthogonal\n";
    }
    const auto together = lora::measure_ser(streams, a.trials, g.seed);
    std::ostringstream csv;
    csv << "stream,sf,bw_hz,osr,snr_db,mode,symbol_errors,trials,ser\n";
    for (std::size_t i = 0; i < streams.size(); ++i) {
        const auto& p = streams[i].params;
        const auto solo = lora::measure_ser(p, streams[i].snr_db, a.trials, g.seed);
        for (const auto& [mode, pt] : {std::pair{"solo", solo}, std::pair{"concurrent", together[i]}}) {
            csv << i << ',' << p.sf << ',' << format_double(p.bw_hz) << ',' << p.osr << ','
                << format_double(streams[i].snr_db) << ',' << mode << ',' << pt.symbol_errors << ',' << pt.trials
                << ',' << format_double(pt.ser()) << '\n';
        }
    }
    write_text(a.out, csv.str());
}

}  // namespace

void register_lora_commands(CLI::App& app, GlobalOptions& global) {
    auto mod = std::make_shared<ModArgs>();
    auto* m = app.add_subcommand("lora-mod", "Modulate a LoRa frame to an I/Q file");
    m->add_option("--config", mod->config, "LoRa config JSON (file or inline)")->required();
    m->add_option("--payload-hex", mod->payload_hex, "Payload bytes as hex")->required();
    m->add_option("--out", mod->out, "Output I/Q file")->required();
    m->add_option("--snr-db", mod->snr_db, "Add white noise at this SNR (uses --seed)");
    m->callback([mod, &global] { run_mod(*mod, global); });

    auto demod = std::make_shared<DemodArgs>();
    auto* d = app.add_subcommand("lora-demod", "Find and decode a LoRa frame in an I/Q file");
    d->add_option("--config", demod->config, "LoRa config JSON (file or inline)")->required();
    d->add_option("--in", demod->in, "Input I/Q file")->required();
    d->add_flag("--json", demod->json, "Print the full demodulation result as JSON");
    d->add_option("--payload-bytes", demod->payload_bytes, "Expected payload length");
    d->callback([demod] { run_demod(*demod); });

    auto sweep = std::make_shared<std::pair<std::string, std::string>>();
    auto* s = app.add_subcommand("ser-sweep", "Symbol/bit error rate versus SNR, as CSV");
    s->add_option("--spec", sweep->first, "Sweep spec JSON (file or inline)")->required();
    s->add_option("--out", sweep->second, "Output CSV")->required();
    s->callback([sweep, &global] { run_sweep(sweep->first, sweep->second, global); });

    auto conc = std::make_shared<ConcurrentArgs>();
    auto* c = app.add_subcommand("concurrent-demo", "SER of two summed LoRa streams, solo and together");
    c->add_option("--configs", conc->configs, "JSON array of two LoRa configs")->required();
    c->add_option("--snr-a", conc->snr_a, "SNR of the first stream (dB)")->required();
    c->add_option("--snr-b", conc->snr_b, "SNR of the second stream (dB)")->required();
    c->add_option("--out", conc->out, "Output CSV")->required();
    c->add_option("--trials", conc->trials, "Symbols scored per stream")->check(CLI::Range(100, 100000000));
    c->callback([conc, &global] { run_concurrent(*conc, global); });
}

}  // namespace iotphy::cli
