#include "iotphy/lora/ser.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

#include "iotphy/channel/channel.hpp"
#include "iotphy/lora/demodulator.hpp"
#include "iotphy/lora/fir.hpp"
#include "iotphy/lora/modulator.hpp"

namespace iotphy::lora {
namespace {

constexpr std::size_t kGuardSamples = 16;
constexpr std::size_t kBlockSymbols = 64;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct StreamState {
    LoraParams params;
    std::size_t sps = 0;
    double amplitude = 0.0;
    SymbolDemodulator demod;
    std::optional<std::array<double, kFirTaps>> taps;
    // Zero-shift chirp plus one extra sample (the phase reached at the symbol
    // end). A shift-s chirp is a rotated slice of it, so no per-symbol sin/cos.
    std::vector<iq::ComplexSample> base;
    std::vector<std::pair<std::size_t, std::uint32_t>> sent;

    explicit StreamState(const StreamSpec& spec)
        : params(spec.params), sps(spec.params.samples_per_symbol()),
          amplitude(std::sqrt(std::pow(10.0, spec.snr_db / 10.0))), demod(spec.params) {
        if (params.osr >= 2) {
            taps = design_lowpass_taps(default_fir_cutoff_hz(params) /
                                       static_cast<double>(params.sample_rate_hz()));
        }
        append_chirp(base, params, 0, ChirpDirection::up, sps + 1);
    }

    // Phase-continuous like a real transmitter: every symbol ends half a cycle
    // from where it started, whatever its shift.
    void add_symbol(std::span<iq::ComplexSample> out, std::uint32_t symbol, iq::ComplexSample& carry) const {
        const std::size_t shift = static_cast<std::size_t>(symbol) * static_cast<std::size_t>(params.osr);
        const iq::ComplexSample head = amplitude * carry * std::conj(base[shift]);
        carry *= base[sps];
        const iq::ComplexSample tail = head * base[sps];
        const std::size_t split = sps - shift;
        for (std::size_t i = 0; i < split; ++i) out[i] += base[i + shift] * head;
        for (std::size_t i = split; i < sps; ++i) out[i] += base[i - split] * tail;
    }
};

}  // namespace

std::vector<SerPoint> measure_ser(std::span<const StreamSpec> streams, std::size_t trials,
                                  std::uint64_t seed) {
    if (streams.empty()) throw std::invalid_argument("measure_ser: no streams");
    for (const auto& s : streams) {
        s.params.validate();
        if (!std::isfinite(s.snr_db)) throw std::invalid_argument("measure_ser: snr_db must be finite");
        if (s.params.sample_rate_hz() != streams.front().params.sample_rate_hz()) {
            throw std::invalid_argument("measure_ser: streams must share one sample rate");
        }
    }

    std::vector<StreamState> state;
    state.reserve(streams.size());
    for (const auto& s : streams) state.emplace_back(s);

    std::vector<SerPoint> out(streams.size());
    for (std::size_t j = 0; j < streams.size(); ++j) out[j].snr_db = streams[j].snr_db;
    if (trials == 0) return out;

    const std::size_t sps0 = state.front().sps;
    const std::size_t block_len = 2 * kGuardSamples + (kBlockSymbols + 1) * sps0;
    const auto rate = streams.front().params.sample_rate_hz();

    std::mt19937_64 rng(seed);
    iq::SampleBuffer block(std::vector<iq::ComplexSample>(block_len), rate);

    while (out.front().trials < trials) {
        std::fill(block.samples.begin(), block.samples.end(), iq::ComplexSample{});
        for (auto& st : state) {
            st.sent.clear();
            std::uniform_int_distribution<std::size_t> offset(0, st.sps - 1);
            std::uniform_int_distribution<std::uint32_t> symbol(0, static_cast<std::uint32_t>(st.params.chips() - 1));
            iq::ComplexSample carry{1.0, 0.0};
            for (std::size_t pos = kGuardSamples + offset(rng); pos + st.sps + kGuardSamples <= block_len;
                 pos += st.sps) {
                const auto s = symbol(rng);
                st.add_symbol(std::span(block.samples).subspan(pos, st.sps), s, carry);
                st.sent.emplace_back(pos, s);
            }
        }
        channel::add_noise(block.samples, 1.0, rng);

        for (std::size_t j = 0; j < state.size(); ++j) {
            auto& st = state[j];
            const iq::SampleBuffer filtered = st.taps ? fir_apply(block, *st.taps) : block;
            for (const auto& [pos, s] : st.sent) {
                if (j == 0 && out[0].trials >= trials) break;
                const auto d = st.demod.demod(std::span(filtered.samples).subspan(pos, st.sps),
                                              ChirpDirection::up);
                ++out[j].trials;
                if (d.value != s) ++out[j].symbol_errors;
            }
        }
    }
    return out;
}

SerPoint measure_ser(const LoraParams& params, double snr_db, std::size_t trials, std::uint64_t seed) {
    const StreamSpec spec{params, snr_db};
    return measure_ser(std::span(&spec, 1), trials, seed).front();
}

std::uint64_t point_seed(std::uint64_t seed, double snr_db) noexcept {
    const auto milli_db = static_cast<std::int64_t>(std::llround(snr_db * 1000.0));
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(milli_db)));
}

std::vector<SerPoint> ser_sweep(const LoraParams& params, double snr_start_db, double snr_stop_db,
                                double snr_step_db, std::size_t trials, std::uint64_t seed,
                                std::size_t threads) {
    params.validate();
    if (!(snr_step_db > 0.0)) throw std::invalid_argument("ser_sweep: step must be positive");
    if (snr_stop_db < snr_start_db) throw std::invalid_argument("ser_sweep: stop below start");

    std::vector<double> snrs;
    for (std::size_t i = 0;; ++i) {
        const double snr = snr_start_db + static_cast<double>(i) * snr_step_db;
        if (snr > snr_stop_db + 1e-9) break;
        snrs.push_back(snr);
    }

    std::vector<SerPoint> out(snrs.size());
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < snrs.size(); i += stride) {
            out[i] = measure_ser(params, snrs[i], trials, point_seed(seed, snrs[i]));
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(snrs.size(), 1));
    if (n_threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
    }
    return out;
}

double approximate_threshold_db(const LoraParams& params) noexcept {
    const double n = static_cast<double>(params.chips());
    const double es_n0 = 2.0 * std::log(50.0 * (n - 1.0));
    return 10.0 * std::log10(es_n0 / n) - 10.0 * std::log10(static_cast<double>(params.osr));
}

ThresholdResult find_ser_threshold(const Scenario& scenario, std::size_t stream_index,
                                   const ThresholdSearch& search) {
    if (!(search.step_db > 0.0)) throw std::invalid_argument("find_ser_threshold: step must be positive");
    if (!(search.target_ser > 0.0 && search.target_ser < 1.0)) {
        throw std::invalid_argument("find_ser_threshold: target must lie in (0, 1)");
    }

    std::map<std::int64_t, SerPoint> cache;
    auto eval = [&](double snr) {
        const auto key = std::llround(snr * 1000.0);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        const auto specs = scenario(snr);
        if (stream_index >= specs.size()) throw std::invalid_argument("find_ser_threshold: bad stream index");
        auto p = measure_ser(specs, search.trials, point_seed(search.seed, snr))[stream_index];
        p.snr_db = snr;
        cache.emplace(key, p);
        return p;
    };

    ThresholdResult result;
    double snr = search.start_db;
    SerPoint p = eval(snr);
    const bool above = p.ser() > search.target_ser;
    SerPoint lo = p;  // worse than target
    SerPoint hi = p;  // at or better than target
    bool bracketed = false;
    for (std::size_t i = 1; i < search.max_points; ++i) {
        snr += above ? search.step_db : -search.step_db;
        const SerPoint q = eval(snr);
        if (above && q.ser() <= search.target_ser) {
            lo = p;
            hi = q;
            bracketed = true;
            break;
        }
        if (!above && q.ser() > search.target_ser) {
            lo = q;
            hi = p;
            bracketed = true;
            break;
        }
        p = q;
    }

    for (const auto& [key, point] : cache) result.points.push_back(point);
    if (!bracketed) return result;

    // Zero-error points are floored at half an error so the log stays finite.
    const double floor_ser = 0.5 / static_cast<double>(search.trials);
    const double y_lo = std::log10(std::max(lo.ser(), floor_ser));
    const double y_hi = std::log10(std::max(hi.ser(), floor_ser));
    const double y_t = std::log10(search.target_ser);
    const double t = y_lo == y_hi ? 0.5 : (y_lo - y_t) / (y_lo - y_hi);
    result.found = true;
    result.snr_db = lo.snr_db + std::clamp(t, 0.0, 1.0) * (hi.snr_db - lo.snr_db);
    return result;
}

}  // namespace iotphy::lora
