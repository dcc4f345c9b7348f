#include "iotphy/lora/demodulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

#include "iotphy/lora/fir.hpp"
#include "iotphy/lora/modulator.hpp"

namespace iotphy::lora {

namespace {

void require_rate(const iq::SampleBuffer& buf, const LoraParams& params) {
    if (buf.sample_rate_hz != params.sample_rate_hz()) {
        throw std::invalid_argument("buffer sample rate " + std::to_string(buf.sample_rate_hz) +
                                    " Hz does not match bw * osr = " +
                                    std::to_string(params.sample_rate_hz()) + " Hz");
    }
}

std::vector<iq::ComplexSample> decimated_conj_reference(const LoraParams& params, ChirpDirection dir) {
    std::vector<iq::ComplexSample> full;
    append_chirp(full, params, 0, dir, params.samples_per_symbol());
    std::vector<iq::ComplexSample> out(params.chips());
    const auto osr = static_cast<std::size_t>(params.osr);
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = std::conj(full[n * osr]);
    }
    return out;
}

constexpr int kPreambleRun = 4;
constexpr double kPeakToMedian = 4.0;

}  // namespace

SymbolDemodulator::SymbolDemodulator(const LoraParams& params)
    : params_(params),
      up_ref_conj_((params.validate(), decimated_conj_reference(params, ChirpDirection::up))),
      down_ref_conj_(decimated_conj_reference(params, ChirpDirection::down)),
      fft_(params.chips()),
      magnitudes_(params.chips(), 0.0) {}

SymbolDecision SymbolDemodulator::demod(std::span<const iq::ComplexSample> window,
                                        ChirpDirection reference) {
    const std::size_t n_chips = params_.chips();
    if (window.size() != params_.samples_per_symbol()) {
        throw std::invalid_argument("demod window must be exactly 2^sf * osr samples, got " +
                                    std::to_string(window.size()));
    }
    const auto osr = static_cast<std::size_t>(params_.osr);
    const auto& ref = reference == ChirpDirection::up ? up_ref_conj_ : down_ref_conj_;
    auto in = fft_.input();
    for (std::size_t n = 0; n < n_chips; ++n) {
        in[n] = window[n * osr] * ref[n];
    }
    fft_.execute();
    const auto out = fft_.output();
    const double scale = static_cast<double>(osr);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t b = 0; b < n_chips; ++b) {
        const double m = std::abs(out[b]) * scale;
        magnitudes_[b] = m;
        if (m > best_mag) {
            best_mag = m;
            best = b;
        }
    }
    // A downchirp shifted by s dechirps to a tone at -s.
    const std::size_t value = reference == ChirpDirection::up ? best : (n_chips - best) % n_chips;
    return {static_cast<std::uint32_t>(value), best_mag};
}

ChirpDirection SymbolDemodulator::detect_direction(std::span<const iq::ComplexSample> window) {
    const double up = demod(window, ChirpDirection::up).peak_magnitude;
    const double down = demod(window, ChirpDirection::down).peak_magnitude;
    return down > up ? ChirpDirection::down : ChirpDirection::up;
}

double SymbolDemodulator::last_median_magnitude() const {
    scratch_.assign(magnitudes_.begin(), magnitudes_.end());
    const auto mid = scratch_.begin() + static_cast<std::ptrdiff_t>(scratch_.size() / 2);
    std::nth_element(scratch_.begin(), mid, scratch_.end());
    return *mid;
}

SymbolDecision demod_symbol(const iq::SampleBuffer& buf, const LoraParams& params,
                            ChirpDirection reference) {
    require_rate(buf, params);
    SymbolDemodulator demod(params);
    return demod.demod(buf.samples, reference);
}

ChirpDirection detect_chirp_direction(const iq::SampleBuffer& buf, const LoraParams& params) {
    require_rate(buf, params);
    SymbolDemodulator demod(params);
    return demod.detect_direction(buf.samples);
}

std::optional<SyncResult> packet_sync(const iq::SampleBuffer& buf, const LoraParams& params) {
    params.validate();
    SymbolDemodulator demod(params);
    const std::size_t sps = params.samples_per_symbol();
    const std::size_t n_chips = params.chips();
    const auto osr = static_cast<std::size_t>(params.osr);
    const auto& x = buf.samples;
    auto window = [&](std::size_t start) {
        return std::span<const iq::ComplexSample>(x).subspan(start, sps);
    };

    // Coarse: non-overlapping windows, looking for a run of identical strong bins.
    std::optional<std::size_t> run_start;
    std::uint32_t run_bin = 0;
    int run_len = 0;
    for (std::size_t i = 0; (i + 1) * sps <= x.size(); ++i) {
        const auto d = demod.demod(window(i * sps), ChirpDirection::up);
        const bool strong =
            d.peak_magnitude > 0.0 && d.peak_magnitude >= kPeakToMedian * demod.last_median_magnitude();
        if (strong && run_len > 0 && d.value == run_bin) {
            ++run_len;
        } else {
            run_len = strong ? 1 : 0;
        }
        run_bin = d.value;
        if (run_len >= kPreambleRun) {
            run_start = (i + 1 - kPreambleRun) * sps;
            break;
        }
    }
    if (!run_start) {
        return std::nullopt;
    }

    // The window read bin b, so the next chirp boundary is (N - b) chips later.
    const std::size_t coarse = *run_start + ((n_chips - run_bin) % n_chips) * osr;

    // Fine: pick the sample offset that maximizes bin 0 over two preamble windows.
    std::size_t boundary = coarse;
    double best_score = -1.0;
    const auto span = static_cast<std::ptrdiff_t>(osr);
    for (std::ptrdiff_t delta = -span; delta <= span; ++delta) {
        const std::ptrdiff_t cand = static_cast<std::ptrdiff_t>(coarse) + delta;
        if (cand < 0 || static_cast<std::size_t>(cand) + sps > x.size()) {
            continue;
        }
        const auto c = static_cast<std::size_t>(cand);
        double score = 0.0;
        for (std::size_t w = 0; w < 2 && c + (w + 1) * sps <= x.size(); ++w) {
            demod.demod(window(c + w * sps), ChirpDirection::up);
            score += demod.last_magnitudes()[0];
        }
        if (score > best_score) {
            best_score = score;
            boundary = c;
        }
    }

    // Walk forward to the SFD.
    std::array<std::uint32_t, 2> last_up{0, 0};
    std::size_t ups = 0;
    for (std::size_t start = boundary; start + sps <= x.size(); start += sps) {
        const auto up = demod.demod(window(start), ChirpDirection::up);
        const auto down = demod.demod(window(start), ChirpDirection::down);
        if (down.peak_magnitude > up.peak_magnitude) {
            const bool confirmed =
                start + 2 * sps <= x.size() &&
                demod.detect_direction(window(start + sps)) == ChirpDirection::down;
            if (!confirmed || ups < 2) {
                return std::nullopt;
            }
            SyncResult r;
            r.sfd_start = start;
            r.sync_values = last_up;
            r.payload_start = start + static_cast<std::size_t>(std::floor(params.sfd_len_symbols)) * sps +
                              sfd_tail_samples(params);
            r.frame_start = static_cast<std::ptrdiff_t>(start) -
                            static_cast<std::ptrdiff_t>((static_cast<std::size_t>(params.preamble_len) + 2) * sps);
            return r;
        }
        last_up[0] = last_up[1];
        last_up[1] = up.value;
        ++ups;
    }
    return std::nullopt;
}

std::optional<FrameDecode> demodulate_frame(const iq::SampleBuffer& buf, const LoraParams& params,
                                            std::optional<std::size_t> payload_bytes) {
    params.validate();
    require_rate(buf, params);
    const iq::SampleBuffer filtered =
        params.osr >= 2 ? fir_lowpass(buf, default_fir_cutoff_hz(params)) : buf;

    const auto sync = packet_sync(filtered, params);
    if (!sync) {
        return std::nullopt;
    }

    const std::size_t sps = params.samples_per_symbol();
    const std::size_t n = filtered.size();
    const std::size_t available = sync->payload_start <= n ? (n - sync->payload_start) / sps : 0;
    std::size_t wanted = available;
    if (payload_bytes) {
        wanted = symbols_for_bytes(*payload_bytes, params.sf);
    }
    const std::size_t count = std::min(wanted, available);

    FrameDecode out;
    out.sync = *sync;
    out.truncated = wanted > available;
    auto& r = out.result;
    r.start_offset_samples = sync->payload_start;
    r.symbols.reserve(count);
    r.fft_peak_magnitudes.reserve(count);
    r.chirp_directions.reserve(count);

    SymbolDemodulator demod(params);
    for (std::size_t k = 0; k < count; ++k) {
        const auto w = std::span<const iq::ComplexSample>(filtered.samples).subspan(sync->payload_start + k * sps, sps);
        const auto up = demod.demod(w, ChirpDirection::up);
        const auto down = demod.demod(w, ChirpDirection::down);
        r.symbols.push_back(up.value);
        r.fft_peak_magnitudes.push_back(up.peak_magnitude);
        r.chirp_directions.push_back(down.peak_magnitude > up.peak_magnitude ? ChirpDirection::down
                                                                              : ChirpDirection::up);
    }
    const std::size_t consumed_end = sync->payload_start + count * sps;
    out.dropped_samples = consumed_end < n ? n - consumed_end : 0;

    std::size_t n_bytes = count * static_cast<std::size_t>(params.sf) / 8;
    if (payload_bytes && !out.truncated) {
        n_bytes = *payload_bytes;
    }
    const std::size_t used = symbols_for_bytes(n_bytes, params.sf);
    out.bytes = unpack_bits(std::span<const std::uint32_t>(r.symbols).first(used), params.sf, n_bytes);
    return out;
}

ConcurrentDecode concurrent_decode(const iq::SampleBuffer& buf, std::span<const ConcurrentStream> streams) {
    ConcurrentDecode out;
    for (std::size_t i = 0; i < streams.size(); ++i) {
        streams[i].params.validate();
        if (streams[i].params.sample_rate_hz() != buf.sample_rate_hz) {
            throw std::invalid_argument("configuration " + std::to_string(i) +
                                        " does not share the buffer sample rate");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (chirp_slope(streams[i].params) == chirp_slope(streams[j].params)) {
                out.non_orthogonal = true;
                out.warnings.push_back("configurations " + std::to_string(j) + " and " + std::to_string(i) +
                                       " share chirp slope " +
                                       std::to_string(chirp_slope(streams[i].params).hz_per_s) +
                                       " Hz/s and are not orthogonal");
            }
        }
    }
    std::vector<std::future<std::optional<FrameDecode>>> jobs;
    jobs.reserve(streams.size());
    for (const auto& s : streams) {
        jobs.push_back(std::async(std::launch::async, [&buf, &s] {
            return demodulate_frame(buf, s.params, s.payload_bytes);
        }));
    }
    for (auto& j : jobs) {
        out.results.push_back(j.get());
    }
    return out;
}

ConcurrentDecode concurrent_decode(const iq::SampleBuffer& buf, std::span<const LoraParams> params_list) {
    std::vector<ConcurrentStream> streams;
    streams.reserve(params_list.size());
    for (const auto& p : params_list) {
        streams.push_back({p, std::nullopt});
    }
    return concurrent_decode(buf, streams);
}

}  // namespace iotphy::lora
