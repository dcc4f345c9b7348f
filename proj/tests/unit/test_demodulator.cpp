#include <stdexcept>
#include <doctest.h>

#include <cmath>

#include "iotphy/channel/channel.hpp"
#include "iotphy/lora/demodulator.hpp"
#include "iotphy/lora/modulator.hpp"
#include "oracles/gen.hpp"
#include "oracles/lora_oracle.hpp"

using namespace iotphy;
using namespace iotphy::lora;

namespace {

LoraParams make(int sf, double bw, int osr) {
    LoraParams p;
    p.sf = sf;
    p.bw_hz = bw;
    p.osr = osr;
    return p;
}

}  // namespace

TEST_CASE("noiseless symbols decode with peak N*osr") {
    for (int osr : {1, 2, 4}) {
        const auto p = make(7, 125000.0, osr);
        SymbolDemodulator d(p);
        for (std::uint32_t s = 0; s < p.chips(); ++s) {
            const auto c = chirp_gen(p, s, ChirpDirection::up);
            const auto r = d.demod(c.samples, ChirpDirection::up);
            CHECK(r.value == s);
            CHECK(r.peak_magnitude == doctest::Approx(128.0 * osr).epsilon(1e-9));
        }
    }
}

TEST_CASE("downchirp reference decodes downchirps") {
    const auto p = make(8, 250000.0, 2);
    oracle::Gen g(1);
    for (int t = 0; t < 20; ++t) {
        const auto s = static_cast<std::uint32_t>(g.size(0, 255));
        const auto c = chirp_gen(p, s, ChirpDirection::down);
        CHECK(demod_symbol(c, p, ChirpDirection::down).value == s);
        CHECK(detect_chirp_direction(c, p) == ChirpDirection::down);
        CHECK(detect_chirp_direction(chirp_gen(p, s, ChirpDirection::up), p) == ChirpDirection::up);
    }
}

TEST_CASE("wrong window length and rate are rejected") {
    const auto p = make(7, 125000.0, 1);
    SymbolDemodulator d(p);
    std::vector<iq::ComplexSample> w(127);
    CHECK_THROWS_AS(d.demod(w, ChirpDirection::up), std::invalid_argument);
    const iq::SampleBuffer wrong_rate(std::vector<iq::ComplexSample>(128), 250000);
    CHECK_THROWS_AS(demod_symbol(wrong_rate, p, ChirpDirection::up), std::invalid_argument);
}

TEST_CASE("exact tie reads as up and lowest bin") {
    const auto p = make(7, 125000.0, 1);
    SymbolDemodulator d(p);
    const std::vector<iq::ComplexSample> zero(128);
    CHECK(d.demod(zero, ChirpDirection::up).value == 0);
    CHECK(d.detect_direction(zero) == ChirpDirection::up);
}

TEST_CASE("symbol 37 at +10 dB decodes reliably") {
    const auto p = make(7, 125000.0, 1);
    const auto c = chirp_gen(p, 37, ChirpDirection::up);
    SymbolDemodulator d(p);
    int ok = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const auto noisy = channel::awgn(c, 10.0, t);
        ok += d.demod(noisy.samples, ChirpDirection::up).value == 37;
    }
    CHECK(ok >= 999);
}

TEST_CASE("upchirp at 0 dB is recognised as up") {
    const auto p = make(8, 125000.0, 1);
    oracle::Gen g(12);
    SymbolDemodulator d(p);
    int ok = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const auto c = chirp_gen(p, static_cast<std::uint32_t>(g.size(0, 255)), ChirpDirection::up);
        ok += d.detect_direction(channel::awgn(c, 0.0, t).samples) == ChirpDirection::up;
    }
    CHECK(ok >= 990);
}

TEST_CASE("property: FFT demod agrees with brute-force correlation") {
    oracle::Gen g(31);
    int agree = 0;
    int total = 0;
    for (int sf = 6; sf <= 9; ++sf) {
        for (int osr : {1, 2}) {
            const auto p = make(sf, 125000.0, osr);
            SymbolDemodulator d(p);
            for (int t = 0; t < 25; ++t) {
                const auto s = static_cast<std::uint32_t>(g.size(0, p.chips() - 1));
                const auto noisy = channel::awgn(chirp_gen(p, s, ChirpDirection::up), g.real(-15.0, 0.0), g.u64());
                const auto fast = d.demod(noisy.samples, ChirpDirection::up);
                const auto slow = oracle::brute_force_correlation(noisy.samples, p, ChirpDirection::up);
                ++total;
                if (fast.value == slow.index) {
                    ++agree;
                    CHECK(fast.peak_magnitude == doctest::Approx(slow.value).epsilon(1e-9));
                } else {
                    CHECK(std::abs(slow.value - slow.runner_up) < 1e-9 * slow.value);
                }
            }
        }
    }
    CHECK(agree >= total * 99 / 100);
}

TEST_CASE("folded spectrum matches a naive DFT of the decimated dechirp") {
    const auto p = make(6, 125000.0, 4);
    oracle::Gen g(2);
    const auto noisy = channel::awgn(chirp_gen(p, 17, ChirpDirection::up), 3.0, 5);
    SymbolDemodulator d(p);
    d.demod(noisy.samples, ChirpDirection::up);
    const auto ref = chirp_gen(p, 0, ChirpDirection::up);
    std::vector<std::complex<double>> dec(p.chips());
    for (std::size_t k = 0; k < dec.size(); ++k) dec[k] = noisy.samples[k * 4] * std::conj(ref.samples[k * 4]);
    const auto spec = oracle::naive_dft(dec);
    const auto mags = d.last_magnitudes();
    for (std::size_t k = 0; k < spec.size(); ++k) {
        CHECK(mags[k] == doctest::Approx(4.0 * std::abs(spec[k])).epsilon(1e-9));
    }
}

TEST_CASE("property: cross-slope correlation stays small") {
    // A chirp of one slope seen through a demodulator of another.
    const std::vector<std::pair<LoraParams, LoraParams>> pairs{
        {make(8, 125000.0, 2), make(8, 250000.0, 1)},
        {make(7, 125000.0, 4), make(9, 500000.0, 1)},
        {make(9, 125000.0, 2), make(7, 250000.0, 1)},
    };
    oracle::Gen g(40);
    for (const auto& [a, b] : pairs) {
        REQUIRE(a.sample_rate_hz() == b.sample_rate_hz());
        SymbolDemodulator db(b);
        const double auto_peak = static_cast<double>(b.samples_per_symbol());
        const double bound = 4.0 / std::sqrt(static_cast<double>(1u << std::min(a.sf, b.sf))) * auto_peak;
        for (int t = 0; t < 20; ++t) {
            LoraFrame f;
            f.params = a;
            f.params.preamble_len = 0;
            f.params.sfd_len_symbols = 0;
            for (int k = 0; k < 8; ++k) f.symbols.push_back(static_cast<std::uint32_t>(g.size(0, a.chips() - 1)));
            const auto sig = modulate_frame(f);
            const std::size_t off = g.size(0, sig.size() - b.samples_per_symbol());
            const auto r = db.demod(std::span(sig.samples).subspan(off, b.samples_per_symbol()), ChirpDirection::up);
            CHECK(r.peak_magnitude <= bound);
        }
    }
}
