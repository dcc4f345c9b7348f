#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "iotphy/lora/params.hpp"

namespace iotphy::lora {

// One transmitter in a symbol-error-rate experiment. snr_db is the stream's
// power relative to unit-power noise measured over the full sampled band.
struct StreamSpec {
    LoraParams params;
    double snr_db = 0.0;
};

struct SerPoint {
    double snr_db = 0.0;
    std::size_t symbol_errors = 0;
    std::size_t trials = 0;

    double ser() const noexcept {
        return trials == 0 ? 0.0 : static_cast<double>(symbol_errors) / static_cast<double>(trials);
    }
};

// Monte-Carlo chirp symbol error rate with known symbol timing. Every stream
// sends uniformly random symbols back to back on its own symbol grid, offset by
// a random number of samples per block, and all streams plus noise are summed.
// Each stream is then filtered (osr >= 2) and demodulated on its own grid.
// Exactly `trials` symbols are scored for stream 0; the other streams report
// however many of their symbols fell fully inside the same blocks. All streams
// must share one sample rate. Deterministic for a given seed.
std::vector<SerPoint> measure_ser(std::span<const StreamSpec> streams, std::size_t trials,
                                  std::uint64_t seed);

SerPoint measure_ser(const LoraParams& params, double snr_db, std::size_t trials, std::uint64_t seed);

// Seed used for a sweep point; a pure function of (seed, snr_db) so repeated
// evaluations and different scenarios at the same SNR share random numbers.
std::uint64_t point_seed(std::uint64_t seed, double snr_db) noexcept;

// Points snr_start, snr_start + step, ... <= snr_stop, evaluated on up to
// `threads` workers and returned in SNR order regardless of completion order.
std::vector<SerPoint> ser_sweep(const LoraParams& params, double snr_start_db, double snr_stop_db,
                                double snr_step_db, std::size_t trials, std::uint64_t seed,
                                std::size_t threads = 1);

// Rough 1%-SER operating point of noncoherent 2^sf-ary detection, used as a
// search starting point: 10 log10(2 ln(50 (N-1)) / N) - 10 log10(osr).
double approximate_threshold_db(const LoraParams& params) noexcept;

// Maps the desired stream's SNR to the full list of streams in the scenario.
using Scenario = std::function<std::vector<StreamSpec>(double desired_snr_db)>;

struct ThresholdSearch {
    double target_ser = 0.01;
    double step_db = 0.5;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    double start_db = 0.0;
    std::size_t max_points = 60;
};

struct ThresholdResult {
    bool found = false;
    double snr_db = 0.0;
    std::vector<SerPoint> points;  // every evaluated point, in SNR order
};

// Steps the desired SNR by step_db until the target SER is bracketed, then
// interpolates log10(SER) linearly between the bracketing points.
ThresholdResult find_ser_threshold(const Scenario& scenario, std::size_t stream_index,
                                   const ThresholdSearch& search);

}  // namespace iotphy::lora
