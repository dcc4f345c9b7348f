#include <stdexcept>
#include <doctest.h>

#include <cmath>

#include "iotphy/lora/ser.hpp"

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

TEST_CASE("SER is deterministic per seed and falls with SNR") {
    const auto p = make(7, 125000.0, 1);
    const auto a = measure_ser(p, -8.0, 2000, 5);
    const auto b = measure_ser(p, -8.0, 2000, 5);
    CHECK(a.symbol_errors == b.symbol_errors);
    CHECK(a.trials == 2000);
    CHECK(measure_ser(p, 10.0, 2000, 5).symbol_errors == 0);
    CHECK(measure_ser(p, -20.0, 2000, 5).ser() > 0.9);
    CHECK(measure_ser(p, -12.0, 2000, 5).ser() > a.ser());
}

TEST_CASE("sweep order and thread independence") {
    const auto p = make(6, 125000.0, 2);
    const auto one = ser_sweep(p, -12.0, -6.0, 1.0, 500, 9, 1);
    const auto four = ser_sweep(p, -12.0, -6.0, 1.0, 500, 9, 4);
    REQUIRE(one.size() == 7);
    REQUIRE(four.size() == 7);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].snr_db == doctest::Approx(-12.0 + static_cast<double>(i)));
        CHECK(one[i].symbol_errors == four[i].symbol_errors);
    }
}

TEST_CASE("point seed depends on seed and SNR") {
    CHECK(point_seed(1, 0.5) == point_seed(1, 0.5));
    CHECK(point_seed(1, 0.5) != point_seed(2, 0.5));
    CHECK(point_seed(1, 0.5) != point_seed(1, 1.0));
}

TEST_CASE("threshold search brackets and interpolates") {
    const auto p = make(7, 125000.0, 1);
    ThresholdSearch s;
    s.trials = 3000;
    s.start_db = approximate_threshold_db(p);
    const auto r = find_ser_threshold([&](double snr) { return std::vector<StreamSpec>{{p, snr}}; }, 0, s);
    REQUIRE(r.found);
    CHECK(r.snr_db > -11.0);
    CHECK(r.snr_db < -7.0);
    // Points straddle the target.
    bool below = false;
    bool above = false;
    for (const auto& pt : r.points) {
        below |= pt.ser() < 0.01;
        above |= pt.ser() >= 0.01;
    }
    CHECK(below);
    CHECK(above);
}

TEST_CASE("mixed sample rates are rejected") {
    const std::vector<StreamSpec> s{{make(7, 125000.0, 1), 0.0}, {make(7, 250000.0, 1), 0.0}};
    CHECK_THROWS_AS(measure_ser(s, 100, 1), std::invalid_argument);
}

TEST_CASE("approximate threshold tracks processing gain") {
    const double a = approximate_threshold_db(make(7, 125000.0, 1));
    const double b = approximate_threshold_db(make(8, 125000.0, 1));
    CHECK(a - b > 2.0);
    CHECK(a - b < 3.5);
    CHECK(approximate_threshold_db(make(7, 125000.0, 2)) == doctest::Approx(a - 10.0 * std::log10(2.0)));
}
