#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <limits>

#include "iotphy/iq/quantize.hpp"
#include "iotphy/iq/sample.hpp"
#include "oracles/gen.hpp"

using namespace iotphy::iq;

TEST_CASE("sample buffer rejects a zero rate") {
    CHECK_THROWS_AS(SampleBuffer({}, 0), std::invalid_argument);
    const SampleBuffer b({{1, 0}, {0, 1}}, 1000);
    CHECK(b.duration_s() == doctest::Approx(0.002));
}

TEST_CASE("require_finite names the bad index") {
    std::vector<ComplexSample> s{{0, 0}, {std::numeric_limits<double>::quiet_NaN(), 0}};
    try {
        require_finite(s);
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find('1') != std::string::npos);
    }
}

TEST_CASE("quantize examples") {
    const SampleBuffer b({{0, 0}, {1.0, -1.0}, {0.5, 0.25}}, 1);
    const auto q = quantize(b);
    CHECK(q[0] == QuantizedSample{0, 0});
    CHECK(q[1] == QuantizedSample{4095, -4095});
    CHECK(q[2] == QuantizedSample{2048, 1024});  // 2047.5 rounds away from zero
    const SampleBuffer big({{3.0, -3.0}}, 1);
    CHECK(quantize(big)[0] == QuantizedSample{4095, -4096});
}

TEST_CASE("dequantize examples") {
    const std::vector<QuantizedSample> q{{0, 0}, {4095, -4095}, {2048, 1024}};
    const auto b = dequantize(q, 1.0, 10);
    CHECK(b.samples[0] == ComplexSample{0, 0});
    CHECK(b.samples[1] == ComplexSample{1.0, -1.0});
    CHECK(b.samples[2].real() == doctest::Approx(2048.0 / 4095.0));
    CHECK(b.samples[2].imag() == doctest::Approx(1024.0 / 4095.0));
    const std::vector<QuantizedSample> bad{{5000, 0}};
    CHECK_THROWS(dequantize(bad, 1.0, 10));
}

TEST_CASE("quantization error stays within full_scale / 2048") {
    oracle::Gen g(5);
    for (const double fs : {1.0, 0.25, 3.0}) {
        std::vector<ComplexSample> s(2000);
        for (auto& x : s) x = {g.real(-fs, fs), g.real(-fs, fs)};
        const SampleBuffer b(s, 1);
        const auto back = dequantize(quantize(b, fs), fs, 1);
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(std::abs(back.samples[i].real() - s[i].real()) <= fs / 2048);
            CHECK(std::abs(back.samples[i].imag() - s[i].imag()) <= fs / 2048);
        }
    }
}
