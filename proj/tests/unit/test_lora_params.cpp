#include <stdexcept>
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "iotphy/lora/params.hpp"

using namespace iotphy::lora;

TEST_CASE("parameter validation") {
    LoraParams p;
    CHECK_NOTHROW(p.validate());
    for (int sf : {5, 13}) {
        p = {};
        p.sf = sf;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    p = {};
    p.bw_hz = 100000.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.bw_hz = 7812.5;
    p.osr = 2;
    CHECK_NOTHROW(p.validate());
    p.osr = 3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);  // 23437.5 Hz is not an integer rate
    p = {};
    p.osr = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.coding_rate_denominator = 9;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.sync_symbols = {0, 256};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.bw_hz = 1000000.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("derived quantities") {
    LoraParams p;
    p.sf = 9;
    p.bw_hz = 500000.0;
    p.osr = 2;
    CHECK(p.chips() == 512);
    CHECK(p.samples_per_symbol() == 1024);
    CHECK(p.sample_rate_hz() == 1000000);
    CHECK(p.symbol_duration_s() == doctest::Approx(1.024e-3).epsilon(1e-12));
}

TEST_CASE("json roundtrip with exact field names") {
    LoraParams p;
    p.sf = 10;
    p.bw_hz = 250000.0;
    p.sync_symbols = {3, 4};
    const nlohmann::json j = p;
    CHECK(j.size() == 7);
    for (const char* k : {"sf", "bw_hz", "osr", "coding_rate_denominator", "preamble_len", "sync_symbols",
                          "sfd_len_symbols"}) {
        CHECK(j.contains(k));
    }
    CHECK(j.get<LoraParams>() == p);

    CHECK(nlohmann::json::parse(R"({"sf": 7})").get<LoraParams>().bw_hz == 125000.0);
    CHECK_THROWS(nlohmann::json::parse(R"({"sf": 7, "spreading": 1})").get<LoraParams>());
    CHECK_THROWS(nlohmann::json::parse(R"({"sf": 14})").get<LoraParams>());
    CHECK_THROWS(nlohmann::json::parse("[1]").get<LoraParams>());
}

TEST_CASE("chirp slopes") {
    LoraParams a;
    LoraParams b;
    b.bw_hz = 250000.0;
    CHECK(chirp_slope(a).hz_per_s == doctest::Approx(125000.0 * 125000.0 / 256));
    CHECK(chirp_slope(a) < chirp_slope(b));
    // SF8/BW125 and SF10/BW250 share a slope.
    LoraParams c;
    c.sf = 10;
    c.bw_hz = 250000.0;
    CHECK(chirp_slope(a) == chirp_slope(c));
}

TEST_CASE("frame validation") {
    LoraFrame f;
    f.params.sf = 7;
    f.symbols = {0, 127};
    CHECK_NOTHROW(f.validate());
    f.symbols.push_back(128);
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}
