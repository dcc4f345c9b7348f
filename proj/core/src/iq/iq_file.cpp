#include "iotphy/iq/iq_file.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace iotphy::iq {

namespace {

void put_f32_le(std::vector<char>& out, float v) {
    const auto u = std::bit_cast<std::uint32_t>(v);
    out.push_back(static_cast<char>(u & 0xFF));
    out.push_back(static_cast<char>((u >> 8) & 0xFF));
    out.push_back(static_cast<char>((u >> 16) & 0xFF));
    out.push_back(static_cast<char>((u >> 24) & 0xFF));
}

float get_f32_le(const unsigned char* b) {
    const std::uint32_t u = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                            (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
    return std::bit_cast<float>(u);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& data_path) {
    auto p = data_path;
    p += ".meta.json";
    return p;
}

void write_iq_file(const std::filesystem::path& path, const SampleBuffer& buf,
                   std::string_view description) {
    require_finite(buf.samples);
    std::vector<char> raw;
    raw.reserve(buf.size() * 8);
    for (const auto& s : buf.samples) {
        put_f32_le(raw, static_cast<float>(s.real()));
        put_f32_le(raw, static_cast<float>(s.imag()));
    }
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open I/Q file for writing: " + path.string());
        }
        out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
        if (!out) {
            throw std::runtime_error("failed writing I/Q file: " + path.string());
        }
    }
    nlohmann::ordered_json meta;
    meta["sample_rate_hz"] = buf.sample_rate_hz;
    meta["description"] = std::string(description);
    std::ofstream side(sidecar_path(path), std::ios::trunc);
    if (!side) {
        throw std::runtime_error("cannot write sidecar: " + sidecar_path(path).string());
    }
    side << meta.dump(2) << '\n';
}

IqFile read_iq_file_with_meta(const std::filesystem::path& path) {
    const auto meta_path = sidecar_path(path);
    std::ifstream side(meta_path);
    if (!side) {
        throw std::runtime_error("missing metadata sidecar: " + meta_path.string());
    }
    nlohmann::json meta;
    try {
        side >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed sidecar " + meta_path.string() + ": " + e.what());
    }
    if (!meta.contains("sample_rate_hz") || !meta["sample_rate_hz"].is_number_unsigned() ||
        meta["sample_rate_hz"].get<std::uint64_t>() == 0) {
        throw std::runtime_error("sidecar lacks a positive integer sample_rate_hz: " +
                                 meta_path.string());
    }
    IqFile file;
    file.description = meta.value("description", std::string{});

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open I/Q file: " + path.string());
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() % 8 != 0) {
        throw std::runtime_error("truncated I/Q file (" + std::to_string(raw.size()) +
                                 " bytes is not a whole number of complex samples): " +
                                 path.string());
    }
    std::vector<ComplexSample> samples(raw.size() / 8);
    const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        samples[k] = {get_f32_le(bytes + 8 * k), get_f32_le(bytes + 8 * k + 4)};
    }
    file.buffer = SampleBuffer(std::move(samples), meta["sample_rate_hz"].get<std::uint64_t>());
    return file;
}

SampleBuffer read_iq_file(const std::filesystem::path& path) {
    return read_iq_file_with_meta(path).buffer;
}

}  // namespace iotphy::iq
