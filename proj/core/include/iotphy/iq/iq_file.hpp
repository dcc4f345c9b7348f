#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "iotphy/iq/sample.hpp"

namespace iotphy::iq {

// Raw I/Q files are header-less interleaved float32 little-endian pairs
// (I then Q). Metadata lives in a JSON sidecar at `<path>.meta.json`:
//   {"sample_rate_hz": <integer>, "description": <string>}

std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

void write_iq_file(const std::filesystem::path& path, const SampleBuffer& buf,
                   std::string_view description = {});

struct IqFile {
    SampleBuffer buffer;
    std::string description;
};

// Throws std::runtime_error on a missing sidecar, a truncated data file (size
// not a multiple of 8 bytes), or malformed metadata.
IqFile read_iq_file_with_meta(const std::filesystem::path& path);
SampleBuffer read_iq_file(const std::filesystem::path& path);

}  // namespace iotphy::iq
