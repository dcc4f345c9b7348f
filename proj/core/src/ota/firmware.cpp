#include "iotphy/ota/firmware.hpp"

#include <algorithm>
#include <stdexcept>

namespace iotphy::ota {

std::string to_string(ImageKind kind) {
    return kind == ImageKind::fpga_bitstream ? "fpga_bitstream" : "mcu_program";
}

namespace {

void put(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint32_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
    return v;
}

}  // namespace

std::vector<std::uint8_t> Manifest::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(serialized_size());
    out.push_back(static_cast<std::uint8_t>(kind));
    put(out, raw_size, 4);
    put(out, static_cast<std::uint32_t>(blocks.size()), 2);
    for (const auto& b : blocks) {
        put(out, b.raw_size, 2);
        put(out, b.compressed_size, 2);
        put(out, b.raw_crc, 2);
    }
    put(out, crc16_ccitt(out), 2);
    return out;
}

Manifest Manifest::parse(std::span<const std::uint8_t> in) {
    if (in.size() < 9) throw std::invalid_argument("manifest truncated");
    Manifest m;
    if (in[0] > 1) throw std::invalid_argument("unknown image kind");
    m.kind = static_cast<ImageKind>(in[0]);
    m.raw_size = get(in, 1, 4);
    const std::size_t n = get(in, 5, 2);
    if (in.size() < 7 + 6 * n + 2) throw std::invalid_argument("manifest truncated");
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = 7 + 6 * i;
        BlockInfo b{static_cast<std::uint16_t>(get(in, at, 2)), static_cast<std::uint16_t>(get(in, at + 2, 2)),
                    static_cast<std::uint16_t>(get(in, at + 4, 2))};
        total += b.raw_size;
        m.blocks.push_back(b);
    }
    const std::size_t body = 7 + 6 * n;
    if (crc16_ccitt(in.first(body)) != get(in, body, 2)) throw std::invalid_argument("manifest CRC mismatch");
    if (total != m.raw_size) throw std::invalid_argument("manifest block sizes do not add up");
    return m;
}

std::size_t TransferPlan::packet_count() const noexcept {
    return (stream.size() + payload_size - 1) / payload_size;
}

std::span<const std::uint8_t> TransferPlan::payload(std::size_t seq) const {
    if (seq >= packet_count()) throw std::out_of_range("no payload for seq " + std::to_string(seq));
    const std::size_t start = seq * payload_size;
    return std::span(stream).subspan(start, std::min(payload_size, stream.size() - start));
}

namespace {

void check_plan(const TransferPlan& plan) {
    if (plan.payload_size == 0 || plan.payload_size > kMaxDataPayload) {
        throw std::invalid_argument("payload size must be 1..60 bytes");
    }
    if (plan.packet_count() > 0xFFFF) throw std::invalid_argument("stream needs more than 65535 packets");
    if (FlashModel::kStaging + plan.stream.size() > FlashModel::kDefaultCapacity) {
        throw std::invalid_argument("stream does not fit the staging area");
    }
}

}  // namespace

TransferPlan TransferPlan::raw(std::vector<std::uint8_t> bytes, std::size_t payload_size) {
    TransferPlan plan;
    plan.stream = std::move(bytes);
    plan.payload_size = payload_size;
    check_plan(plan);
    return plan;
}

std::size_t block_count(std::size_t n) noexcept { return (n + kMaxBlockSize - 1) / kMaxBlockSize; }

TransferPlan chunk_firmware(const FirmwareImage& image, std::size_t payload_size) {
    if (image.data.empty()) throw std::invalid_argument("firmware image is empty");
    if (image.data.size() > FlashModel::kStaging - FlashModel::kSlotB) {
        throw std::invalid_argument("firmware image does not fit an image slot");
    }
    Manifest m;
    m.kind = image.kind;
    m.raw_size = static_cast<std::uint32_t>(image.data.size());
    std::vector<std::uint8_t> blocks;
    const std::span<const std::uint8_t> data(image.data);
    for (std::size_t at = 0; at < data.size(); at += kMaxBlockSize) {
        const auto raw = data.subspan(at, std::min(kMaxBlockSize, data.size() - at));
        const auto c = compress_block(raw);
        m.blocks.push_back({static_cast<std::uint16_t>(raw.size()), static_cast<std::uint16_t>(c.size()),
                            crc16_ccitt(raw)});
        blocks.insert(blocks.end(), c.begin(), c.end());
    }

    TransferPlan plan;
    plan.format = StreamFormat::compressed;
    plan.payload_size = payload_size;
    plan.stream = m.serialize();
    plan.stream.insert(plan.stream.end(), blocks.begin(), blocks.end());
    plan.manifest = std::move(m);
    check_plan(plan);
    return plan;
}

FlashModel::FlashModel(std::size_t capacity) : contents_(capacity, 0xFF) {}

void FlashModel::write(std::size_t address, std::span<const std::uint8_t> bytes) {
    if (address > contents_.size() || bytes.size() > contents_.size() - address) {
        throw std::out_of_range("flash write outside capacity");
    }
    std::copy(bytes.begin(), bytes.end(), contents_.begin() + static_cast<std::ptrdiff_t>(address));
    log_.push_back({address, bytes.size()});
}

std::span<const std::uint8_t> FlashModel::read(std::size_t address, std::size_t length) const {
    if (address > contents_.size() || length > contents_.size() - address) {
        throw std::out_of_range("flash read outside capacity");
    }
    return std::span(contents_).subspan(address, length);
}

void FlashModel::set_boot(std::size_t slot, std::size_t size) {
    if (slot != kSlotA && slot != kSlotB) throw std::invalid_argument("not an image slot");
    if (size > kStaging - kSlotB) throw std::invalid_argument("image larger than a slot");
    boot_slot_ = slot;
    boot_size_ = size;
}

ProgramResult reassemble_and_program(FlashModel& flash, StreamFormat format, std::size_t stream_size) {
    ProgramResult r;
    const auto stream = flash.read(FlashModel::kStaging, stream_size);
    std::vector<std::uint8_t> image;
    if (format == StreamFormat::raw) {
        image.assign(stream.begin(), stream.end());
    } else {
        Manifest m;
        try {
            m = Manifest::parse(stream);
        } catch (const std::invalid_argument& e) {
            r.error = std::string("manifest: ") + e.what();
            return r;
        }
        r.image.kind = m.kind;
        std::size_t at = m.serialized_size();
        image.reserve(m.raw_size);
        for (std::size_t i = 0; i < m.blocks.size(); ++i) {
            const auto& b = m.blocks[i];
            if (at + b.compressed_size > stream.size()) {
                r.failed_block = i;
                r.error = "block " + std::to_string(i) + " missing from the stream";
                return r;
            }
            PeakCountingResource counter;
            try {
                const auto raw = decompress_block(stream.subspan(at, b.compressed_size), &counter);
                if (raw.size() != b.raw_size) throw DecodeError("block length differs from manifest", 0);
                if (crc16_ccitt(raw) != b.raw_crc) throw DecodeError("block CRC mismatch", 0);
                image.insert(image.end(), raw.begin(), raw.end());
            } catch (const DecodeError& e) {
                r.failed_block = i;
                r.error = "block " + std::to_string(i) + ": " + e.what();
                return r;
            }
            r.peak_decompress_bytes = std::max(r.peak_decompress_bytes, counter.peak());
            at += b.compressed_size;
        }
        if (image.size() != m.raw_size) {
            r.error = "image length differs from manifest";
            return r;
        }
    }
    if (image.size() > FlashModel::kStaging - FlashModel::kSlotB) {
        r.error = "image larger than a slot";
        return r;
    }
    const std::size_t slot = flash.spare_slot();
    flash.write(slot, image);
    flash.set_boot(slot, image.size());
    r.ok = true;
    r.image.data = std::move(image);
    return r;
}

}  // namespace iotphy::ota
