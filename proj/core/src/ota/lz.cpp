#include "iotphy/ota/lz.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace iotphy::ota {
namespace {

constexpr std::size_t kMinMatch = 4;
constexpr std::size_t kHashBits = 12;

std::uint32_t read32(const std::uint8_t* p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

std::size_t hash4(std::uint32_t v) { return (v * 2654435761U) >> (32 - kHashBits); }

void put_length(std::vector<std::uint8_t>& out, std::size_t extra) {
    while (extra >= 255) {
        out.push_back(255);
        extra -= 255;
    }
    out.push_back(static_cast<std::uint8_t>(extra));
}

void emit(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> literals, std::size_t offset,
          std::size_t match_len) {
    const std::size_t lit = literals.size();
    const std::size_t m = match_len == 0 ? 0 : match_len - kMinMatch;
    out.push_back(static_cast<std::uint8_t>((std::min<std::size_t>(lit, 15) << 4) | std::min<std::size_t>(m, 15)));
    if (lit >= 15) put_length(out, lit - 15);
    out.insert(out.end(), literals.begin(), literals.end());
    if (match_len == 0) return;
    out.push_back(static_cast<std::uint8_t>(offset));
    out.push_back(static_cast<std::uint8_t>(offset >> 8));
    if (m >= 15) put_length(out, m - 15);
}

}  // namespace

DecodeError::DecodeError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at compressed offset " + std::to_string(offset)), offset_(offset) {}

std::size_t max_compressed_size(std::size_t n) noexcept { return 2 + 1 + n + n / 255 + 1; }

std::vector<std::uint8_t> compress_block(std::span<const std::uint8_t> block) {
    if (block.size() > kMaxBlockSize) {
        throw std::invalid_argument("block of " + std::to_string(block.size()) + " bytes exceeds " +
                                    std::to_string(kMaxBlockSize));
    }
    std::vector<std::uint8_t> out;
    out.reserve(max_compressed_size(block.size()));
    out.push_back(static_cast<std::uint8_t>(block.size()));
    out.push_back(static_cast<std::uint8_t>(block.size() >> 8));

    const std::uint8_t* src = block.data();
    const std::size_t n = block.size();
    std::array<std::int32_t, std::size_t{1} << kHashBits> table;
    table.fill(-1);

    std::size_t anchor = 0;
    std::size_t pos = 0;
    while (n >= kMinMatch && pos + kMinMatch <= n) {
        const std::uint32_t v = read32(src + pos);
        const std::size_t h = hash4(v);
        const std::int32_t cand = table[h];
        table[h] = static_cast<std::int32_t>(pos);
        if (cand < 0 || read32(src + cand) != v) {
            ++pos;
            continue;
        }
        std::size_t len = kMinMatch;
        while (pos + len < n && src[cand + static_cast<std::ptrdiff_t>(len)] == src[pos + len]) ++len;
        emit(out, block.subspan(anchor, pos - anchor), pos - static_cast<std::size_t>(cand), len);
        // Seed the table inside long matches sparsely so later data can refer back.
        for (std::size_t k = pos + 1; k + kMinMatch <= n && k < pos + len; k += 7) {
            table[hash4(read32(src + k))] = static_cast<std::int32_t>(k);
        }
        pos += len;
        anchor = pos;
    }
    if (anchor < n || n == 0) emit(out, block.subspan(anchor), 0, 0);
    return out;
}

std::pmr::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> in,
                                                std::pmr::memory_resource* memory) {
    if (in.size() < 2) throw DecodeError("missing block header", 0);
    const std::size_t raw = in[0] | (std::size_t{in[1]} << 8);
    if (raw > kMaxBlockSize) throw DecodeError("declared block size " + std::to_string(raw) + " too large", 0);

    std::pmr::vector<std::uint8_t> out(memory);
    out.reserve(raw);
    std::size_t ip = 2;
    auto need = [&](std::size_t count, const char* what) {
        if (in.size() - ip < count) throw DecodeError(std::string("truncated ") + what, ip);
    };
    auto read_length = [&](std::size_t base) {
        std::size_t len = base;
        if (base != 15) return len;
        for (;;) {
            need(1, "length extension");
            const std::uint8_t b = in[ip++];
            len += b;
            if (len > kMaxBlockSize + 15) throw DecodeError("length overflows the block", ip - 1);
            if (b != 255) return len;
        }
    };

    while (out.size() < raw || (raw == 0 && ip < in.size() && out.empty())) {
        need(1, "token");
        const std::size_t token_at = ip;
        const std::uint8_t token = in[ip++];
        const std::size_t lit = read_length(token >> 4);
        if (lit > raw - out.size()) throw DecodeError("literal run past end of block", token_at);
        need(lit, "literals");
        out.insert(out.end(), in.begin() + static_cast<std::ptrdiff_t>(ip),
                   in.begin() + static_cast<std::ptrdiff_t>(ip + lit));
        ip += lit;
        if (out.size() == raw) break;

        need(2, "match offset");
        const std::size_t offset = in[ip] | (std::size_t{in[ip + 1]} << 8);
        if (offset == 0 || offset > out.size()) throw DecodeError("match offset out of range", ip);
        ip += 2;
        const std::size_t len = read_length(token & 0x0F) + kMinMatch;
        if (len > raw - out.size()) throw DecodeError("match past end of block", token_at);
        const std::size_t from = out.size() - offset;
        for (std::size_t k = 0; k < len; ++k) out.push_back(out[from + k]);
    }
    if (ip != in.size()) throw DecodeError("trailing bytes after block", ip);
    return out;
}

std::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> compressed) {
    const auto out = decompress_block(compressed, std::pmr::get_default_resource());
    return {out.begin(), out.end()};
}

void* PeakCountingResource::do_allocate(std::size_t bytes, std::size_t align) {
    void* p = upstream_->allocate(bytes, align);
    in_use_ += bytes;
    peak_ = std::max(peak_, in_use_);
    return p;
}

void PeakCountingResource::do_deallocate(void* p, std::size_t bytes, std::size_t align) {
    upstream_->deallocate(p, bytes, align);
    in_use_ -= bytes;
}

}  // namespace iotphy::ota
