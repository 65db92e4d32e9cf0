#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minsteg/errors.hpp"

namespace minsteg {

// An ordered sequence of bits. Byte conversion is big-endian within each
// byte (most significant bit first) and lossless.
struct BitPayload {
    std::vector<std::uint8_t> bits;  // one entry per bit, each 0 or 1

    std::size_t size() const { return bits.size(); }
    bool empty() const { return bits.empty(); }

    void push_bit(bool bit) { bits.push_back(bit ? 1 : 0); }

    // Appends the low `nbits` bits of `value`, most significant first.
    void append_value(std::uint32_t value, int nbits) {
        for (int k = nbits - 1; k >= 0; --k) {
            bits.push_back(static_cast<std::uint8_t>((value >> k) & 1u));
        }
    }

    // Reads `nbits` bits starting at `pos`, most significant first.
    std::uint32_t read_value(std::size_t pos, int nbits) const {
        if (pos + static_cast<std::size_t>(nbits) > bits.size()) {
            throw ArgumentError("bit read past end of payload");
        }
        std::uint32_t v = 0;
        for (int k = 0; k < nbits; ++k) {
            v = (v << 1) | bits[pos + static_cast<std::size_t>(k)];
        }
        return v;
    }

    static BitPayload from_bytes(std::span<const std::uint8_t> bytes) {
        BitPayload p;
        p.bits.reserve(bytes.size() * 8);
        for (std::uint8_t byte : bytes) p.append_value(byte, 8);
        return p;
    }

    std::vector<std::uint8_t> to_bytes() const {
        if (bits.size() % 8 != 0) {
            throw ArgumentError("bit count is not a whole number of bytes");
        }
        std::vector<std::uint8_t> out(bits.size() / 8);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<std::uint8_t>(read_value(i * 8, 8));
        }
        return out;
    }

    friend bool operator==(const BitPayload&, const BitPayload&) = default;
};

}  // namespace minsteg
