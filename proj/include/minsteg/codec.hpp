#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "minsteg/minutiae.hpp"
#include "minsteg/payload.hpp"

namespace minsteg {

enum class Strategy { plain, optimized };

struct EmbedConfig {
    int bits = 2;  // b, payload bits per element, 1..8
    Strategy strategy = Strategy::optimized;
    bool order_preserving = true;
    std::uint64_t padding_key = 0;  // seed for the deterministic padding bits
};

// Summary of one embedding pass. Distortion is measured between the final
// output value of each element (after any order adjustment) and its
// original value.
struct EmbedReport {
    std::size_t elements_used = 0;
    std::uint64_t total_distortion = 0;
    std::uint64_t max_distortion = 0;
    std::size_t order_adjustments = 0;
};

// Replaces the `bits` least significant bits of the cover element with the
// secret value:
//
//   2^bits * floor(cover / 2^bits) + secret
//
// Always lands inside the cover's block, so the change is at most
// 2^bits - 1.
std::uint32_t embed_element_plain(std::uint32_t cover, std::uint32_t secret, int bits);

// Picks whichever of the two values carrying the secret residue is closer
// to the cover element: the in-block value above or the value one block
// below it. The in-block value wins ties. The result can be negative;
// embed_template applies the field range policy.
std::int64_t embed_element_optimized(std::uint32_t cover, std::uint32_t secret, int bits);

// Restores ascending order after embedding: if value >= prev_value returns
// value unchanged, otherwise the smallest value + l*2^bits (integer l >= 1)
// reaching prev_value. The residue modulo 2^bits is preserved.
std::int64_t order_adjust(std::int64_t value, std::int64_t prev_value, int bits);

// Embeddable bits: 3 fields * b bits * N points.
std::uint64_t capacity(const MinutiaeTemplate& t, int b);

// Payload bytes that fit after the 16-bit length prefix, capped by the
// prefix's 2^13-byte addressing limit.
std::uint64_t usable_payload_bytes(std::uint64_t capacity_bits);

// Wraps data for the fixed-size channel: a 16-bit big-endian prefix holding
// the data bit count, the data bits, then pseudorandom padding from an
// Lcg64 seeded with padding_key until capacity_bits bits total.
BitPayload frame_payload(std::span<const std::uint8_t> data, std::uint64_t capacity_bits,
                         std::uint64_t padding_key);

// Inverse of frame_payload; the padding key is not needed. Throws
// CapacityError when the length prefix exceeds the available bits or is
// not a whole number of bytes (the usual sign of extracting with the
// wrong b or from an unprotected template).
std::vector<std::uint8_t> unframe_payload(const BitPayload& framed);

// Embeds payload (exactly capacity(t, cfg.bits) bits) into t, b bits per
// element, field-major: all x in stored order, then all y, then all theta.
// Out-of-range candidates are swapped for the other same-residue candidate
// when that one is in range ([0, 65535] for x and y, [0, 359] for theta);
// if neither is, an EmbedError identifies the element and field. With
// cfg.order_preserving, order_adjust runs over the x field sequentially
// against the previous final x value.
std::pair<MinutiaeTemplate, EmbedReport> embed_template(const MinutiaeTemplate& t,
                                                        const BitPayload& payload,
                                                        const EmbedConfig& cfg);

// Concatenates each element's value mod 2^b as b bits, in embedding order.
BitPayload extract_template(const MinutiaeTemplate& t, int b);

}  // namespace minsteg
