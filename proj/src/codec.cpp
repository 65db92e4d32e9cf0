#include "minsteg/codec.hpp"

#include <cstdlib>
#include <string>

#include "minsteg/errors.hpp"
#include "minsteg/rng.hpp"

namespace minsteg {

namespace {

constexpr std::size_t kMaxFramedBytes = 1u << 13;  // length prefix addressing limit

void check_bits(int b) {
    if (b < 1 || b > 8) {
        throw ArgumentError("bits per element must be in [1, 8], got " + std::to_string(b));
    }
}

void check_secret(std::uint32_t d, int b) {
    if (d >> b) {
        throw ArgumentError("secret value " + std::to_string(d) + " does not fit in " +
                            std::to_string(b) + " bits");
    }
}

}  // namespace

std::uint32_t embed_element_plain(std::uint32_t cover, std::uint32_t secret, int bits) {
    check_bits(bits);
    check_secret(secret, bits);
    const std::uint32_t block = 1u << bits;
    return (cover / block) * block + secret;
}

std::int64_t embed_element_optimized(std::uint32_t cover, std::uint32_t secret, int bits) {
    check_bits(bits);
    check_secret(secret, bits);
    const std::int64_t block = std::int64_t{1} << bits;
    const std::int64_t base =
        static_cast<std::int64_t>(cover / static_cast<std::uint32_t>(block)) * block;
    const std::int64_t within = base + secret;   // in-block candidate
    const std::int64_t below = within - block;   // previous-block candidate
    const std::int64_t dist_below = std::llabs(static_cast<std::int64_t>(cover) - below);
    const std::int64_t dist_within = std::llabs(static_cast<std::int64_t>(cover) - within);
    return dist_below >= dist_within ? within : below;
}

std::int64_t order_adjust(std::int64_t value, std::int64_t prev_value, int bits) {
    check_bits(bits);
    if (value >= prev_value) return value;
    const std::int64_t block = std::int64_t{1} << bits;
    const std::int64_t steps = (prev_value - value + block - 1) / block;  // minimal, >= 1
    return value + steps * block;
}

std::uint64_t capacity(const MinutiaeTemplate& t, int b) {
    check_bits(b);
    return 3ull * static_cast<std::uint64_t>(b) * t.points.size();
}

std::uint64_t usable_payload_bytes(std::uint64_t capacity_bits) {
    if (capacity_bits < 16) return 0;
    const std::uint64_t bytes = (capacity_bits - 16) / 8;
    return bytes < kMaxFramedBytes ? bytes : kMaxFramedBytes - 1;
}

BitPayload frame_payload(std::span<const std::uint8_t> data, std::uint64_t capacity_bits,
                         std::uint64_t padding_key) {
    if (data.size() >= kMaxFramedBytes) {
        throw CapacityError("payload of " + std::to_string(data.size()) +
                            " bytes exceeds the length frame limit of " +
                            std::to_string(kMaxFramedBytes - 1) + " bytes");
    }
    const std::uint64_t needed = 16 + 8ull * data.size();
    if (needed > capacity_bits) {
        throw CapacityError("payload needs " + std::to_string(needed) +
                            " bits but capacity is only " + std::to_string(capacity_bits));
    }
    BitPayload framed;
    framed.bits.reserve(capacity_bits);
    framed.append_value(static_cast<std::uint32_t>(8 * data.size()), 16);
    for (std::uint8_t byte : data) framed.append_value(byte, 8);
    Lcg64 pad(padding_key);
    while (framed.size() < capacity_bits) framed.push_bit(pad.next_bit());
    return framed;
}

std::vector<std::uint8_t> unframe_payload(const BitPayload& framed) {
    if (framed.size() < 16) {
        throw CapacityError("framed payload of " + std::to_string(framed.size()) +
                            " bits is shorter than the 16-bit length prefix");
    }
    const std::uint32_t data_bits = framed.read_value(0, 16);
    if (data_bits > framed.size() - 16) {
        throw CapacityError("length prefix " + std::to_string(data_bits) +
                            " exceeds the " + std::to_string(framed.size() - 16) +
                            " available bits");
    }
    if (data_bits % 8 != 0) {
        throw CapacityError("length prefix " + std::to_string(data_bits) +
                            " is not a whole number of bytes");
    }
    std::vector<std::uint8_t> out(data_bits / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(framed.read_value(16 + i * 8, 8));
    }
    return out;
}

namespace {

struct FieldDesc {
    const char* name;
    std::int64_t max_value;
    bool ordered;  // the x field keeps ascending order
};

std::uint16_t MinutiaPoint::* field_member(int field) {
    switch (field) {
        case 0: return &MinutiaPoint::x;
        case 1: return &MinutiaPoint::y;
        default: return &MinutiaPoint::theta;
    }
}

}  // namespace

std::pair<MinutiaeTemplate, EmbedReport> embed_template(const MinutiaeTemplate& t,
                                                        const BitPayload& payload,
                                                        const EmbedConfig& cfg) {
    check_bits(cfg.bits);
    const std::uint64_t need = capacity(t, cfg.bits);
    if (payload.size() != need) {
        throw ArgumentError("payload length mismatch: template holds " + std::to_string(need) +
                            " bits, payload has " + std::to_string(payload.size()));
    }

    static constexpr FieldDesc kFields[3] = {
        {"x", 0xFFFF, true},
        {"y", 0xFFFF, false},
        {"theta", 359, false},
    };

    const int b = cfg.bits;
    const std::int64_t block = std::int64_t{1} << b;
    MinutiaeTemplate out = t;
    EmbedReport report;
    std::size_t cursor = 0;

    for (int field = 0; field < 3; ++field) {
        const FieldDesc& desc = kFields[field];
        auto member = field_member(field);
        std::int64_t prev = 0;
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            const std::int64_t cover = t.points[i].*member;
            const std::uint32_t secret = payload.read_value(cursor, b);
            cursor += static_cast<std::size_t>(b);

            const std::int64_t base = (cover / block) * block;
            const std::int64_t within = base + secret;
            const std::int64_t below = within - block;
            std::int64_t value;
            if (cfg.strategy == Strategy::plain) {
                value = within;
            } else {
                const std::int64_t dist_below = std::llabs(cover - below);
                const std::int64_t dist_within = std::llabs(cover - within);
                value = dist_below >= dist_within ? within : below;
            }
            if (value < 0 || value > desc.max_value) {
                const std::int64_t other = value == within ? below : within;
                if (other >= 0 && other <= desc.max_value) {
                    value = other;
                } else {
                    throw EmbedError(std::string("no in-range candidate for field ") + desc.name +
                                     " at element " + std::to_string(i + 1));
                }
            }
            if (desc.ordered && cfg.order_preserving && i > 0 && value < prev) {
                value = order_adjust(value, prev, b);
                ++report.order_adjustments;
                if (value > desc.max_value) {
                    throw EmbedError(std::string("order adjustment pushes field ") + desc.name +
                                     " out of range at element " + std::to_string(i + 1));
                }
            }
            if (desc.ordered) prev = value;

            const std::uint64_t dist = static_cast<std::uint64_t>(value > cover ? value - cover
                                                                                : cover - value);
            report.total_distortion += dist;
            if (dist > report.max_distortion) report.max_distortion = dist;
            ++report.elements_used;
            out.points[i].*member = static_cast<std::uint16_t>(value);
        }
    }
    return {std::move(out), report};
}

BitPayload extract_template(const MinutiaeTemplate& t, int b) {
    check_bits(b);
    const std::uint32_t block = 1u << b;
    BitPayload payload;
    payload.bits.reserve(capacity(t, b));
    for (int field = 0; field < 3; ++field) {
        auto member = field_member(field);
        for (const MinutiaPoint& p : t.points) {
            payload.append_value(static_cast<std::uint32_t>(p.*member) % block, b);
        }
    }
    return payload;
}

}  // namespace minsteg
