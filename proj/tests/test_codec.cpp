#include <doctest.h>

#include <cstdlib>
#include <vector>

#include "minsteg/codec.hpp"
#include "minsteg/errors.hpp"
#include "minsteg/rng.hpp"
#include "testutil.hpp"

using namespace minsteg;

namespace {

// Independent reference for the optimized element embedding: evaluate both
// same-residue candidates and apply the tie rule directly.
std::int64_t oracle_optimized(std::uint32_t cover, std::uint32_t secret, int bits) {
    const std::int64_t block = std::int64_t{1} << bits;
    const std::int64_t base = (static_cast<std::int64_t>(cover) / block) * block;
    const std::int64_t within = base + secret;
    const std::int64_t below = base - (block - secret);
    const std::int64_t dist_below = std::llabs(static_cast<std::int64_t>(cover) - below);
    const std::int64_t dist_within = std::llabs(static_cast<std::int64_t>(cover) - within);
    return dist_below >= dist_within ? within : below;
}

// Independent reference for the order adjustment: try multiples one by one.
std::int64_t oracle_order_adjust(std::int64_t value, std::int64_t prev_value, int bits) {
    if (value >= prev_value) return value;
    const std::int64_t block = std::int64_t{1} << bits;
    for (std::int64_t steps = 1;; ++steps) {
        if (value + steps * block >= prev_value) return value + steps * block;
    }
}

// Reference extraction: slowest possible bit peeling, field-major.
BitPayload oracle_extract(const MinutiaeTemplate& t, int b) {
    BitPayload p;
    auto emit = [&](std::uint32_t v) {
        for (int k = b - 1; k >= 0; --k) p.push_bit(((v >> k) & 1u) != 0);
    };
    for (const MinutiaPoint& m : t.points) emit(m.x % (1u << b));
    for (const MinutiaPoint& m : t.points) emit(m.y % (1u << b));
    for (const MinutiaPoint& m : t.points) emit(m.theta % (1u << b));
    return p;
}

}  // namespace

TEST_CASE("plain element embedding worked examples") {
    CHECK(embed_element_plain(12, 3, 2) == 15);
    // Clearing the last bit of 0b101011.
    CHECK(embed_element_plain(43, 0, 1) == 42);
    CHECK(embed_element_plain(43, 0, 1) == ((43u & ~1u) | 0u));
    // Embedding an element's own residue is the identity.
    for (std::uint32_t g : {0u, 7u, 46u, 359u, 65535u}) {
        for (int b = 1; b <= 8; ++b) {
            CHECK(embed_element_plain(g, g % (1u << b), b) == g);
        }
    }
}

TEST_CASE("optimized element embedding worked examples") {
    CHECK(embed_element_optimized(12, 3, 2) == 11);
    CHECK(embed_element_optimized(46, 2, 2) == 46);
    CHECK(embed_element_optimized(47, 1, 2) == 45);
    // Negative result from the previous-block candidate.
    CHECK(embed_element_optimized(1, 7, 3) == -1);
}

TEST_CASE("element embedding rejects out-of-range secrets") {
    CHECK_THROWS_AS(embed_element_plain(10, 4, 2), ArgumentError);
    CHECK_THROWS_AS(embed_element_optimized(10, 4, 2), ArgumentError);
    CHECK_THROWS_AS(embed_element_plain(10, 0, 0), ArgumentError);
    CHECK_THROWS_AS(embed_element_plain(10, 0, 9), ArgumentError);
}

TEST_CASE("element embedding matches the exhaustive oracle for small b") {
    for (int b = 1; b <= 3; ++b) {
        const std::uint32_t block = 1u << b;
        for (std::uint32_t g = 0; g <= 600; ++g) {
            for (std::uint32_t d = 0; d < block; ++d) {
                const std::uint32_t plain = embed_element_plain(g, d, b);
                const std::int64_t opt = embed_element_optimized(g, d, b);
                CHECK(plain % block == d);
                CHECK(plain / block == g / block);
                CHECK(((opt % block) + block) % block == d);
                CHECK(opt == oracle_optimized(g, d, b));
                const std::int64_t plain_dist = std::llabs(static_cast<std::int64_t>(plain) - g);
                const std::int64_t opt_dist = std::llabs(opt - static_cast<std::int64_t>(g));
                CHECK(opt_dist <= plain_dist);
                CHECK(plain_dist <= block - 1);
            }
        }
    }
}

TEST_CASE("order adjustment worked examples and oracle") {
    CHECK(order_adjust(45, 46, 2) == 49);
    CHECK(order_adjust(50, 46, 2) == 50);
    CHECK(order_adjust(-1, 0, 3) == 7);

    Lcg64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const int b = 1 + static_cast<int>(rng.next_below(8));
        const std::int64_t z = static_cast<std::int64_t>(rng.next_below(2000)) - 1000;
        const std::int64_t z_prev = static_cast<std::int64_t>(rng.next_below(2000)) - 1000;
        const std::int64_t adjusted = order_adjust(z, z_prev, b);
        CHECK(adjusted == oracle_order_adjust(z, z_prev, b));
        CHECK(adjusted >= std::min(z, z_prev));
        const std::int64_t block = std::int64_t{1} << b;
        CHECK(((adjusted - z) % block) == 0);
        if (z < z_prev) {
            CHECK(adjusted >= z_prev);
            CHECK(adjusted - z < z_prev - z + block);
        }
    }
}

TEST_CASE("capacity is 3bN") {
    CHECK(capacity(MinutiaeTemplate{}, 3) == 0);
    Lcg64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.next_below(120);
        const int b = 1 + static_cast<int>(rng.next_below(8));
        const MinutiaeTemplate t = testutil::random_template(rng, n);
        CHECK(capacity(t, b) == 3ull * b * n);
    }
    MinutiaeTemplate eleven = testutil::random_template(rng, 11);
    CHECK(capacity(eleven, 1) == 33);
}

TEST_CASE("usable payload bytes after framing") {
    CHECK(usable_payload_bytes(0) == 0);
    CHECK(usable_payload_bytes(15) == 0);
    CHECK(usable_payload_bytes(16) == 0);
    CHECK(usable_payload_bytes(24) == 1);
    CHECK(usable_payload_bytes(33) == 2);
    CHECK(usable_payload_bytes(1u << 20) == 8191);  // prefix addressing limit
}

TEST_CASE("frame_payload layout") {
    const std::uint8_t one_byte[] = {0xFF};
    const BitPayload framed = frame_payload(one_byte, 24, 0);
    REQUIRE(framed.size() == 24);
    CHECK(framed.read_value(0, 16) == 8);
    for (std::size_t i = 16; i < 24; ++i) CHECK(framed.bits[i] == 1);

    const BitPayload empty = frame_payload({}, 16, 0);
    REQUIRE(empty.size() == 16);
    CHECK(empty.read_value(0, 16) == 0);
}

TEST_CASE("frame_payload errors") {
    const std::uint8_t data[] = {1, 2, 3};
    CHECK_THROWS_AS(frame_payload(data, 39, 0), CapacityError);  // needs 40 bits
    const std::vector<std::uint8_t> big(1u << 13, 0);
    CHECK_THROWS_AS(frame_payload(big, 1u << 20, 0), CapacityError);
}

TEST_CASE("unframe_payload errors") {
    BitPayload short_frame;
    short_frame.append_value(0, 8);
    CHECK_THROWS_AS(unframe_payload(short_frame), CapacityError);

    BitPayload bad_prefix;
    bad_prefix.append_value(24, 16);  // claims 24 data bits, none present
    CHECK_THROWS_AS(unframe_payload(bad_prefix), CapacityError);

    BitPayload ragged;
    ragged.append_value(4, 16);  // not a whole byte
    ragged.append_value(0xF, 4);
    CHECK_THROWS_AS(unframe_payload(ragged), CapacityError);
}

TEST_CASE("frame/unframe roundtrip with random padding keys") {
    Lcg64 rng(555);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = rng.next_below(64);
        std::vector<std::uint8_t> data(len);
        for (auto& byte : data) byte = static_cast<std::uint8_t>(rng.next_below(256));
        const std::uint64_t cap = 16 + 8 * len + rng.next_below(100);
        const std::uint64_t key = rng.next_u64();
        const BitPayload framed = frame_payload(data, cap, key);
        CHECK(framed.size() == cap);
        CHECK(unframe_payload(framed) == data);
    }
}

TEST_CASE("padding bits come from the documented generator") {
    const BitPayload framed = frame_payload({}, 26, 42);
    Lcg64 expected(42);
    for (std::size_t i = 16; i < 26; ++i) {
        CHECK(framed.bits[i] == (expected.next_bit() ? 1 : 0));
    }
}

TEST_CASE("embedding the fixture's x pair honors order preservation") {
    MinutiaeTemplate t;
    t.points = {{46, 125, 214}, {47, 114, 56}};
    // Field-major payload: x bits 10, 01; y and theta carry their own residues.
    BitPayload payload;
    payload.append_value(0b10, 2);
    payload.append_value(0b01, 2);
    payload.append_value(125 % 4, 2);
    payload.append_value(114 % 4, 2);
    payload.append_value(214 % 4, 2);
    payload.append_value(56 % 4, 2);

    EmbedConfig cfg;
    cfg.bits = 2;
    cfg.strategy = Strategy::optimized;
    cfg.order_preserving = true;
    auto [protected_t, report] = embed_template(t, payload, cfg);

    CHECK(protected_t.points[0].x == 46);
    CHECK(protected_t.points[1].x == 49);
    CHECK(protected_t.points[0].y == 125);
    CHECK(protected_t.points[1].y == 114);
    CHECK(protected_t.points[0].theta == 214);
    CHECK(protected_t.points[1].theta == 56);
    CHECK(protected_t.sorted_by_x());
    CHECK(report.order_adjustments == 1);
    CHECK(report.elements_used == 6);
    CHECK(report.total_distortion == 2);
    CHECK(report.max_distortion == 2);

    // Without the adjustment the second x drops to 45.
    cfg.order_preserving = false;
    auto [raw_t, raw_report] = embed_template(t, payload, cfg);
    CHECK(raw_t.points[1].x == 45);
    CHECK(raw_report.order_adjustments == 0);
    CHECK_FALSE(raw_t.sorted_by_x());

    // Extraction is blind to the adjustment.
    CHECK(extract_template(protected_t, 2) == payload);
    CHECK(extract_template(raw_t, 2) == payload);
}

TEST_CASE("embedding a template's own bits changes nothing") {
    Lcg64 rng(99);
    const MinutiaeTemplate t = testutil::random_template(rng, 40);
    for (int b = 1; b <= 4; ++b) {
        for (Strategy s : {Strategy::plain, Strategy::optimized}) {
            EmbedConfig cfg;
            cfg.bits = b;
            cfg.strategy = s;
            auto [out, report] = embed_template(t, extract_template(t, b), cfg);
            CHECK(out == t);
            CHECK(report.total_distortion == 0);
            CHECK(report.max_distortion == 0);
            CHECK(report.order_adjustments == 0);
        }
    }
}

TEST_CASE("embed rejects a payload of the wrong length") {
    Lcg64 rng(5);
    const MinutiaeTemplate t = testutil::random_template(rng, 10);
    BitPayload payload = testutil::random_payload(rng, 10);
    CHECK_THROWS_AS(embed_template(t, payload, EmbedConfig{}), ArgumentError);
}

TEST_CASE("theta range policy swaps to the in-range candidate") {
    MinutiaeTemplate t;
    t.points = {{10, 10, 359}};
    // b=4: the in-block candidate for theta becomes 352 + d; d=15 gives 367,
    // so the previous-block value 351 must be used instead.
    EmbedConfig cfg;
    cfg.bits = 4;
    cfg.strategy = Strategy::plain;
    BitPayload payload;
    payload.append_value(10 % 16, 4);
    payload.append_value(10 % 16, 4);
    payload.append_value(15, 4);
    auto [out, report] = embed_template(t, payload, cfg);
    CHECK(out.points[0].theta == 351);
    CHECK(extract_template(out, 4).read_value(8, 4) == 15);
}

TEST_CASE("embed fails when order adjustment overflows 16 bits") {
    MinutiaeTemplate t;
    t.points = {{65534, 0, 0}, {65535, 0, 0}};
    // First x becomes 65535 (d=3), second wants residue 0: candidates 65532
    // and 65536; ordering pushes it past the 16-bit ceiling.
    BitPayload payload;
    payload.append_value(0b11, 2);
    payload.append_value(0b00, 2);
    for (int i = 0; i < 4; ++i) payload.append_value(0, 2);
    EmbedConfig cfg;
    cfg.bits = 2;
    cfg.strategy = Strategy::plain;
    try {
        embed_template(t, payload, cfg);
        FAIL("expected EmbedError");
    } catch (const EmbedError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("x") != std::string::npos);
        CHECK(msg.find("element 2") != std::string::npos);
    }
}

TEST_CASE("roundtrip across strategies and order preservation") {
    Lcg64 rng(31337);
    for (int trial = 0; trial < 250; ++trial) {
        const std::size_t n = 11 + rng.next_below(82);
        const int b = 1 + static_cast<int>(rng.next_below(8));
        const MinutiaeTemplate t = testutil::random_template(rng, n);
        const BitPayload payload = testutil::random_payload(rng, 3 * b * n);
        for (Strategy s : {Strategy::plain, Strategy::optimized}) {
            for (bool op : {false, true}) {
                EmbedConfig cfg;
                cfg.bits = b;
                cfg.strategy = s;
                cfg.order_preserving = op;
                auto [out, report] = embed_template(t, payload, cfg);
                REQUIRE(extract_template(out, b) == payload);
                REQUIRE(extract_template(out, b) == oracle_extract(out, b));
                if (op) REQUIRE(out.sorted_by_x());
                CHECK(report.elements_used == 3 * n);
            }
        }
    }
}

TEST_CASE("extraction of an all-multiples template is all zeros") {
    MinutiaeTemplate t;
    t.points = {{8, 16, 24}, {32, 40, 48}};
    const BitPayload p = extract_template(t, 3);
    REQUIRE(p.size() == 18);
    for (std::uint8_t bit : p.bits) CHECK(bit == 0);
}

TEST_CASE("single point (15, 0, 0) contributes x bits 11") {
    MinutiaeTemplate t;
    t.points = {{15, 0, 0}};
    const BitPayload p = extract_template(t, 2);
    REQUIRE(p.size() == 6);
    CHECK(p.bits[0] == 1);
    CHECK(p.bits[1] == 1);
}

TEST_CASE("payload byte conversion is big-endian and lossless") {
    const std::uint8_t bytes[] = {0xA5, 0x01};
    const BitPayload p = BitPayload::from_bytes(bytes);
    REQUIRE(p.size() == 16);
    CHECK(p.bits[0] == 1);  // MSB of 0xA5
    CHECK(p.bits[7] == 1);  // LSB of 0xA5
    CHECK(p.to_bytes() == std::vector<std::uint8_t>{0xA5, 0x01});
    BitPayload ragged;
    ragged.push_bit(true);
    CHECK_THROWS_AS(ragged.to_bytes(), ArgumentError);
}
