#pragma once

// Shared helpers for the test binaries.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "minsteg/minutiae.hpp"
#include "minsteg/payload.hpp"
#include "minsteg/rng.hpp"

namespace testutil {

// Six-point fixture with duplicate x values and a mix of directions.
inline minsteg::MinutiaeTemplate fixture_template() {
    minsteg::MinutiaeTemplate t;
    t.points = {
        {43, 152, 236}, {43, 185, 236}, {46, 141, 225},
        {46, 125, 214}, {47, 114, 56},  {48, 229, 225},
    };
    return t;
}

inline minsteg::MinutiaeTemplate random_template(minsteg::Lcg64& rng, std::size_t n,
                                                 std::uint32_t max_xy = 511) {
    minsteg::MinutiaeTemplate t;
    t.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        minsteg::MinutiaPoint p;
        p.x = static_cast<std::uint16_t>(rng.next_below(max_xy + 1));
        p.y = static_cast<std::uint16_t>(rng.next_below(max_xy + 1));
        p.theta = static_cast<std::uint16_t>(rng.next_below(360));
        t.points.push_back(p);
    }
    std::stable_sort(t.points.begin(), t.points.end(),
                     [](const minsteg::MinutiaPoint& a, const minsteg::MinutiaPoint& b) {
                         return a.x < b.x;
                     });
    return t;
}

inline minsteg::BitPayload random_payload(minsteg::Lcg64& rng, std::size_t nbits) {
    minsteg::BitPayload p;
    p.bits.reserve(nbits);
    for (std::size_t i = 0; i < nbits; ++i) p.push_bit(rng.next_bit());
    return p;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace testutil
