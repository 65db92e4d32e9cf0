#pragma once

#include <cstdint>
#include <vector>

namespace minsteg {

// One minutia: pixel location plus ridge direction in degrees [0, 359].
struct MinutiaPoint {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::uint16_t theta = 0;

    friend bool operator==(const MinutiaPoint&, const MinutiaPoint&) = default;
};

// A minutiae template: the points of one fingerprint stored in ascending-x
// order. Equal x values are legal and keep their stored relative order.
//
// The sort invariant is enforced at the parse/serialize boundary, not by the
// type itself: embedding with order preservation disabled can legitimately
// produce out-of-order templates, and those must still be representable.
struct MinutiaeTemplate {
    std::vector<MinutiaPoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    bool sorted_by_x() const {
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i].x < points[i - 1].x) return false;
        }
        return true;
    }

    friend bool operator==(const MinutiaeTemplate&, const MinutiaeTemplate&) = default;
};

}  // namespace minsteg
