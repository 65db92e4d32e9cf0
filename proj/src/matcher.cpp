#include "minsteg/matcher.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "minsteg/errors.hpp"

namespace minsteg {

namespace {

const std::array<double, 360>& cos_table() {
    static const std::array<double, 360> table = [] {
        std::array<double, 360> t{};
        for (int d = 0; d < 360; ++d) t[d] = std::cos(d * std::numbers::pi / 180.0);
        return t;
    }();
    return table;
}

const std::array<double, 360>& sin_table() {
    static const std::array<double, 360> table = [] {
        std::array<double, 360> t{};
        for (int d = 0; d < 360; ++d) t[d] = std::sin(d * std::numbers::pi / 180.0);
        return t;
    }();
    return table;
}

// Half-up rounding; invariant under integer shifts, which keeps match
// results exactly translation-invariant.
inline std::int64_t round_half_up(double v) {
    return static_cast<std::int64_t>(std::floor(v + 0.5));
}

struct Candidate {
    std::int64_t d2;
    std::uint32_t kl;  // (k << 16) | l, preserves (k, l) order for ties
};

struct DirResult {
    std::size_t pairs = 0;
    std::size_t ref_a = 0;
    std::size_t ref_b = 0;
    int dtheta = 0;
};

// Best alignment mapping B onto A, over all reference pairs. Candidate
// pair coordinates are computed from rotated integer difference vectors,
// so translating both templates by the same integer offset yields exactly
// the same pair counts.
DirResult best_direction(const MinutiaeTemplate& A, const MinutiaeTemplate& B,
                         const MatchParams& params) {
    const std::size_t na = A.size();
    const std::size_t nb = B.size();
    const double tol2 = params.dist_tol * params.dist_tol;
    int angle_tol = static_cast<int>(std::floor(params.angle_tol));
    if (angle_tol > 180) angle_tol = 180;
    // A full window would visit the +/-180 bucket twice.
    const int off_lo = angle_tol == 180 ? -179 : -angle_tol;
    const int off_hi = angle_tol;

    // Bucket all (k, l) pairs by direction difference delta = theta_a - theta_b
    // mod 360; a pair is angle-compatible with an alignment iff its bucket
    // lies within angle_tol of the alignment's rotation.
    std::vector<std::uint32_t> bucket_count(360, 0);
    for (std::size_t k = 0; k < na; ++k) {
        for (std::size_t l = 0; l < nb; ++l) {
            const int delta = (A.points[k].theta - B.points[l].theta + 360) % 360;
            ++bucket_count[delta];
        }
    }
    std::vector<std::uint32_t> bucket_start(361, 0);
    for (int d = 0; d < 360; ++d) bucket_start[d + 1] = bucket_start[d] + bucket_count[d];
    std::vector<std::uint32_t> entries(na * nb);
    {
        std::vector<std::uint32_t> fill(bucket_start.begin(), bucket_start.end() - 1);
        for (std::size_t k = 0; k < na; ++k) {
            for (std::size_t l = 0; l < nb; ++l) {
                const int delta = (A.points[k].theta - B.points[l].theta + 360) % 360;
                entries[fill[delta]++] = static_cast<std::uint32_t>((k << 16) | l);
            }
        }
    }
    std::vector<std::uint32_t> window_count(360, 0);
    for (int d = 0; d < 360; ++d) {
        std::uint32_t total = 0;
        for (int o = off_lo; o <= off_hi; ++o) total += bucket_count[(d + o + 360) % 360];
        window_count[d] = total;
    }

    const auto& cos_t = cos_table();
    const auto& sin_t = sin_table();
    std::vector<Candidate> candidates;
    candidates.reserve(na * nb / 4 + 16);
    std::vector<char> used_a(na), used_b(nb);

    DirResult best;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const int dtheta = (A.points[i].theta - B.points[j].theta + 360) % 360;
            if (window_count[dtheta] <= best.pairs) continue;

            const double c = cos_t[dtheta];
            const double s = sin_t[dtheta];
            const std::int64_t ax = A.points[i].x;
            const std::int64_t ay = A.points[i].y;
            const int bx = B.points[j].x;
            const int by = B.points[j].y;

            candidates.clear();
            for (int o = off_lo; o <= off_hi; ++o) {
                const int delta = (dtheta + o + 360) % 360;
                const std::uint32_t* it = entries.data() + bucket_start[delta];
                const std::uint32_t* end = entries.data() + bucket_start[delta + 1];
                for (; it != end; ++it) {
                    const std::uint32_t kl = *it;
                    const std::size_t k = kl >> 16;
                    const std::size_t l = kl & 0xFFFF;
                    const double ddx = static_cast<double>(B.points[l].x - bx);
                    const double ddy = static_cast<double>(B.points[l].y - by);
                    const std::int64_t ex = A.points[k].x - (ax + round_half_up(c * ddx - s * ddy));
                    const double ex2 = static_cast<double>(ex * ex);
                    if (ex2 > tol2) continue;
                    const std::int64_t ey = A.points[k].y - (ay + round_half_up(s * ddx + c * ddy));
                    const std::int64_t d2 = ex * ex + ey * ey;
                    if (static_cast<double>(d2) <= tol2) candidates.push_back({d2, kl});
                }
            }
            if (candidates.size() <= best.pairs) continue;

            std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
                return a.d2 != b.d2 ? a.d2 < b.d2 : a.kl < b.kl;
            });
            std::fill(used_a.begin(), used_a.end(), 0);
            std::fill(used_b.begin(), used_b.end(), 0);
            std::size_t pairs = 0;
            for (const Candidate& cand : candidates) {
                const std::size_t k = cand.kl >> 16;
                const std::size_t l = cand.kl & 0xFFFF;
                if (used_a[k] || used_b[l]) continue;
                used_a[k] = used_b[l] = 1;
                ++pairs;
            }
            if (pairs > best.pairs) best = {pairs, i, j, dtheta};
        }
    }
    return best;
}

bool template_less(const MinutiaeTemplate& a, const MinutiaeTemplate& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const MinutiaPoint& p = a.points[i];
        const MinutiaPoint& q = b.points[i];
        if (p.x != q.x) return p.x < q.x;
        if (p.y != q.y) return p.y < q.y;
        if (p.theta != q.theta) return p.theta < q.theta;
    }
    return false;
}

}  // namespace

int angle_diff(int a, int b) {
    int d = (a - b) % 360;
    if (d < 0) d += 360;
    return d > 180 ? 360 - d : d;
}

MatchResult match_templates(const MinutiaeTemplate& a, const MinutiaeTemplate& b,
                            const MatchParams& params) {
    if (!(params.dist_tol > 0.0)) throw ArgumentError("dist_tol must be positive");
    if (!(params.angle_tol > 0.0 && params.angle_tol <= 180.0)) {
        throw ArgumentError("angle_tol must be in (0, 180]");
    }
    if (a.size() > 0xFFFF || b.size() > 0xFFFF) {
        throw ArgumentError("templates larger than 65535 points are not supported");
    }
    MatchResult result;
    if (a.empty() || b.empty()) return result;

    // Evaluate one canonical direction so the result is exactly symmetric
    // in the argument order.
    const bool swapped = template_less(b, a);
    const MinutiaeTemplate& first = swapped ? b : a;
    const MinutiaeTemplate& second = swapped ? a : b;

    const DirResult best = best_direction(first, second, params);
    result.matched_pairs = best.pairs;
    result.score = static_cast<double>(best.pairs) * static_cast<double>(best.pairs) /
                   (static_cast<double>(a.size()) * static_cast<double>(b.size()));

    const double c = cos_table()[best.dtheta];
    const double s = sin_table()[best.dtheta];
    const MinutiaPoint& ra = first.points[best.ref_a];
    const MinutiaPoint& rb = second.points[best.ref_b];
    // Transform mapping `second` onto `first`: p' = R(dtheta) p + t.
    const double tx = ra.x - (c * rb.x - s * rb.y);
    const double ty = ra.y - (s * rb.x + c * rb.y);
    if (!swapped) {
        result.alignment = {tx, ty, static_cast<double>(best.dtheta)};
    } else {
        // Report the inverse, which maps b onto a.
        result.alignment = {-(c * tx + s * ty), s * tx - c * ty,
                            static_cast<double>((360 - best.dtheta) % 360)};
    }
    return result;
}

}  // namespace minsteg
