#pragma once

#include <cstdint>

#include "minsteg/minutiae.hpp"

namespace minsteg {

// Tolerances for pairing minutiae under a candidate alignment. The score is
// always the normalized pair count matched_pairs^2 / (N1*N2).
struct MatchParams {
    double dist_tol = 10.0;   // pixels
    double angle_tol = 20.0;  // degrees
};

// Rigid map from the second template's frame onto the first's:
// p' = R(dtheta) * p + (dx, dy).
struct Alignment {
    double dx = 0.0;
    double dy = 0.0;
    double dtheta = 0.0;  // degrees
};

struct MatchResult {
    double score = 0.0;
    std::size_t matched_pairs = 0;
    Alignment alignment;
};

// Circular difference of two directions, in [0, 180].
int angle_diff(int a, int b);

// Tries the rigid transform induced by every reference pair (one minutia
// from each template): rotate by the direction difference about the
// reference minutia, translate it onto its partner, then greedily pair
// minutiae one-to-one within dist_tol pixels and angle_tol degrees.
// Transformed coordinates are rounded to the nearest integer before the
// distance test. Returns the best-scoring alignment; ties go to the lowest
// (reference index in a, reference index in b) and candidate pairs are
// consumed in (distance, index) order. Deterministic, and symmetric in its
// arguments. Empty templates score 0.
MatchResult match_templates(const MinutiaeTemplate& a, const MinutiaeTemplate& b,
                            const MatchParams& params = {});

}  // namespace minsteg
