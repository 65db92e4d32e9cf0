#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minsteg/codec.hpp"
#include "minsteg/matcher.hpp"
#include "minsteg/minutiae.hpp"

namespace minsteg {

// Synthetic template generation: points uniform over the image with a
// minimum pairwise spacing, directions uniform in [0, 359].
struct GenParams {
    std::uint32_t width = 256;   // pixels
    std::uint32_t height = 256;  // pixels
    std::uint32_t n_min = 30;    // minutiae count range, inclusive
    std::uint32_t n_max = 60;
    double min_spacing = 8.0;  // pixels
    std::uint64_t seed = 0;
};

// One synthetic impression of an existing template: a random rigid
// transform, per-minutia Gaussian jitter, random drops and additions.
// Coordinates are clamped to the width x height image plane.
struct PerturbParams {
    double max_translation = 20.0;    // pixels, each axis
    double max_rotation = 15.0;       // degrees, about the image center
    double jitter_sigma_xy = 2.0;     // pixels
    double jitter_sigma_theta = 5.0;  // degrees
    double drop_rate = 0.1;
    double add_rate = 0.1;
    std::uint32_t width = 256;
    std::uint32_t height = 256;
    std::uint64_t seed = 0;
};

// Per-configuration outcome of an evaluation run. bits == 0 marks the
// unembedded baseline. frr[i]/far[i] correspond to thresholds[i] of the
// enclosing report: FRR counts genuine scores strictly below the threshold,
// FAR impostor scores strictly above it.
struct EvalCfgResult {
    EmbedConfig cfg;
    double mean_genuine = 0.0;
    double mean_impostor = 0.0;
    double mean_distortion = 0.0;  // mean per-template total distortion
    std::uint64_t order_adjustments = 0;
    std::size_t embed_failures = 0;
    std::vector<double> frr;
    std::vector<double> far;
};

struct EvalReport {
    std::vector<double> thresholds;   // 101 evenly spaced values in [0, 1]
    std::vector<EvalCfgResult> rows;  // baseline first, then the given configs
    std::size_t db_size = 0;
    std::size_t genuine_comparisons = 0;
    std::size_t impostor_comparisons = 0;
};

MinutiaeTemplate gen_template(const GenParams& p);
MinutiaeTemplate perturb(const MinutiaeTemplate& t, const PerturbParams& p);

// A database of fingers; impressions[0] is the impression that gets
// enrolled (and embedded), the rest are query impressions.
struct FingerSet {
    std::vector<std::vector<MinutiaeTemplate>> fingers;
};

// db_size fingers, 8 impressions each: one generated original plus 7
// perturbations of it. Perturbation bounds are taken from gen's image size.
FingerSet synth_database(std::size_t db_size, const GenParams& gen, const PerturbParams& pert);

// Loads text templates named <finger>_<impression>.mnt from a directory.
// Impressions are ordered by number; every finger needs at least two.
FingerSet load_database_dir(const std::string& dir);

// For each config: embeds a fresh random payload (derived from
// payload_seed) into impression 0 of every finger, scores the protected
// template against the finger's other impressions (genuine) and against
// every other finger's protected impression 0 (impostor), and sweeps
// FRR/FAR over the thresholds. An unembedded baseline row always comes
// first; configs with bits == 0 fold into it. threads == 0 picks the
// hardware concurrency; results do not depend on the thread count.
EvalReport eval_database(const FingerSet& db, const std::vector<EmbedConfig>& cfgs,
                         const MatchParams& match, std::uint64_t payload_seed,
                         unsigned threads = 0);

// Synthetic end-to-end run over db_size fingers.
EvalReport run_eval(std::size_t db_size, const GenParams& gen, const PerturbParams& pert,
                    const std::vector<EmbedConfig>& cfgs, const MatchParams& match,
                    unsigned threads = 0);

// One row per (config, threshold), columns
// b,strategy,order_preserving,threshold,frr,far,mean_genuine,mean_impostor,
// mean_distortion,order_adjustments. Floating-point fields use the shortest
// exact decimal form, so parsing the CSV back recovers the report values.
std::string report_csv(const EvalReport& r);

}  // namespace minsteg
