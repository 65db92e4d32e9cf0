#include "minsteg/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "minsteg/errors.hpp"
#include "minsteg/rng.hpp"
#include "minsteg/template_io.hpp"

namespace minsteg {

namespace {

// Disjoint stream tags for deriving child seeds.
constexpr std::uint64_t kFingerStream = 0x100000000ULL;
constexpr std::uint64_t kPerturbStream = 0x200000000ULL;
constexpr std::uint64_t kPayloadStream = 0x300000000ULL;

constexpr int kImpressionsPerFinger = 8;
constexpr int kThresholdSteps = 100;

inline std::int64_t round_half_up(double v) {
    return static_cast<std::int64_t>(std::floor(v + 0.5));
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (n == 0) return;
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (threads > n) threads = static_cast<unsigned>(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        std::size_t i;
        while (!failed.load(std::memory_order_relaxed) &&
               (i = next.fetch_add(1, std::memory_order_relaxed)) < n) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

const char* strategy_name(const EmbedConfig& cfg) {
    if (cfg.bits == 0) return "none";
    return cfg.strategy == Strategy::plain ? "plain" : "optimized";
}

}  // namespace

MinutiaeTemplate gen_template(const GenParams& p) {
    if (p.width == 0 || p.height == 0) throw ArgumentError("image dimensions must be positive");
    if (p.n_min > p.n_max) throw ArgumentError("n_minutiae range is empty");
    if (p.min_spacing < 0.0) throw ArgumentError("min_spacing must be non-negative");

    Lcg64 rng(p.seed);
    const std::uint32_t n = p.n_min + rng.next_below(p.n_max - p.n_min + 1);
    const double min_d2 = p.min_spacing * p.min_spacing;
    constexpr int kMaxAttemptsPerPoint = 1000;

    MinutiaeTemplate t;
    t.points.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttemptsPerPoint && !placed; ++attempt) {
            const std::uint32_t x = rng.next_below(p.width);
            const std::uint32_t y = rng.next_below(p.height);
            bool ok = true;
            for (const MinutiaPoint& q : t.points) {
                const double dx = static_cast<double>(x) - q.x;
                const double dy = static_cast<double>(y) - q.y;
                if (dx * dx + dy * dy < min_d2) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                MinutiaPoint m;
                m.x = static_cast<std::uint16_t>(x);
                m.y = static_cast<std::uint16_t>(y);
                m.theta = static_cast<std::uint16_t>(rng.next_below(360));
                t.points.push_back(m);
                placed = true;
            }
        }
        if (!placed) {
            throw ArgumentError("could not place " + std::to_string(n) + " minutiae at spacing " +
                                std::to_string(p.min_spacing) + " within " +
                                std::to_string(p.width) + "x" + std::to_string(p.height));
        }
    }
    std::stable_sort(t.points.begin(), t.points.end(),
                     [](const MinutiaPoint& a, const MinutiaPoint& b) { return a.x < b.x; });
    return t;
}

MinutiaeTemplate perturb(const MinutiaeTemplate& t, const PerturbParams& p) {
    if (p.drop_rate < 0.0 || p.drop_rate > 1.0) throw ArgumentError("drop_rate must be in [0, 1]");
    if (p.add_rate < 0.0 || p.add_rate > 1.0) throw ArgumentError("add_rate must be in [0, 1]");
    if (p.width == 0 || p.height == 0) throw ArgumentError("image dimensions must be positive");

    Lcg64 rng(p.seed);
    const double rot = (rng.next_unit() * 2.0 - 1.0) * p.max_rotation;
    const double tx = (rng.next_unit() * 2.0 - 1.0) * p.max_translation;
    const double ty = (rng.next_unit() * 2.0 - 1.0) * p.max_translation;
    const double c = std::cos(rot * std::numbers::pi / 180.0);
    const double s = std::sin(rot * std::numbers::pi / 180.0);
    const double cx = p.width / 2.0;
    const double cy = p.height / 2.0;

    MinutiaeTemplate out;
    out.points.reserve(t.points.size());
    for (const MinutiaPoint& m : t.points) {
        if (rng.next_unit() < p.drop_rate) continue;
        const double jx = rng.next_gaussian() * p.jitter_sigma_xy;
        const double jy = rng.next_gaussian() * p.jitter_sigma_xy;
        const double jt = rng.next_gaussian() * p.jitter_sigma_theta;
        const double rx = m.x - cx;
        const double ry = m.y - cy;
        const double nx = cx + c * rx - s * ry + tx + jx;
        const double ny = cy + s * rx + c * ry + ty + jy;
        const std::int64_t xi = std::clamp<std::int64_t>(round_half_up(nx), 0, p.width - 1);
        const std::int64_t yi = std::clamp<std::int64_t>(round_half_up(ny), 0, p.height - 1);
        const std::int64_t ti = ((round_half_up(m.theta + rot + jt) % 360) + 360) % 360;
        MinutiaPoint q;
        q.x = static_cast<std::uint16_t>(xi);
        q.y = static_cast<std::uint16_t>(yi);
        q.theta = static_cast<std::uint16_t>(ti);
        out.points.push_back(q);
    }
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        if (rng.next_unit() < p.add_rate) {
            MinutiaPoint q;
            q.x = static_cast<std::uint16_t>(rng.next_below(p.width));
            q.y = static_cast<std::uint16_t>(rng.next_below(p.height));
            q.theta = static_cast<std::uint16_t>(rng.next_below(360));
            out.points.push_back(q);
        }
    }
    std::stable_sort(out.points.begin(), out.points.end(),
                     [](const MinutiaPoint& a, const MinutiaPoint& b) { return a.x < b.x; });
    return out;
}

FingerSet synth_database(std::size_t db_size, const GenParams& gen, const PerturbParams& pert) {
    FingerSet db;
    db.fingers.resize(db_size);
    for (std::size_t f = 0; f < db_size; ++f) {
        GenParams gp = gen;
        gp.seed = derive_seed(gen.seed, kFingerStream + f);
        MinutiaeTemplate original = gen_template(gp);
        db.fingers[f].reserve(kImpressionsPerFinger);
        db.fingers[f].push_back(original);
        for (int k = 1; k < kImpressionsPerFinger; ++k) {
            PerturbParams pp = pert;
            pp.width = gen.width;
            pp.height = gen.height;
            pp.seed = derive_seed(pert.seed, kPerturbStream + f * kImpressionsPerFinger +
                                                 static_cast<std::uint64_t>(k));
            db.fingers[f].push_back(perturb(original, pp));
        }
    }
    return db;
}

FingerSet load_database_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir);

    std::map<std::string, std::map<unsigned long, std::string>> grouped;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& path = entry.path();
        if (path.extension() != ".mnt") continue;
        const std::string stem = path.stem().string();
        const std::size_t sep = stem.rfind('_');
        if (sep == std::string::npos || sep == 0 || sep + 1 == stem.size()) {
            throw ParseError("template file name is not <finger>_<impression>.mnt: " +
                             path.filename().string());
        }
        const std::string finger = stem.substr(0, sep);
        const std::string imp_str = stem.substr(sep + 1);
        unsigned long imp = 0;
        auto [ptr, err] = std::from_chars(imp_str.data(), imp_str.data() + imp_str.size(), imp);
        if (err != std::errc() || ptr != imp_str.data() + imp_str.size()) {
            throw ParseError("impression number is not an integer: " + path.filename().string());
        }
        if (!grouped[finger].emplace(imp, path.string()).second) {
            throw ParseError("duplicate impression " + imp_str + " for finger " + finger);
        }
    }

    FingerSet db;
    db.fingers.reserve(grouped.size());
    for (const auto& [finger, impressions] : grouped) {
        if (impressions.size() < 2) {
            throw ArgumentError("finger " + finger + " has only " +
                                std::to_string(impressions.size()) +
                                " impression(s); need at least 2");
        }
        std::vector<MinutiaeTemplate> templates;
        templates.reserve(impressions.size());
        for (const auto& [imp, path] : impressions) {
            templates.push_back(read_template_file(path, TemplateFormat::text));
        }
        db.fingers.push_back(std::move(templates));
    }
    return db;
}

EvalReport eval_database(const FingerSet& db, const std::vector<EmbedConfig>& cfgs,
                         const MatchParams& match, std::uint64_t payload_seed, unsigned threads) {
    const std::size_t db_size = db.fingers.size();
    if (db_size < 2) throw ArgumentError("evaluation needs at least 2 fingers");
    for (std::size_t f = 0; f < db_size; ++f) {
        if (db.fingers[f].size() < 2) {
            throw ArgumentError("finger " + std::to_string(f) +
                                " has fewer than 2 impressions");
        }
    }
    for (const EmbedConfig& cfg : cfgs) {
        if (cfg.bits < 0 || cfg.bits > 8) {
            throw ArgumentError("bits per element must be in [0, 8]");
        }
    }
    if (!(match.dist_tol > 0.0)) throw ArgumentError("dist_tol must be positive");
    if (!(match.angle_tol > 0.0 && match.angle_tol <= 180.0)) {
        throw ArgumentError("angle_tol must be in (0, 180]");
    }

    // Baseline first; bits == 0 entries fold into it.
    std::vector<EmbedConfig> rows;
    EmbedConfig baseline;
    baseline.bits = 0;
    baseline.order_preserving = false;
    rows.push_back(baseline);
    for (const EmbedConfig& cfg : cfgs) {
        if (cfg.bits > 0) rows.push_back(cfg);
    }

    std::vector<std::pair<std::size_t, std::size_t>> genuine_jobs;
    for (std::size_t f = 0; f < db_size; ++f) {
        for (std::size_t k = 1; k < db.fingers[f].size(); ++k) genuine_jobs.emplace_back(f, k);
    }
    std::vector<std::pair<std::size_t, std::size_t>> impostor_jobs;
    for (std::size_t f = 0; f < db_size; ++f) {
        for (std::size_t g = f + 1; g < db_size; ++g) impostor_jobs.emplace_back(f, g);
    }

    EvalReport report;
    report.db_size = db_size;
    report.genuine_comparisons = genuine_jobs.size();
    report.impostor_comparisons = impostor_jobs.size();
    report.thresholds.reserve(kThresholdSteps + 1);
    for (int i = 0; i <= kThresholdSteps; ++i) {
        report.thresholds.push_back(static_cast<double>(i) / kThresholdSteps);
    }

    for (const EmbedConfig& cfg : rows) {
        EvalCfgResult row;
        row.cfg = cfg;

        std::vector<MinutiaeTemplate> protected_templates(db_size);
        std::uint64_t distortion_sum = 0;
        for (std::size_t f = 0; f < db_size; ++f) {
            const MinutiaeTemplate& original = db.fingers[f][0];
            if (cfg.bits == 0) {
                protected_templates[f] = original;
                continue;
            }
            try {
                const std::uint64_t cap = capacity(original, cfg.bits);
                const std::uint64_t len = usable_payload_bytes(cap);
                Lcg64 rng(derive_seed(payload_seed,
                                      kPayloadStream + f * 16 + static_cast<std::uint64_t>(cfg.bits)));
                std::vector<std::uint8_t> data(len);
                for (std::uint8_t& byte : data) {
                    byte = static_cast<std::uint8_t>(rng.next_below(256));
                }
                const BitPayload payload = frame_payload(data, cap, cfg.padding_key);
                auto [embedded, emb_report] = embed_template(original, payload, cfg);
                protected_templates[f] = std::move(embedded);
                distortion_sum += emb_report.total_distortion;
                row.order_adjustments += emb_report.order_adjustments;
            } catch (const Error&) {
                ++row.embed_failures;
                protected_templates[f] = original;
            }
        }
        row.mean_distortion = static_cast<double>(distortion_sum) / static_cast<double>(db_size);

        std::vector<double> genuine(genuine_jobs.size());
        parallel_for(genuine_jobs.size(), threads, [&](std::size_t i) {
            const auto [f, k] = genuine_jobs[i];
            genuine[i] = match_templates(protected_templates[f], db.fingers[f][k], match).score;
        });
        std::vector<double> impostor(impostor_jobs.size());
        parallel_for(impostor_jobs.size(), threads, [&](std::size_t i) {
            const auto [f, g] = impostor_jobs[i];
            impostor[i] = match_templates(protected_templates[f], protected_templates[g], match).score;
        });

        row.mean_genuine = mean(genuine);
        row.mean_impostor = mean(impostor);
        row.frr.reserve(report.thresholds.size());
        row.far.reserve(report.thresholds.size());
        for (double thr : report.thresholds) {
            std::size_t rejected = 0;
            for (double sc : genuine) {
                if (sc < thr) ++rejected;
            }
            std::size_t accepted = 0;
            for (double sc : impostor) {
                if (sc > thr) ++accepted;
            }
            row.frr.push_back(genuine.empty()
                                  ? 0.0
                                  : static_cast<double>(rejected) / static_cast<double>(genuine.size()));
            row.far.push_back(impostor.empty()
                                  ? 0.0
                                  : static_cast<double>(accepted) / static_cast<double>(impostor.size()));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

EvalReport run_eval(std::size_t db_size, const GenParams& gen, const PerturbParams& pert,
                    const std::vector<EmbedConfig>& cfgs, const MatchParams& match,
                    unsigned threads) {
    if (db_size < 2) throw ArgumentError("db_size must be at least 2");
    const FingerSet db = synth_database(db_size, gen, pert);
    return eval_database(db, cfgs, match, derive_seed(gen.seed, kPayloadStream), threads);
}

std::string report_csv(const EvalReport& r) {
    std::string out =
        "b,strategy,order_preserving,threshold,frr,far,mean_genuine,mean_impostor,"
        "mean_distortion,order_adjustments\n";
    for (const EvalCfgResult& row : r.rows) {
        const std::string prefix = std::to_string(row.cfg.bits) + "," + strategy_name(row.cfg) +
                                   "," + (row.cfg.bits > 0 && row.cfg.order_preserving ? "1" : "0") +
                                   ",";
        const std::string suffix = "," + fmt_double(row.mean_genuine) + "," +
                                   fmt_double(row.mean_impostor) + "," +
                                   fmt_double(row.mean_distortion) + "," +
                                   std::to_string(row.order_adjustments) + "\n";
        for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
            out += prefix;
            out += fmt_double(r.thresholds[i]);
            out += ',';
            out += fmt_double(i < row.frr.size() ? row.frr[i] : 0.0);
            out += ',';
            out += fmt_double(i < row.far.size() ? row.far[i] : 0.0);
            out += suffix;
        }
    }
    return out;
}

}  // namespace minsteg
