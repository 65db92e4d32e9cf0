// Command-line front end: embed, extract, capacity, match, gen, eval.
//
// Exit codes: 0 success, 1 usage error, 2 data error (parse/range/order/
// capacity/embed), 3 I/O error. Diagnostics go to stderr; data goes to
// stdout or the --out file.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minsteg/codec.hpp"
#include "minsteg/errors.hpp"
#include "minsteg/eval.hpp"
#include "minsteg/matcher.hpp"
#include "minsteg/template_io.hpp"

namespace {

using namespace minsteg;

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

std::vector<std::uint8_t> parse_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.size() % 2 != 0) {
        throw ArgumentError("hex payload must have an even number of digits");
    }
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw ArgumentError(std::string("invalid hex digit '") + c + "'");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return out;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed while reading " + path);
    const std::string& data = ss.str();
    return std::vector<std::uint8_t>(data.begin(), data.end());
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("failed while writing " + path);
}

std::optional<TemplateFormat> format_option(const std::string& name) {
    if (name.empty()) return std::nullopt;
    return name == "binary" ? TemplateFormat::binary : TemplateFormat::text;
}

Strategy strategy_option(const std::string& name) {
    return name == "plain" ? Strategy::plain : Strategy::optimized;
}

struct CommonOpts {
    std::string format;  // "", "text" or "binary"
};

void add_format_flag(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--format", opts.format, "template file format (overrides extension inference)")
        ->check(CLI::IsMember({"text", "binary"}));
}

int cmd_embed(const std::string& template_path, const std::string& payload_file,
              const std::string& payload_hex, bool have_hex, int bits,
              const std::string& strategy, bool order_preserving, std::uint64_t key,
              const std::string& out_path, const CommonOpts& common) {
    const auto fmt = format_option(common.format);
    const MinutiaeTemplate t = read_template_file(template_path, fmt);

    std::vector<std::uint8_t> data;
    if (have_hex) {
        data = parse_hex(payload_hex);
    } else {
        data = read_bytes(payload_file);
    }

    EmbedConfig cfg;
    cfg.bits = bits;
    cfg.strategy = strategy_option(strategy);
    cfg.order_preserving = order_preserving;
    cfg.padding_key = key;

    const BitPayload payload = frame_payload(data, capacity(t, cfg.bits), cfg.padding_key);
    auto [protected_template, report] = embed_template(t, payload, cfg);
    write_template_file(out_path, protected_template, fmt);

    std::cerr << "elements_used=" << report.elements_used << "\n"
              << "total_distortion=" << report.total_distortion << "\n"
              << "max_distortion=" << report.max_distortion << "\n"
              << "order_adjustments=" << report.order_adjustments << "\n";
    return 0;
}

int cmd_extract(const std::string& template_path, int bits, const std::string& out_path,
                const CommonOpts& common) {
    const MinutiaeTemplate t = read_template_file(template_path, format_option(common.format));
    const std::vector<std::uint8_t> data = unframe_payload(extract_template(t, bits));
    if (out_path.empty()) {
        std::cout.write(reinterpret_cast<const char*>(data.data()),
                        static_cast<std::streamsize>(data.size()));
        std::cout.flush();
    } else {
        write_bytes(out_path, data);
    }
    return 0;
}

int cmd_capacity(const std::string& template_path, int bits, const CommonOpts& common) {
    const MinutiaeTemplate t = read_template_file(template_path, format_option(common.format));
    const std::uint64_t cap = capacity(t, bits);
    std::cout << "capacity_bits=" << cap << "\n"
              << "usable_payload_bytes=" << usable_payload_bytes(cap) << "\n";
    return 0;
}

int cmd_match(const std::string& path_a, const std::string& path_b, double dist_tol,
              double angle_tol, const CommonOpts& common) {
    const auto fmt = format_option(common.format);
    const MinutiaeTemplate a = read_template_file(path_a, fmt);
    const MinutiaeTemplate b = read_template_file(path_b, fmt);
    MatchParams params;
    params.dist_tol = dist_tol;
    params.angle_tol = angle_tol;
    const MatchResult r = match_templates(a, b, params);
    std::cout << "score=" << fmt_double(r.score) << "\n"
              << "matched_pairs=" << r.matched_pairs << "\n"
              << "dx=" << fmt_double(r.alignment.dx) << "\n"
              << "dy=" << fmt_double(r.alignment.dy) << "\n"
              << "dtheta=" << fmt_double(r.alignment.dtheta) << "\n";
    return 0;
}

int cmd_gen(const GenParams& params, const std::string& out_path, const CommonOpts& common) {
    const MinutiaeTemplate t = gen_template(params);
    if (out_path.empty()) {
        if (format_option(common.format) == TemplateFormat::binary) {
            const std::vector<std::uint8_t> bytes = serialize_binary(t);
            std::cout.write(reinterpret_cast<const char*>(bytes.data()),
                            static_cast<std::streamsize>(bytes.size()));
            std::cout.flush();
        } else {
            std::cout << serialize_text(t);
        }
    } else {
        write_template_file(out_path, t, format_option(common.format));
    }
    return 0;
}

int cmd_eval(std::size_t db_size, const GenParams& gen, const PerturbParams& pert,
             const std::vector<int>& bits_list, const std::string& strategy,
             bool order_preserving, std::uint64_t key, const MatchParams& match,
             const std::string& templates_dir, unsigned threads, const std::string& out_path) {
    std::vector<EmbedConfig> cfgs;
    for (int b : bits_list) {
        if (b == 0) {
            cfgs.push_back(EmbedConfig{0, Strategy::optimized, false, key});
            continue;
        }
        std::vector<Strategy> strategies;
        if (strategy == "both") {
            strategies = {Strategy::plain, Strategy::optimized};
        } else {
            strategies = {strategy_option(strategy)};
        }
        for (Strategy s : strategies) {
            cfgs.push_back(EmbedConfig{b, s, order_preserving, key});
        }
    }

    EvalReport report;
    if (!templates_dir.empty()) {
        const FingerSet db = load_database_dir(templates_dir);
        report = eval_database(db, cfgs, match, gen.seed, threads);
    } else {
        report = run_eval(db_size, gen, pert, cfgs, match, threads);
    }

    for (const EvalCfgResult& row : report.rows) {
        const char* name = row.cfg.bits == 0
                               ? "none"
                               : (row.cfg.strategy == Strategy::plain ? "plain" : "optimized");
        std::cerr << "b=" << row.cfg.bits << " strategy=" << name << " order_preserving="
                  << ((row.cfg.bits > 0 && row.cfg.order_preserving) ? 1 : 0)
                  << " mean_genuine=" << fmt_double(row.mean_genuine)
                  << " mean_impostor=" << fmt_double(row.mean_impostor)
                  << " mean_distortion=" << fmt_double(row.mean_distortion)
                  << " order_adjustments=" << row.order_adjustments
                  << " embed_failures=" << row.embed_failures << "\n";
    }

    const std::string csv = report_csv(report);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + out_path + " for writing");
        out << csv;
        out.flush();
        if (!out) throw IoError("failed while writing " + out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minsteg: data hiding in fingerprint minutiae templates"};
    app.require_subcommand(1);

    int rc = 0;

    // embed
    auto* embed = app.add_subcommand("embed", "hide a payload inside a template");
    std::string embed_template_path, embed_payload_file, embed_payload_hex, embed_out;
    std::string embed_strategy = "optimized";
    int embed_bits = 2;
    bool embed_op = true;
    std::uint64_t embed_key = 0;
    CommonOpts embed_common;
    embed->add_option("template", embed_template_path, "input template file")->required();
    auto* opt_pf = embed->add_option("--payload-file", embed_payload_file, "payload bytes file");
    auto* opt_ph = embed->add_option("--payload-hex", embed_payload_hex, "payload as hex digits");
    opt_pf->excludes(opt_ph);
    embed->add_option("--bits,-b", embed_bits, "payload bits per element")
        ->check(CLI::Range(1, 8));
    embed->add_option("--strategy", embed_strategy, "embedding strategy")
        ->check(CLI::IsMember({"plain", "optimized"}));
    embed->add_flag("--order-preserving,!--no-order-preserving", embed_op,
                    "keep the ascending-x order (default on)");
    embed->add_option("--key", embed_key, "padding generator key");
    embed->add_option("--out,-o", embed_out, "output template file")->required();
    add_format_flag(embed, embed_common);
    embed->callback([&] {
        if (opt_pf->empty() && opt_ph->empty()) {
            throw CLI::RequiredError("--payload-file or --payload-hex");
        }
        rc = cmd_embed(embed_template_path, embed_payload_file, embed_payload_hex,
                       !opt_ph->empty(), embed_bits, embed_strategy, embed_op, embed_key,
                       embed_out, embed_common);
    });

    // extract
    auto* extract = app.add_subcommand("extract", "recover a hidden payload");
    std::string extract_template_path, extract_out;
    int extract_bits = 2;
    std::uint64_t extract_key = 0;
    CommonOpts extract_common;
    extract->add_option("template", extract_template_path, "protected template file")->required();
    extract->add_option("--bits,-b", extract_bits, "payload bits per element")
        ->check(CLI::Range(1, 8));
    extract->add_option("--key", extract_key,
                        "padding generator key (accepted for symmetry; the length "
                        "prefix makes it unnecessary)");
    extract->add_option("--out,-o", extract_out, "payload output file (default: stdout)");
    add_format_flag(extract, extract_common);
    extract->callback(
        [&] { rc = cmd_extract(extract_template_path, extract_bits, extract_out, extract_common); });

    // capacity
    auto* cap = app.add_subcommand("capacity", "report embeddable bits of a template");
    std::string cap_template_path;
    int cap_bits = 2;
    CommonOpts cap_common;
    cap->add_option("template", cap_template_path, "template file")->required();
    cap->add_option("--bits,-b", cap_bits, "payload bits per element")->check(CLI::Range(1, 8));
    add_format_flag(cap, cap_common);
    cap->callback([&] { rc = cmd_capacity(cap_template_path, cap_bits, cap_common); });

    // match
    auto* match = app.add_subcommand("match", "score two templates");
    std::string match_a, match_b;
    double match_dist_tol = 10.0, match_angle_tol = 20.0;
    CommonOpts match_common;
    match->add_option("a", match_a, "first template file")->required();
    match->add_option("b", match_b, "second template file")->required();
    match->add_option("--dist-tol", match_dist_tol, "pairing distance tolerance, pixels");
    match->add_option("--angle-tol", match_angle_tol, "pairing angle tolerance, degrees");
    add_format_flag(match, match_common);
    match->callback(
        [&] { rc = cmd_match(match_a, match_b, match_dist_tol, match_angle_tol, match_common); });

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic template");
    GenParams gen_params;
    std::string gen_out;
    CommonOpts gen_common;
    gen->add_option("--seed", gen_params.seed, "generator seed");
    gen->add_option("--width", gen_params.width, "image width, pixels");
    gen->add_option("--height", gen_params.height, "image height, pixels");
    gen->add_option("--min-minutiae", gen_params.n_min, "minimum minutiae count");
    gen->add_option("--max-minutiae", gen_params.n_max, "maximum minutiae count");
    gen->add_option("--min-spacing", gen_params.min_spacing, "minimum pairwise distance, pixels");
    gen->add_option("--out,-o", gen_out, "output template file (default: stdout, text)");
    add_format_flag(gen, gen_common);
    gen->callback([&] { rc = cmd_gen(gen_params, gen_out, gen_common); });

    // eval
    auto* eval = app.add_subcommand("eval", "run the recognition-impact evaluation");
    std::size_t eval_db_size = 10;
    GenParams eval_gen;
    eval_gen.seed = 1;
    PerturbParams eval_pert;
    eval_pert.seed = 2;
    std::vector<int> eval_bits = {0, 1, 2, 3, 4};
    std::string eval_strategy = "optimized";
    bool eval_op = true;
    std::uint64_t eval_key = 0;
    MatchParams eval_match;
    std::string eval_dir, eval_out;
    unsigned eval_threads = 0;
    eval->add_option("--db-size", eval_db_size, "number of synthetic fingers");
    eval->add_option("--seed", eval_gen.seed, "generation / payload seed");
    eval->add_option("--pert-seed", eval_pert.seed, "perturbation seed");
    eval->add_option("--bits,-b", eval_bits, "bits-per-element values (0 = baseline only)")
        ->delimiter(',')
        ->check(CLI::Range(0, 8));
    eval->add_option("--strategy", eval_strategy, "strategy or \"both\"")
        ->check(CLI::IsMember({"plain", "optimized", "both"}));
    eval->add_flag("--order-preserving,!--no-order-preserving", eval_op,
                   "keep the ascending-x order (default on)");
    eval->add_option("--key", eval_key, "padding generator key");
    eval->add_option("--width", eval_gen.width, "image width, pixels");
    eval->add_option("--height", eval_gen.height, "image height, pixels");
    eval->add_option("--min-minutiae", eval_gen.n_min, "minimum minutiae count");
    eval->add_option("--max-minutiae", eval_gen.n_max, "maximum minutiae count");
    eval->add_option("--min-spacing", eval_gen.min_spacing, "minimum pairwise distance, pixels");
    eval->add_option("--max-translation", eval_pert.max_translation, "impression shift, pixels");
    eval->add_option("--max-rotation", eval_pert.max_rotation, "impression rotation, degrees");
    eval->add_option("--jitter-xy", eval_pert.jitter_sigma_xy, "coordinate jitter sigma, pixels");
    eval->add_option("--jitter-theta", eval_pert.jitter_sigma_theta,
                     "direction jitter sigma, degrees");
    eval->add_option("--drop-rate", eval_pert.drop_rate, "per-minutia drop probability");
    eval->add_option("--add-rate", eval_pert.add_rate, "spurious minutia rate");
    eval->add_option("--dist-tol", eval_match.dist_tol, "pairing distance tolerance, pixels");
    eval->add_option("--angle-tol", eval_match.angle_tol, "pairing angle tolerance, degrees");
    eval->add_option("--templates-dir", eval_dir,
                     "directory of <finger>_<impression>.mnt templates (replaces synthesis)");
    eval->add_option("--threads", eval_threads, "worker threads (0 = auto)");
    eval->add_option("--out,-o", eval_out, "CSV output file (default: stdout)");
    eval->callback([&] {
        rc = cmd_eval(eval_db_size, eval_gen, eval_pert, eval_bits, eval_strategy, eval_op,
                      eval_key, eval_match, eval_dir, eval_threads, eval_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const minsteg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const minsteg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
