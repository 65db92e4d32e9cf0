#include "minsteg/template_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>

#include "minsteg/errors.hpp"

namespace minsteg {

namespace {

constexpr std::string_view kHeader = "index,x,y,theta";
constexpr char kMagic[4] = {'M', 'N', 'T', '1'};

std::uint64_t parse_field(std::string_view field, std::size_t line_no, const char* name) {
    std::uint64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed " + name + " field");
    }
    return value;
}

std::uint16_t check_coord(std::uint64_t v, std::size_t line_no, const char* name) {
    if (v > 0xFFFF) {
        throw RangeError("line " + std::to_string(line_no) + ": " + name +
                         " does not fit in 16 bits");
    }
    return static_cast<std::uint16_t>(v);
}

std::uint16_t check_theta(std::uint64_t v, const std::string& where) {
    if (v >= 360) {
        throw RangeError(where + ": theta " + std::to_string(v) + " out of range [0, 359]");
    }
    return static_cast<std::uint16_t>(v);
}

std::string slurp(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed to read input stream");
    return ss.str();
}

}  // namespace

void validate_template(const MinutiaeTemplate& t) {
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        if (t.points[i].theta >= 360) {
            throw RangeError("point " + std::to_string(i + 1) + ": theta " +
                             std::to_string(t.points[i].theta) + " out of range [0, 359]");
        }
        if (i > 0 && t.points[i].x < t.points[i - 1].x) {
            throw OrderError("point " + std::to_string(i + 1) +
                             ": x-coordinates not in ascending order");
        }
    }
}

MinutiaeTemplate parse_text(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            std::string_view line = text.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines.push_back(line);
            start = i + 1;
        }
    }
    // A trailing newline produces one empty tail entry; drop it.
    if (!lines.empty() && lines.back().empty()) lines.pop_back();

    if (lines.empty() || lines[0] != kHeader) {
        throw ParseError("line 1: expected header \"" + std::string(kHeader) + "\"");
    }

    MinutiaeTemplate t;
    t.points.reserve(lines.size() - 1);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        std::string_view line = lines[li];

        std::string_view fields[4];
        std::size_t field_count = 0;
        std::size_t pos = 0;
        while (field_count < 4) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string_view::npos) {
                fields[field_count++] = line.substr(pos);
                pos = line.size();
                break;
            }
            fields[field_count++] = line.substr(pos, comma - pos);
            pos = comma + 1;
        }
        if (field_count != 4 || pos != line.size()) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 4 comma-separated fields");
        }

        const std::uint64_t index = parse_field(fields[0], line_no, "index");
        if (index != li) {
            throw ParseError("line " + std::to_string(line_no) + ": expected index " +
                             std::to_string(li) + ", got " + std::to_string(index));
        }
        MinutiaPoint p;
        p.x = check_coord(parse_field(fields[1], line_no, "x"), line_no, "x");
        p.y = check_coord(parse_field(fields[2], line_no, "y"), line_no, "y");
        p.theta = check_theta(parse_field(fields[3], line_no, "theta"),
                              "line " + std::to_string(line_no));
        if (!t.points.empty() && p.x < t.points.back().x) {
            throw OrderError("line " + std::to_string(line_no) +
                             ": x-coordinates not in ascending order");
        }
        t.points.push_back(p);
    }
    return t;
}

MinutiaeTemplate parse_text(std::istream& in) { return parse_text(std::string_view(slurp(in))); }

std::string serialize_text(const MinutiaeTemplate& t) {
    validate_template(t);
    std::string out(kHeader);
    out += '\n';
    char buf[64];
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        const MinutiaPoint& p = t.points[i];
        const int n = std::snprintf(buf, sizeof buf, "%zu,%u,%u,%u\n", i + 1,
                                    static_cast<unsigned>(p.x), static_cast<unsigned>(p.y),
                                    static_cast<unsigned>(p.theta));
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

MinutiaeTemplate parse_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 6) throw ParseError("binary template truncated before header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw ParseError("bad magic: expected \"MNT1\"");
    }
    const std::size_t count = (static_cast<std::size_t>(bytes[4]) << 8) | bytes[5];
    const std::size_t expected = 6 + count * 6;
    if (bytes.size() < expected) {
        throw ParseError("binary template truncated: header promises " + std::to_string(count) +
                         " points");
    }
    if (bytes.size() > expected) {
        throw ParseError("count mismatch: " + std::to_string(bytes.size() - expected) +
                         " trailing bytes after " + std::to_string(count) + " points");
    }

    MinutiaeTemplate t;
    t.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t* rec = bytes.data() + 6 + i * 6;
        MinutiaPoint p;
        p.x = static_cast<std::uint16_t>((rec[0] << 8) | rec[1]);
        p.y = static_cast<std::uint16_t>((rec[2] << 8) | rec[3]);
        p.theta = check_theta(static_cast<std::uint64_t>((rec[4] << 8) | rec[5]),
                              "point " + std::to_string(i + 1));
        if (!t.points.empty() && p.x < t.points.back().x) {
            throw OrderError("point " + std::to_string(i + 1) +
                             ": x-coordinates not in ascending order");
        }
        t.points.push_back(p);
    }
    return t;
}

MinutiaeTemplate parse_binary(std::istream& in) {
    const std::string data = slurp(in);
    return parse_binary(
        std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::vector<std::uint8_t> serialize_binary(const MinutiaeTemplate& t) {
    validate_template(t);
    if (t.points.size() > 0xFFFF) {
        throw RangeError("too many points for the binary format: " +
                         std::to_string(t.points.size()));
    }
    std::vector<std::uint8_t> out;
    out.reserve(6 + t.points.size() * 6);
    out.insert(out.end(), kMagic, kMagic + 4);
    auto push_u16 = [&out](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    };
    push_u16(static_cast<std::uint16_t>(t.points.size()));
    for (const MinutiaPoint& p : t.points) {
        push_u16(p.x);
        push_u16(p.y);
        push_u16(p.theta);
    }
    return out;
}

TemplateFormat infer_format(std::string_view path) {
    return path.ends_with(".mntb") ? TemplateFormat::binary : TemplateFormat::text;
}

MinutiaeTemplate read_template_file(const std::string& path,
                                    std::optional<TemplateFormat> format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed while reading " + path);
    const std::string data = ss.str();
    const TemplateFormat fmt = format.value_or(infer_format(path));
    if (fmt == TemplateFormat::binary) {
        return parse_binary(
            std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
    }
    return parse_text(std::string_view(data));
}

void write_template_file(const std::string& path, const MinutiaeTemplate& t,
                         std::optional<TemplateFormat> format) {
    const TemplateFormat fmt = format.value_or(infer_format(path));
    std::string data;
    if (fmt == TemplateFormat::binary) {
        const std::vector<std::uint8_t> bytes = serialize_binary(t);
        data.assign(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    } else {
        data = serialize_text(t);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace minsteg
