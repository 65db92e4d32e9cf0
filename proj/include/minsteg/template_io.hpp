#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minsteg/minutiae.hpp"

namespace minsteg {

// Text format: UTF-8, LF line endings, header line `index,x,y,theta`,
// then one line per minutia `i,x,y,theta` with a 1-based contiguous index.
//
// Binary format: magic "MNT1", then a 16-bit big-endian point count, then
// one (x, y, theta) record per point, each field a 16-bit big-endian
// unsigned integer.

enum class TemplateFormat { text, binary };

// Throws RangeError for theta >= 360 and OrderError when the ascending-x
// invariant is violated.
void validate_template(const MinutiaeTemplate& t);

MinutiaeTemplate parse_text(std::string_view text);
MinutiaeTemplate parse_text(std::istream& in);
std::string serialize_text(const MinutiaeTemplate& t);

MinutiaeTemplate parse_binary(std::span<const std::uint8_t> bytes);
MinutiaeTemplate parse_binary(std::istream& in);
std::vector<std::uint8_t> serialize_binary(const MinutiaeTemplate& t);

// ".mntb" selects the binary format, everything else the text format.
TemplateFormat infer_format(std::string_view path);

MinutiaeTemplate read_template_file(const std::string& path,
                                    std::optional<TemplateFormat> format = std::nullopt);
void write_template_file(const std::string& path, const MinutiaeTemplate& t,
                         std::optional<TemplateFormat> format = std::nullopt);

}  // namespace minsteg
