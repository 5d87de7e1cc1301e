#pragma once
// CSV and text artifact helpers with round-trip-exact number formatting.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dmuq {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_value(double v);  // shortest %.17g form that round-trips
std::string render_csv(const Csv& csv);
Csv parse_csv(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const Csv& csv);
Csv read_csv(const std::filesystem::path& path);

std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace dmuq
