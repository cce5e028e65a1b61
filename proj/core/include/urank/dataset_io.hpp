#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "urank/dataset.hpp"

namespace urank {

enum class DataFormat { Csv, Json };

/// Format from the file extension (.csv / .json); throws InvalidArgument otherwise.
DataFormat format_from_path(const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Strict full-string parse of a double; throws ParseError.
double parse_double(std::string_view text);

// CSV: header "x1,...,xd,y", one row per sample, label last.
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in);

// JSON: {"d": int, "samples": [{"x": [...], "y": num}, ...]}
nlohmann::json dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const nlohmann::json& j);

void save_dataset(const Dataset& data, const std::filesystem::path& path, DataFormat format);
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);

inline void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  save_dataset(data, path, format_from_path(path));
}
inline Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_from_path(path));
}

}  // namespace urank
