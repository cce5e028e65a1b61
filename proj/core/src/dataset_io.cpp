#include "urank/dataset_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "urank/errors.hpp"

namespace urank {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

DataFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return DataFormat::Csv;
  if (ext == ".json") return DataFormat::Json;
  throw InvalidArgument("cannot infer dataset format from extension '" + ext + "'");
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (const auto& s : data) {
    for (double v : s.x) out << format_double(v) << ',';
    out << format_double(s.y) << '\n';
  }
}

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: missing header row");
  const auto header = split_fields(trim(line));
  if (header.size() < 2) throw ParseError("csv: header needs at least one feature column and 'y'");
  if (trim(header.back()) != "y") throw ParseError("csv: last header column must be 'y'");
  const std::size_t dim = header.size() - 1;

  std::vector<LabeledSample> samples;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_fields(body);
    if (fields.size() != dim + 1) {
      throw ParseError("csv row " + std::to_string(row) + ": expected " + std::to_string(dim + 1) +
                       " fields, got " + std::to_string(fields.size()) + " (dimension mismatch)");
    }
    LabeledSample s;
    s.x.reserve(dim);
    try {
      for (std::size_t j = 0; j < dim; ++j) s.x.push_back(parse_double(fields[j]));
      s.y = parse_double(fields[dim]);
    } catch (const ParseError& e) {
      throw ParseError("csv row " + std::to_string(row) + ": " + e.what());
    }
    samples.push_back(std::move(s));
  }
  return Dataset(dim, std::move(samples));
}

nlohmann::json dataset_to_json(const Dataset& data) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : data) samples.push_back({{"x", s.x}, {"y", s.y}});
  return {{"d", data.dim()}, {"samples", std::move(samples)}};
}

Dataset dataset_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("d") || !j.contains("samples")) {
      throw ParseError("json dataset: expected object with keys 'd' and 'samples'");
    }
    const auto dim = j.at("d").get<std::size_t>();
    std::vector<LabeledSample> samples;
    for (const auto& row : j.at("samples")) {
      LabeledSample s;
      if (!row.at("x").is_array()) throw ParseError("json dataset: 'x' must be an array");
      for (const auto& v : row.at("x")) {
        if (!v.is_number()) throw ParseError("json dataset: non-numeric feature");
        s.x.push_back(v.get<double>());
      }
      if (!row.at("y").is_number()) throw ParseError("json dataset: non-numeric label");
      s.y = row.at("y").get<double>();
      samples.push_back(std::move(s));
    }
    return Dataset(dim, std::move(samples));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json dataset: ") + e.what());
  }
}

void save_dataset(const Dataset& data, const std::filesystem::path& path, DataFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  if (format == DataFormat::Csv) {
    write_csv(out, data);
  } else {
    out << dataset_to_json(data).dump(2) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  if (format == DataFormat::Csv) return read_csv(in);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("json dataset: ") + e.what());
  }
  return dataset_from_json(j);
}

}  // namespace urank
