#include "rominv/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rominv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::add(std::vector<double> row) {
  if (row.size() != columns.size())
    throw InputError("csv row has " + std::to_string(row.size()) + " fields, header has " +
                     std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

void write_csv(const std::string& path, const CsvTable& table) { write_text(path, table.str()); }

namespace {

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError("bad csv number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty csv '" + path + "'");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split(line)) row.push_back(parse_number(f));
    t.add(std::move(row));
  }
  return t;
}

GrayImage render_heatmap(const Vec& field, int width, int height) {
  if (width <= 0 || height <= 0 || field.size() != static_cast<Eigen::Index>(width) * height)
    throw InputError("heatmap size does not match the field");
  if (!field.allFinite()) throw InputError("heatmap field has non-finite values");
  GrayImage img{width, height, std::vector<std::uint8_t>(field.size(), 0)};
  const double lo = field.minCoeff(), hi = field.maxCoeff();
  if (hi > lo) {
    for (Eigen::Index i = 0; i < field.size(); ++i)
      img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * (field[i] - lo) / (hi - lo)));
  }
  return img;
}

std::string pgm_bytes(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

void write_pgm(const std::string& path, const GrayImage& image) { write_text(path, pgm_bytes(image)); }

void write_json(const std::string& path, const nlohmann::json& value) { write_text(path, value.dump(2) + "\n"); }

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad json in '" + path + "': " + e.what());
  }
}

}  // namespace rominv
