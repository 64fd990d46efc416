#pragma once

#include "rominv/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rominv {

/// Plain numeric table. Text form: header line, then one line per row,
/// comma separated, '.' decimal, '\n' endings, shortest round-trip numbers.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  std::string str() const;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

/// Shortest decimal that reads back to the same double, locale independent.
std::string format_number(double v);

/// 8-bit grayscale image, rows top to bottom.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Linear map min -> 0, max -> 255 of a row-major field (row 0 on top). A
/// constant field maps to 0 everywhere.
GrayImage render_heatmap(const Vec& field, int width, int height);

/// Binary PGM (P5, maxval 255).
void write_pgm(const std::string& path, const GrayImage& image);
std::string pgm_bytes(const GrayImage& image);

void write_json(const std::string& path, const nlohmann::json& value);
nlohmann::json read_json(const std::string& path);

/// Write `text` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);

}  // namespace rominv
