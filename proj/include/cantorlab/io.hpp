#pragma once

// CSV, JSON and SVG writers and content hashing for run artifacts.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cantorlab/diagnostics.hpp"
#include "cantorlab/extremal.hpp"
#include "cantorlab/ortho.hpp"
#include "cantorlab/potential.hpp"

namespace cantorlab {

using Json = nlohmann::ordered_json;

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& data);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(std::vector<std::string> cells);
  std::string str() const;
  size_t rows() const { return rows_.size(); }

  /// Parses a file written by `str()` (no quoting).
  static Csv parse(const std::string& text);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& body() const { return rows_; }
  /// Column index or -1.
  int column(const std::string& name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool points = false;  // markers instead of a polyline
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<SvgSeries> series;

  std::string render(int width = 640, int height = 400) const;
};

std::string dec(const Real& x);
std::string dec(const Rational& q);

Json to_json(const GammaTower& t);
Json to_json(const IntervalUnion& k);
Json to_json(const ExtremalReport& r);
Json to_json(const SpacingReport& r);
Json to_json(const ModulusReport& r);

Csv jacobi_csv(const JacobiData& j);
Csv widom2_csv(const WidomHilbertSeries& w);
Csv widom_csv(const WidomSeries& w);
Csv markov_csv(const std::vector<MarkovReport>& rows);
Csv modulus_csv(const ModulusReport& r);
Csv pw_csv(const PwReport& r);
Csv hset_csv(const HReport& r);
Csv measure_csv(const DiscreteMeasure& mu);

}  // namespace cantorlab
