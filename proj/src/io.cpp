#include "cantorlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

namespace cantorlab {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw internal("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid("cannot write " + path.string());
  out << data;
  if (!out) throw invalid("write failed for " + path.string());
}

// ---------------------------------------------------------------------------

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

Csv& Csv::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw internal("csv row width does not match the header");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string Csv::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

Csv Csv::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw invalid("empty csv");
  Csv csv(split(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != csv.header_.size()) throw invalid("csv row width does not match the header");
    csv.rows_.push_back(std::move(cells));
  }
  return csv;
}

int Csv::column(const std::string& name) const {
  auto it = std::find(header_.begin(), header_.end(), name);
  return it == header_.end() ? -1 : static_cast<int>(it - header_.begin());
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string SvgPlot::render(int width, int height) const {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (1 - (ty(v) - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4, fy = y0 + (y1 - y0) * i / 4;
    const double gx = left + pw * i / 4, gy = top + ph * (1 - i / 4.0);
    os << "<text x=\"" << gx << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
       << fmt(log_x ? std::pow(10, fx) : fx) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << fmt(log_y ? std::pow(10, fy) : fy)
       << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2
     << ")\">" << escape(y_label) << "</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % (sizeof(kColors) / sizeof(kColors[0]))];
    std::ostringstream pts;
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      if (s.points) {
        os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      } else {
        pts << px(s.x[i]) << "," << py(s.y[i]) << " ";
      }
    }
    if (!s.points) os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << pts.str() << "\"/>\n";
    os << "<text x=\"" << left + 8 << "\" y=\"" << top + 16 + 14 * k << "\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------

std::string dec(const Real& x) { return to_decimal(x); }
std::string dec(const Rational& q) { return to_string(q); }

namespace {

Json dec_array(const std::vector<Real>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(dec(x));
  return a;
}

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(dec(*v)) : Json(nullptr);
}

}  // namespace

Json to_json(const GammaTower& t) {
  Json j;
  j["variant"] = to_string(t.variant);
  if (t.spec) j["gamma_model"] = t.spec->describe();
  Json g = Json::array();
  for (size_t k = 1; k < t.gamma.size(); ++k) g.push_back(to_string(t.gamma[k]));
  j["gamma"] = g;
  j["s_max"] = t.s_max;
  j["precision"] = t.precision;
  Json stages = Json::array();
  for (const auto& st : t.stages) stages.push_back(dec_array(st.coeffs));
  j["stages"] = stages;
  return j;
}

Json to_json(const IntervalUnion& k) {
  Json j;
  j["precision"] = k.precision;
  Json iv = Json::array();
  for (const auto& [l, r] : k.intervals) iv.push_back(Json::array({dec(l), dec(r)}));
  j["intervals"] = iv;
  return j;
}

Json to_json(const ExtremalReport& r) {
  Json j;
  j["degree"] = r.degree;
  j["norm"] = dec(r.norm);
  j["monomial"] = dec_array(r.monomial);
  j["chebyshev_basis"] = dec_array(r.chebyshev);
  Json eq = Json::array();
  for (const auto& e : r.equioscillation) eq.push_back(Json{{"x", dec(e.x)}, {"sign", e.sign}});
  j["equioscillation"] = eq;
  j["alternation"] = r.alternation;
  j["grid_density"] = r.grid_density;
  j["grid_size"] = r.grid_size;
  j["iterations"] = r.iterations;
  j["refinement_change"] = dec(r.refinement_change);
  j["certified"] = r.certified;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const SpacingReport& r) {
  Json j;
  j["n"] = r.n;
  j["s"] = r.s;
  j["u_n"] = dec(r.u_n);
  j["general_lower"] = opt(r.general_lower);
  j["general_upper"] = opt(r.general_upper);
  j["c"] = r.c ? Json(to_string(*r.c)) : Json(nullptr);
  j["c_lower"] = opt(r.c_lower);
  j["c_upper"] = opt(r.c_upper);
  j["ok"] = r.ok;
  j["verdict"] = r.verdict;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ModulusReport& r) {
  Json j;
  j["alpha_fit"] = dec(r.alpha_fit);
  j["alpha_min_fit"] = dec(r.alpha_min_fit);
  j["C1_fit"] = dec(r.c1_fit);
  j["C2_fit"] = dec(r.c2_fit);
  j["residual"] = dec(r.residual);
  j["geometry_level"] = r.geometry_level;
  j["warnings"] = r.warnings;
  return j;
}

Csv jacobi_csv(const JacobiData& j) {
  Csv csv({"n", "a_n", "b_n", "trusted"});
  for (int n = 1; n <= j.size(); ++n) {
    const size_t i = static_cast<size_t>(n - 1);
    csv.row({std::to_string(n), i < j.a.size() ? dec(j.a[i]) : "", dec(j.b[i]), n <= j.trusted_n ? "1" : "0"});
  }
  return csv;
}

Csv widom2_csv(const WidomHilbertSeries& w) {
  Csv csv({"n", "W2_n", "W2_n_root"});
  for (size_t i = 0; i < w.w2.size(); ++i) csv.row({std::to_string(i + 1), dec(w.w2[i]), dec(w.root[i])});
  return csv;
}

Csv widom_csv(const WidomSeries& w) {
  Csv csv({"n", "W_n", "certified"});
  for (const auto& r : w.rows) csv.row({std::to_string(r.n), dec(r.w), r.certified ? "1" : "0"});
  return csv;
}

Csv markov_csv(const std::vector<MarkovReport>& rows) {
  Csv csv({"n", "lower", "upper", "ratio_to_2_over_delta"});
  for (const auto& r : rows) csv.row({std::to_string(r.n), dec(r.lower), dec(r.upper), r.ratio ? dec(*r.ratio) : ""});
  return csv;
}

Csv modulus_csv(const ModulusReport& r) {
  Csv csv({"delta", "value_min", "value_max", "ratio", "samples", "skipped"});
  for (const auto& row : r.rows)
    csv.row({dec(row.delta), dec(row.omega_min), dec(row.omega_max), dec(row.ratio), std::to_string(row.samples),
             row.skipped ? "1" : "0"});
  return csv;
}

Csv pw_csv(const PwReport& r) {
  Csv csv({"level", "critical_points", "value_min", "value_max", "partial_sum"});
  for (const auto& l : r.levels)
    csv.row({std::to_string(l.level), std::to_string(l.critical_points), dec(l.value_min), dec(l.value_max), dec(l.partial_sum)});
  return csv;
}

Csv hset_csv(const HReport& r) {
  Csv csv({"s", "min_len", "max_len", "delta_s", "mass", "ratio_min", "ratio_max"});
  for (const auto& l : r.levels)
    csv.row({std::to_string(l.s), dec(l.min_length), dec(l.max_length), dec(l.delta), dec(l.mass), dec(l.ratio_min),
             dec(l.ratio_max)});
  return csv;
}

Csv measure_csv(const DiscreteMeasure& mu) {
  Csv csv({"node", "weight"});
  for (size_t i = 0; i < mu.size(); ++i) csv.row({dec(mu.nodes[i]), dec(mu.weights[i])});
  return csv;
}

}  // namespace cantorlab
