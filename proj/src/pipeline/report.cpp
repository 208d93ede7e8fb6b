#include "graspforge/pipeline/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "graspforge/core/digest.hpp"
#include "graspforge/core/error.hpp"

namespace graspforge::pipeline {

using nlohmann::json;

Histogram make_histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    long b = std::isnan(v) ? 0 : static_cast<long>(std::floor((v - lo) / width));
    b = std::clamp<long>(b, 0, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

json to_json(const Histogram& h) {
  json edges = json::array();
  for (std::size_t i = 0; i <= h.counts.size(); ++i)
    edges.push_back(h.lo + (h.hi - h.lo) * static_cast<double>(i) / static_cast<double>(h.counts.size()));
  return json{{"edges", edges}, {"counts", h.counts}};
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

constexpr double kWidth = 480, kHeight = 320, kLeft = 50, kRight = 20, kTop = 36, kBottom = 44;

void frame(std::ostringstream& s, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
    << kHeight - kBottom << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
    << "\" stroke=\"black\"/>\n";
}

}  // namespace

std::string histogram_svg(const Histogram& h, const std::string& title, const std::string& x_label) {
  std::ostringstream s;
  frame(s, title);
  const std::size_t peak = std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double bar_w = plot_w / static_cast<double>(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double bh = plot_h * static_cast<double>(h.counts[i]) / static_cast<double>(peak);
    s << "<rect x=\"" << fmt(kLeft + bar_w * i + 1) << "\" y=\"" << fmt(kHeight - kBottom - bh) << "\" width=\""
      << fmt(bar_w - 2) << "\" height=\"" << fmt(bh) << "\" fill=\"#4a78b0\"/>\n";
    if (h.counts[i] > 0)
      s << "<text x=\"" << fmt(kLeft + bar_w * (i + 0.5)) << "\" y=\"" << fmt(kHeight - kBottom - bh - 3)
        << "\" text-anchor=\"middle\">" << h.counts[i] << "</text>\n";
  }
  s << "<text x=\"" << kLeft << "\" y=\"" << kHeight - kBottom + 14 << "\" text-anchor=\"middle\">" << fmt(h.lo)
    << "</text>\n"
    << "<text x=\"" << kWidth - kRight << "\" y=\"" << kHeight - kBottom + 14 << "\" text-anchor=\"middle\">"
    << fmt(h.hi) << "</text>\n"
    << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n"
    << "</svg>\n";
  return s.str();
}

std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& shade,
                        const std::string& title) {
  if (x.size() != y.size() || x.size() != shade.size()) throw DimensionError("scatter_svg: ragged inputs");
  std::ostringstream s;
  frame(s, title);
  if (!x.empty()) {
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    const double xs = *xmax > *xmin ? *xmax - *xmin : 1.0, ys = *ymax > *ymin ? *ymax - *ymin : 1.0;
    const double plot_w = kWidth - kLeft - kRight - 10, plot_h = kHeight - kTop - kBottom - 10;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = std::clamp(shade[i], 0.0, 1.0);
      const int r = static_cast<int>(230 - 200 * t), g = static_cast<int>(230 - 130 * t),
                b = static_cast<int>(120 + 60 * t);
      s << "<circle cx=\"" << fmt(kLeft + 5 + plot_w * (x[i] - *xmin) / xs) << "\" cy=\""
        << fmt(kHeight - kBottom - 5 - plot_h * (y[i] - *ymin) / ys) << "\" r=\"3.5\" fill=\"rgb(" << r << ',' << g
        << ',' << b << ")\" stroke=\"#333\" stroke-width=\"0.4\"/>\n";
    }
  }
  s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\">PC 1 (darker = higher graspness)</text>\n"
    << "<text x=\"14\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" transform=\"rotate(-90 14 "
    << (kTop + kHeight - kBottom) / 2 << ")\" text-anchor=\"middle\">PC 2</text>\n"
    << "</svg>\n";
  return s.str();
}

std::vector<double> oracle_rarity(const std::vector<std::vector<double>>& features, std::size_t k,
                                  double distance_floor) {
  const std::size_t n = features.size();
  if (k == 0 || k >= n) throw ConfigError("oracle rarity needs 0 < k < n");
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < features[i].size(); ++c) {
        const double d = features[i][c] - features[j][c];
        s += d * d;
      }
      dist[i][j] = std::sqrt(s);
    }
  std::vector<std::vector<std::size_t>> nbrs(n);
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) all.emplace_back(dist[i][j], j);
    std::sort(all.begin(), all.end());
    double total = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      nbrs[i].push_back(all[r].second);
      total += std::max(all[r].first, distance_floor);
    }
    density[i] = static_cast<double>(k) / total;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto j : nbrs[i]) s += density[j] / density[i];
    out[i] = s / static_cast<double>(k);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + " is not valid JSON: " + e.what());
  }
}

json to_json(const RunReport& r) {
  return json{{"command", r.command},         {"wall_seconds", r.wall_seconds}, {"inputs", r.inputs},
              {"outputs", r.outputs},         {"warnings", r.warnings},         {"summary", r.summary}};
}

void add_output(RunReport& r, const std::filesystem::path& out, const std::filesystem::path& path) {
  r.outputs[path.lexically_relative(out).generic_string()] = sha256_file(path);
}

}  // namespace graspforge::pipeline
