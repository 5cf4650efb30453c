#include "crf/cli/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "crf/core/types.hpp"

namespace crf::cli {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp + " to " + path + ": " + ec.message());
}

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, bool log_y) {
  const double W = 640, H = 400, L = 80, R = 20, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ymap = [log_y](double y) { return log_y ? std::log10(y) : y; };
  auto usable = [log_y](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0); };
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (!usable(x, y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, ymap(y));
      y1 = std::max(y1, ymap(y));
    }
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
    << W << ' ' << H << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << esc(title) << "</text>\n";
  if (!(x0 <= x1)) {
    o << "<text x=\"" << W / 2 << "\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no finite data</text>\n</svg>\n";
    return o.str();
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5 * std::max(1.0, std::abs(y0));
    y1 += 0.5 * std::max(1.0, std::abs(y1));
  }
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return T + (1.0 - (ymap(y) - y0) / (y1 - y0)) * ph; };
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4, fy = y0 + (y1 - y0) * k / 4;
    const double X = L + pw * k / 4, Y = T + ph * (1.0 - k / 4.0);
    o << "<text x=\"" << X << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick(fx) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << (log_y ? "1e" + tick(fy) : tick(fy)) << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << Y << "\" x2=\"" << L + pw << "\" y2=\"" << Y
      << "\" stroke=\"#ddd\"/>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << esc(xlabel) << "</text>\n";
  o << "<text transform=\"translate(16," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << esc(ylabel) << (log_y ? " (log10)" : "") << "</text>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t s = 0; s < series.size(); ++s) {
    o << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[s % 5] << "\" points=\"";
    for (auto [x, y] : series[s].points)
      if (usable(x, y)) o << px(x) << ',' << py(y) << ' ';
    o << "\"/>\n";
    o << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 + 14 * s << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
      << colors[s % 5] << "\">" << esc(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> f;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) f.push_back(c);
    return f;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

std::vector<std::string> plot_run_dir(const std::string& run_dir) {
  const CsvTable t = read_csv((fs::path(run_dir) / "frames.csv").string());
  const auto col = [&](const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw Error("frames.csv lacks column " + name);
    return static_cast<std::size_t>(it - t.header.begin());
  };
  const std::size_t ci_phase = col("phase"), ci_time = col("time");
  std::vector<std::string> phases;
  for (const auto& r : t.rows)
    if (std::find(phases.begin(), phases.end(), r[ci_phase]) == phases.end()) phases.push_back(r[ci_phase]);
  std::vector<std::string> written;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& q = t.header[c];
    if (c == ci_phase || c == ci_time || q == "step") continue;
    for (const auto& ph : phases) {
      Series s{q, {}};
      bool any = false, positive = true;
      double lo = INFINITY, hi = 0.0;
      for (const auto& r : t.rows) {
        if (r[ci_phase] != ph) continue;
        const double x = std::strtod(r[ci_time].c_str(), nullptr), y = std::strtod(r[c].c_str(), nullptr);
        s.points.emplace_back(x, y);
        if (std::isfinite(y)) {
          any = true;
          positive = positive && y > 0;
          lo = std::min(lo, std::abs(y));
          hi = std::max(hi, std::abs(y));
        }
      }
      if (!any) continue;
      const bool log_y = positive && hi > 1e3 * lo;
      const std::string file = (fs::path(run_dir) / (ph + "_" + q + ".svg")).string();
      write_atomic(file, svg_plot(q + " (" + ph + ")", ph == "normalized" ? "s" : "t", q, {s}, log_y));
      written.push_back(file);
    }
  }
  return written;
}

}  // namespace crf::cli
