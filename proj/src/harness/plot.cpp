#include "rsac/harness/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace rsac::harness {

std::vector<PlotSeries> plot_series(const std::vector<EvalReport>& reports) {
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::vector<double>>> values;
  for (const auto& report : reports) {
    for (const auto& r : report.rows) {
      if (!values.contains(r.algo)) order.push_back(r.algo);
      values[r.algo][r.multiplier].push_back(r.ret);
    }
  }
  std::vector<PlotSeries> out;
  for (const auto& label : order) {
    PlotSeries s;
    s.label = label;
    for (const auto& [x, v] : values[label]) {
      double mean = 0.0;
      for (double r : v) mean += r;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double r : v) ss += (r - mean) * (r - mean);
      s.x.push_back(x);
      s.mean.push_back(mean);
      s.std.push_back(v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  if (series.empty()) throw std::invalid_argument("nothing to plot");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.mean[i] - s.std[i]);
      y1 = std::max(y1, s.mean[i] + s.std[i]);
    }
  }
  if (!(x1 >= x0)) throw std::invalid_argument("series have no points");
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 == y0) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double W = 720, H = 480, L = 80, R = 160, T = 40, B = 60;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" viewBox=\"0 0 720 480\">\n";
  svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         escape(title) + "</text>\n";
  svg += "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n";
  svg += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(W - R) + "\" y2=\"" + fmt(H - B) + "\"/>\n";
  svg += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(H - B) + "\"/>\n";
  svg += "</g>\n";
  svg += "<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    svg += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(H - B + 16) + "\" text-anchor=\"middle\">" + tick(xv) +
           "</text>\n";
    svg += "<text x=\"" + fmt(L - 6) + "\" y=\"" + fmt(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) +
           "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + fmt((L + W - R) / 2) + "\" y=\"" + fmt(H - 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">length multiplier</text>\n";
  svg += "<text x=\"20\" y=\"" + fmt((T + H - B) / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 " + fmt((T + H - B) / 2) + ")\">return</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % kColors.size()];
    std::string band, line;
    for (std::size_t i = 0; i < s.x.size(); ++i) band += fmt(px(s.x[i])) + "," + fmt(py(s.mean[i] + s.std[i])) + " ";
    for (std::size_t i = s.x.size(); i-- > 0;) band += fmt(px(s.x[i])) + "," + fmt(py(s.mean[i] - s.std[i])) + " ";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) line += " ";
      line += fmt(px(s.x[i])) + "," + fmt(py(s.mean[i]));
    }
    if (!band.empty()) band.pop_back();
    svg += "<g class=\"series\" data-label=\"" + escape(s.label) + "\">\n";
    svg += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    svg += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    const double ly = T + 16 + 20.0 * static_cast<double>(k);
    svg += "<line x1=\"" + fmt(W - R + 16) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(W - R + 40) + "\" y2=\"" +
           fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(W - R + 46) + "\" y=\"" + fmt(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(s.label) + "</text>\n";
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::vector<std::filesystem::path>& csvs, const std::filesystem::path& out,
               const std::string& title) {
  if (csvs.empty()) throw std::invalid_argument("plot needs at least one evaluation CSV");
  std::vector<EvalReport> reports;
  for (const auto& p : csvs) reports.push_back(read_eval_csv(p));
  const auto svg = render_svg(plot_series(reports), title);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out.string());
  f << svg;
}

}  // namespace rsac::harness
