#include "boxplus/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "boxplus/io.hpp"

namespace boxplus {

namespace {

struct Box {
  double xmin, xmax, ymin, ymax;
};

Box data_box(const std::vector<SvgSeries>& series) {
  Box b{1e300, -1e300, 1e300, -1e300};
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      b.xmin = std::min(b.xmin, s.x[i]);
      b.xmax = std::max(b.xmax, s.x[i]);
      b.ymin = std::min(b.ymin, s.y[i]);
      b.ymax = std::max(b.ymax, s.y[i]);
    }
  if (b.xmin > b.xmax) throw std::invalid_argument("svg: empty series");
  if (b.xmax == b.xmin) b.xmax = b.xmin + 1.0;
  b.ymin = std::min(b.ymin, 0.0);
  if (b.ymax == b.ymin) b.ymax = b.ymin + 1.0;
  b.ymax += 0.05 * (b.ymax - b.ymin);
  return b;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<SvgSeries>& series, const std::string& x_label,
                    const std::string& y_label, int width, int height) {
  const Box b = data_box(series);
  const double ml = 60, mr = 15, mt = 35, mb = 45;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + pw * (x - b.xmin) / (b.xmax - b.xmin); };
  auto py = [&](double y) { return mt + ph * (1.0 - (y - b.ymin) / (b.ymax - b.ymin)); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  // axes with 5 ticks each
  out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\"/>\n</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = b.xmin + (b.xmax - b.xmin) * i / 5.0;
    const double yv = b.ymin + (b.ymax - b.ymin) * i / 5.0;
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << mt + ph + 15
        << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(py(yv) + 3)
        << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  if (!x_label.empty())
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  if (!y_label.empty())
    out << "<text x=\"14\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << mt + ph / 2 << ")\">" << y_label << "</text>\n";
  out << "</g>\n";

  for (const auto& s : series) {
    if (s.bars) {
      const double bw = s.x.size() > 1 ? px(s.x[1]) - px(s.x[0]) : 8.0;
      out << "<g fill=\"" << s.color << "\" fill-opacity=\"0.55\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double x0 = px(s.x[i]) - bw / 2, y0 = py(s.y[i]);
        out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\""
            << fmt(std::max(1.0, bw - 1.0)) << "\" height=\"" << fmt(py(b.ymin) - y0)
            << "\"/>\n";
      }
      out << "</g>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
}

void write_svg_histogram(const std::filesystem::path& path, const std::string& title,
                         const std::vector<double>& samples, int n_bins,
                         const std::vector<std::pair<double, double>>& reference_curve) {
  if (samples.empty()) throw std::invalid_argument("svg histogram: need samples");
  const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *mn_it, hi = *mx_it;
  if (hi == lo) hi = lo + 1.0;
  const double bw = (hi - lo) / n_bins;
  SvgSeries hist;
  hist.bars = true;
  hist.color = "#1f77b4";
  std::vector<double> counts(n_bins, 0.0);
  for (double s : samples) {
    int b = static_cast<int>((s - lo) / bw);
    b = std::clamp(b, 0, n_bins - 1);
    counts[b] += 1.0;
  }
  const double norm = 1.0 / (samples.size() * bw);
  for (int b = 0; b < n_bins; ++b) {
    hist.x.push_back(lo + (b + 0.5) * bw);
    hist.y.push_back(counts[b] * norm);
  }
  std::vector<SvgSeries> series{hist};
  if (!reference_curve.empty()) {
    SvgSeries ref;
    ref.color = "#d62728";
    for (const auto& [x, y] : reference_curve) {
      ref.x.push_back(x);
      ref.y.push_back(y);
    }
    series.push_back(ref);
  }
  write_svg_plot(path, title, series, "", "density");
}

}  // namespace boxplus
