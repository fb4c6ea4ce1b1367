#include "idrl/plot.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

namespace idrl {

namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kMargin = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

const MetricSummary& pick(const SummaryRow& r, PlotMetric m) {
  switch (m) {
    case PlotMetric::mse: return r.mse;
    case PlotMetric::cosine: return r.cosine;
    default: return r.regret;
  }
}

const char* label(PlotMetric m) {
  switch (m) {
    case PlotMetric::mse: return "MSE";
    case PlotMetric::cosine: return "cosine similarity";
    default: return "regret";
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string learning_curves_svg(const std::vector<SummaryRow>& rows, PlotMetric metric) {
  std::map<std::string, std::map<std::string, std::vector<const SummaryRow*>>> panels;
  std::vector<std::string> acquisitions;
  for (const auto& r : rows) {
    panels[r.env][r.acquisition].push_back(&r);
    if (std::find(acquisitions.begin(), acquisitions.end(), r.acquisition) == acquisitions.end())
      acquisitions.push_back(r.acquisition);
  }
  std::sort(acquisitions.begin(), acquisitions.end());
  const int n_panels = std::max<int>(1, static_cast<int>(panels.size()));
  const double width = n_panels * (kPanelW + kMargin) + kMargin;
  const double height = kPanelH + 2.5 * kMargin;

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  int panel = 0;
  for (auto& [env, curves] : panels) {
    const double x0 = kMargin + panel * (kPanelW + kMargin);
    const double y0 = kMargin;
    int max_it = 1;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (auto& [acq, pts] : curves) {
      std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->iteration < b->iteration; });
      for (const auto* p : pts) {
        const auto& s = pick(*p, metric);
        max_it = std::max(max_it, p->iteration);
        if (first) {
          lo = s.mean - s.standard_error;
          hi = s.mean + s.standard_error;
          first = false;
        }
        lo = std::min(lo, s.mean - s.standard_error);
        hi = std::max(hi, s.mean + s.standard_error);
      }
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    auto px = [&](double it) { return x0 + kPanelW * it / max_it; };
    auto py = [&](double v) { return y0 + kPanelH * (1.0 - (v - lo) / (hi - lo)); };

    svg << "<g>\n<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << kPanelW << "\" height=\"" << kPanelH
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << x0 + kPanelW / 2 << "\" y=\"" << y0 - 12 << "\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(env) << "</text>\n";
    svg << "<text x=\"" << x0 + kPanelW / 2 << "\" y=\"" << y0 + kPanelH + 32
        << "\" text-anchor=\"middle\" font-size=\"12\">queries</text>\n";
    svg << "<text x=\"" << x0 - 8 << "\" y=\"" << y0 + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << hi
        << "</text>\n";
    svg << "<text x=\"" << x0 - 8 << "\" y=\"" << y0 + kPanelH << "\" text-anchor=\"end\" font-size=\"10\">" << lo
        << "</text>\n";
    svg << "<text x=\"" << x0 + kPanelW << "\" y=\"" << y0 + kPanelH + 16
        << "\" text-anchor=\"end\" font-size=\"10\">" << max_it << "</text>\n";
    svg << "<text transform=\"translate(" << x0 - 36 << "," << y0 + kPanelH / 2
        << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << label(metric) << "</text>\n";

    for (auto& [acq, pts] : curves) {
      const auto idx = std::find(acquisitions.begin(), acquisitions.end(), acq) - acquisitions.begin();
      const char* color = kColors[idx % 7];
      std::ostringstream band, line;
      band << std::fixed << std::setprecision(2);
      line << std::fixed << std::setprecision(2);
      for (const auto* p : pts) band << px(p->iteration) << ',' << py(pick(*p, metric).mean + pick(*p, metric).standard_error) << ' ';
      for (auto it = pts.rbegin(); it != pts.rend(); ++it)
        band << px((*it)->iteration) << ',' << py(pick(**it, metric).mean - pick(**it, metric).standard_error) << ' ';
      for (const auto* p : pts) line << px(p->iteration) << ',' << py(pick(*p, metric).mean) << ' ';
      svg << "<polygon points=\"" << band.str() << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
    }
    svg << "</g>\n";
    ++panel;
  }

  for (std::size_t i = 0; i < acquisitions.size(); ++i) {
    const double lx = kMargin + 90.0 * static_cast<double>(i);
    const double ly = height - 14.0;
    svg << "<rect x=\"" << lx << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"12\" fill=\"" << kColors[i % 7]
        << "\"/><text x=\"" << lx + 16 << "\" y=\"" << ly + 1 << "\" font-size=\"12\">" << escape(acquisitions[i])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace idrl
