#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace homogeig::cli {
namespace {

constexpr double kWidth = 960;
constexpr double kHeight = 440;
constexpr double kPanel = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 50, kBottom = 60;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                               "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
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

// Log-log axes inside one panel.
struct Axes {
  double x0, lx0, lx1, ly0, ly1;

  double px(double v) const { return x0 + kLeft + (std::log10(v) - lx0) / (lx1 - lx0) * (kPanel - kLeft - kRight); }
  double py(double v) const {
    return kTop + (1.0 - (std::log10(v) - ly0) / (ly1 - ly0)) * (kHeight - kTop - kBottom);
  }
};

Axes make_axes(double x0, double xmin, double xmax, double ymin, double ymax) {
  auto span = [](double lo, double hi, double& a, double& b) {
    a = std::floor(std::log10(lo));
    b = std::ceil(std::log10(hi));
    if (b <= a) b = a + 1;
  };
  Axes ax{x0, 0, 1, 0, 1};
  span(xmin, xmax, ax.lx0, ax.lx1);
  span(ymin, ymax, ax.ly0, ax.ly1);
  return ax;
}

void frame(std::ostringstream& o, const Axes& ax, const std::string& title, const std::string& xlabel,
           const std::string& ylabel) {
  const double l = ax.x0 + kLeft, r = ax.x0 + kPanel - kRight, t = kTop, b = kHeight - kBottom;
  o << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l) << "\" height=\"" << num(b - t)
    << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (int d = static_cast<int>(ax.lx0); d <= static_cast<int>(ax.lx1); ++d) {
    const double x = ax.px(std::pow(10.0, d));
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(b) << "\" x2=\"" << num(x) << "\" y2=\"" << num(b + 5)
      << "\" stroke=\"#000\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << num(b + 18) << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(ax.ly0); d <= static_cast<int>(ax.ly1); ++d) {
    const double y = ax.py(std::pow(10.0, d));
    o << "<line x1=\"" << num(l - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(l) << "\" y2=\"" << num(y)
      << "\" stroke=\"#000\"/>\n";
    o << "<text x=\"" << num(l - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  o << "<text x=\"" << num((l + r) / 2) << "\" y=\"" << num(t - 12) << "\" text-anchor=\"middle\" font-weight=\"bold\">"
    << escape(title) << "</text>\n";
  o << "<text x=\"" << num((l + r) / 2) << "\" y=\"" << num(kHeight - 20) << "\" text-anchor=\"middle\">"
    << escape(xlabel) << "</text>\n";
  o << "<text x=\"" << num(ax.x0 + 16) << "\" y=\"" << num((t + b) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
    << num(ax.x0 + 16) << ' ' << num((t + b) / 2) << ")\">" << escape(ylabel) << "</text>\n";
}

void line(std::ostringstream& o, double x1, double y1, double x2, double y2, const std::string& color,
          const std::string& dash = "") {
  o << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
    << "\" stroke=\"" << color << '"';
  if (!dash.empty()) o << " stroke-dasharray=\"" << dash << '"';
  o << "/>\n";
}

void error_panel(std::ostringstream& o, const BcRates& br) {
  double xmin = INFINITY, xmax = 0, ymin = INFINITY, ymax = 0;
  for (const auto& c : br.cells)
    for (std::size_t i = 0; i < c.eps.size(); ++i) {
      if (!(c.errors[i] > 0.0)) continue;
      xmin = std::min(xmin, c.eps[i]);
      xmax = std::max(xmax, c.eps[i]);
      ymin = std::min(ymin, c.errors[i]);
      ymax = std::max(ymax, c.errors[i]);
    }
  if (!(xmax > 0.0)) {
    xmin = ymin = 0.1;
    xmax = ymax = 1.0;
  }
  const Axes ax = make_axes(0, xmin, xmax, ymin, ymax);
  frame(o, ax, br.bc.label() + ": |lambda_k^eps - lambda_k|", "eps", "error");
  std::size_t idx = 0;
  for (const auto& c : br.cells) {
    const std::string color = kColors[idx++ % std::size(kColors)];
    for (std::size_t i = 0; i < c.eps.size(); ++i) {
      if (!(c.errors[i] > 0.0)) continue;
      o << "<circle cx=\"" << num(ax.px(c.eps[i])) << "\" cy=\"" << num(ax.py(c.errors[i])) << "\" r=\"3.5\" ";
      if (c.unresolved[i])
        o << "fill=\"none\" stroke=\"" << color << "\"/>\n";
      else
        o << "fill=\"" << color << "\"/>\n";
    }
    if (c.status == kStatusOk && c.constant > 0.0) {
      const double e0 = c.eps.front(), e1 = c.eps.back();
      line(o, ax.px(e0), ax.py(c.constant * std::pow(e0, c.slope)), ax.px(e1), ax.py(c.constant * std::pow(e1, c.slope)),
           color);
    }
    const double ly = kTop + 14 + 16 * static_cast<double>(idx - 1);
    o << "<text x=\"" << num(kLeft + 10) << "\" y=\"" << num(ly) << "\" fill=\"" << color << "\">k=" << c.k << ' ';
    if (c.status == kStatusOk)
      o << "s=" << sci(c.slope) << " R2=" << sci(c.r2);
    else
      o << escape(c.status);
    o << "</text>\n";
  }
}

void growth_panel(std::ostringstream& o, const RateReport& rep, const BcRates& br) {
  const GrowthFit& g = br.lambda_growth;
  std::vector<double> ks, vals;
  for (std::size_t i = 0; i < g.ks.size() && i < g.values.size(); ++i)
    if (g.values[i] > 0.0) {
      ks.push_back(g.ks[i]);
      vals.push_back(g.values[i]);
    }
  double xmin = 1, xmax = 10, ymin = 0.1, ymax = 1;
  if (!ks.empty()) {
    xmin = *std::min_element(ks.begin(), ks.end());
    xmax = std::max(*std::max_element(ks.begin(), ks.end()), xmin * 1.0001);
    ymin = *std::min_element(vals.begin(), vals.end());
    ymax = std::max(*std::max_element(vals.begin(), vals.end()), ymin * 1.0001);
  }
  const Axes ax = make_axes(kPanel, xmin, xmax, ymin, ymax);
  frame(o, ax, br.bc.label() + ": lambda_k (averaged)", "k", "lambda_k");
  for (std::size_t i = 0; i < ks.size(); ++i)
    o << "<circle cx=\"" << num(ax.px(ks[i])) << "\" cy=\"" << num(ax.py(vals[i])) << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
  if (!ks.empty() && g.status == kStatusOk) {
    auto fit = [&](double k) { return std::exp(g.intercept) * std::pow(k, g.exponent); };
    line(o, ax.px(xmin), ax.py(fit(xmin)), ax.px(xmax), ax.py(fit(xmax)), "#1f77b4");
    // Reference slope through the first point.
    auto ref = [&](double k) { return vals.front() * std::pow(k / ks.front(), g.reference); };
    line(o, ax.px(xmin), ax.py(ref(xmin)), ax.px(xmax), ax.py(ref(xmax)), "#555", "6 4");
  }
  const double lx = kPanel + kLeft + 10;
  o << "<text x=\"" << num(lx) << "\" y=\"" << num(kTop + 14) << "\" fill=\"#1f77b4\">fit exponent "
    << (g.status == kStatusOk ? sci(g.exponent) : escape(g.status)) << "</text>\n";
  o << "<text x=\"" << num(lx) << "\" y=\"" << num(kTop + 30) << "\" fill=\"#555\">reference "
    << (br.bc.kind == BcKind::Steklov ? "(p-1)/(N-1)" : "p/N") << " = " << sci(g.reference) << " (p=" << sci(rep.p)
    << ", N=" << rep.dimension << ")</text>\n";
}

}  // namespace

std::string rate_plot_svg(const RateReport& report, const BcRates& rates) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
    << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<title>" << escape(report.family_id + " " + rates.bc.label()) << "</title>\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  error_panel(o, rates);
  growth_panel(o, report, rates);
  o << "</svg>\n";
  return o.str();
}

}  // namespace homogeig::cli
