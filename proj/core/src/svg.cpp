#include "scribe/svg.hpp"

#include "scribe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace scribe::svg {

namespace {

std::string number(double v, bool integer) {
  char buf[32];
  if (integer) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", v);
  }
  return buf;
}

std::string fill_for(double t) {
  // White to deep blue.
  const int r = static_cast<int>(std::lround(255 - t * (255 - 8)));
  const int g = static_cast<int>(std::lround(255 - t * (255 - 48)));
  const int b = static_cast<int>(std::lround(255 - t * (255 - 107)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

} // namespace

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

std::string heatmap(const Grid& g) {
  const auto rows = g.row_labels.size();
  const auto cols = g.col_labels.size();
  if (g.values.size() != rows * cols) {
    throw ValidationError("heatmap values do not match the label counts");
  }
  const int cell = cols > 12 ? 28 : 56;
  const int left = 140;
  const int top = 70;
  const int width = left + static_cast<int>(cols) * cell + 20;
  const int height = top + static_cast<int>(rows) * cell + 20;
  double max = 0.0;
  for (double v : g.values) {
    max = std::max(max, v);
  }

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"10\" y=\"20\" font-size=\"14\">" << escape(g.title) << "</text>\n";
  for (std::size_t j = 0; j < cols; ++j) {
    out << "<text x=\"" << left + static_cast<int>(j) * cell + cell / 2 << "\" y=\"" << top - 8
        << "\" text-anchor=\"middle\">" << escape(g.col_labels[j]) << "</text>\n";
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const int y = top + static_cast<int>(i) * cell;
    out << "<text x=\"" << left - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
        << escape(g.row_labels[i]) << "</text>\n";
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = g.values[i * cols + j];
      const double t = max > 0.0 ? v / max : 0.0;
      const int x = left + static_cast<int>(j) * cell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << fill_for(t) << "\" stroke=\"#999\"/>";
      if (cell >= 40) {
        out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\" fill=\""
            << (t > 0.5 ? "#fff" : "#000") << "\">" << number(v, g.integer_cells) << "</text>";
      }
      out << '\n';
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string line_plot(const std::string& title, std::span<const Series> series, const std::string& x_label,
                      const std::string& y_label) {
  const int width = 520;
  const int height = 320;
  const int left = 60;
  const int right = 20;
  const int top = 40;
  const int bottom = 50;
  std::size_t n = 1;
  double max = 0.0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      max = std::max(max, v);
    }
  }
  if (max <= 0.0) {
    max = 1.0;
  }
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](std::size_t i) { return left + (n == 1 ? pw / 2 : pw * static_cast<double>(i) / static_cast<double>(n - 1)); };
  auto py = [&](double v) { return top + ph * (1.0 - v / max); };

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream out;
  out.precision(5);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"10\" y=\"20\" font-size=\"14\">" << escape(title) << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"#000\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"#000\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"14\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 14 " << top + ph / 2
      << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << max << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << top + ph << "\" text-anchor=\"end\">0</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto* color = kColors[k % std::size(kColors)];
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out << (i ? " " : "") << px(i) << ',' << py(s.values[i]);
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out << "<circle cx=\"" << px(i) << "\" cy=\"" << py(s.values[i]) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << left + pw - 4 << "\" y=\"" << top + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
        << color << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

} // namespace scribe::svg
