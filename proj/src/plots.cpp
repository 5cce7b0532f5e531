#include "tdagait/plots.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tdagait/descriptors.hpp"

namespace tdagait {
namespace {

constexpr double kPanel = 320.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string svg_open(double width, double height) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
     << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 int size = 12) {
  std::ostringstream os;
  os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\""
     << size << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
  return os.str();
}

// Maps [lo, hi] onto a panel axis; degenerate ranges collapse to the start.
struct Axis {
  double lo, hi, start, length;
  double operator()(double v) const {
    return hi > lo ? start + (v - lo) / (hi - lo) * length : start;
  }
};

std::string frame(double x0, double y0, const std::string& title) {
  std::ostringstream os;
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(kPanel)
     << "\" height=\"" << num(kPanel) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << text(x0 + kPanel / 2, y0 - 10, title);
  return os.str();
}

}  // namespace

std::string confusion_svg(const EvaluationReport& report) {
  const Group pos = report.task.positive;
  const Group neg = report.task.negative;
  const auto& cm = report.confusion;
  const std::size_t counts[2][2] = {{cm.tp, cm.fn}, {cm.fp, cm.tn}};
  const std::size_t max_count = std::max({cm.tp, cm.fn, cm.fp, cm.tn, std::size_t{1}});
  const double cell = 120.0;
  const double x0 = 110.0;
  const double y0 = 60.0;
  std::ostringstream os;
  os << svg_open(x0 + 2 * cell + 40, y0 + 2 * cell + 60);
  os << text(x0 + cell, 30, "Predicted label");
  const Group labels[2] = {pos, neg};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double shade = static_cast<double>(counts[r][c]) / static_cast<double>(max_count);
      const int level = static_cast<int>(std::lround(255.0 - 200.0 * shade));
      os << "<rect class=\"cell\" data-row=\"" << to_string(labels[r]) << "\" data-col=\""
         << to_string(labels[c]) << "\" data-count=\"" << counts[r][c] << "\" x=\""
         << num(x0 + c * cell) << "\" y=\"" << num(y0 + r * cell) << "\" width=\"" << num(cell)
         << "\" height=\"" << num(cell) << "\" fill=\"rgb(" << level << ',' << level
         << ",255)\" stroke=\"black\"/>\n";
      os << text(x0 + c * cell + cell / 2, y0 + r * cell + cell / 2 + 8,
                 std::to_string(counts[r][c]), "middle", 24);
    }
    os << text(x0 + r * cell + cell / 2, y0 + 2 * cell + 20, std::string(to_string(labels[r])));
    os << text(x0 - 10, y0 + r * cell + cell / 2, std::string(to_string(labels[r])), "end");
  }
  os << text(30, y0 + cell, "True", "middle");
  os << "</svg>\n";
  return os.str();
}

std::string diagram_scatter_svg(const std::vector<LabelledDiagram>& diagrams, Group positive,
                                Group negative) {
  double hi = 0.0;
  for (const auto& d : diagrams) {
    for (const auto& p : d.diagram.pairs) hi = std::max(hi, std::isinf(p.death) ? p.birth : p.death);
  }
  const double width = 2 * kPanel + 3 * kMargin;
  const double height = kPanel + 2 * kMargin + 30;
  std::ostringstream os;
  os << svg_open(width, height);
  for (int degree = 0; degree < 2; ++degree) {
    const double x0 = kMargin + degree * (kPanel + kMargin);
    const double y0 = kMargin;
    os << frame(x0, y0, "H" + std::to_string(degree) + " persistence diagram");
    const Axis ax{0.0, hi, x0, kPanel};
    const Axis ay{0.0, hi, y0 + kPanel, -kPanel};
    os << "<line x1=\"" << num(ax(0)) << "\" y1=\"" << num(ay(0)) << "\" x2=\"" << num(ax(hi))
       << "\" y2=\"" << num(ay(hi)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (const auto& d : diagrams) {
      const bool is_pos = d.group == positive;
      if (!is_pos && d.group != negative) continue;
      for (const auto& p : d.diagram.pairs) {
        if (p.degree != degree || std::isinf(p.death)) continue;
        const double x = ax(p.birth);
        const double y = ay(p.death);
        if (is_pos) {
          os << "<circle class=\"marker-" << to_string(d.group) << "\" cx=\"" << num(x)
             << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"none\" stroke=\"#1f77b4\"/>\n";
        } else {
          os << "<rect class=\"marker-" << to_string(d.group) << "\" x=\"" << num(x - 3)
             << "\" y=\"" << num(y - 3) << "\" width=\"6\" height=\"6\" fill=\"none\" "
             << "stroke=\"#d62728\"/>\n";
        }
      }
    }
    os << text(x0 + kPanel / 2, y0 + kPanel + 30, "birth");
  }
  os << text(kMargin, height - 8, "o " + std::string(to_string(positive)) + "   [] " +
                                      std::string(to_string(negative)),
             "start");
  os << "</svg>\n";
  return os.str();
}

std::string betti_overlay_svg(const std::vector<LabelledDiagram>& diagrams, Group positive,
                              Group negative, std::size_t nbins) {
  std::vector<PersistenceDiagram> all;
  for (const auto& d : diagrams) all.push_back(d.diagram);
  const double width = 2 * kPanel + 3 * kMargin;
  const double height = kPanel + 2 * kMargin + 30;
  std::ostringstream os;
  os << svg_open(width, height);
  for (int degree = 0; degree < 2; ++degree) {
    const SamplingGrid grid = fit_grid(all, degree, nbins);
    std::vector<double> mean_pos(nbins, 0.0), mean_neg(nbins, 0.0);
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& d : diagrams) {
      const auto curve = betti_curve(d.diagram, grid);
      auto& target = d.group == positive ? mean_pos : mean_neg;
      if (d.group != positive && d.group != negative) continue;
      (d.group == positive ? n_pos : n_neg)++;
      for (std::size_t i = 0; i < nbins; ++i) target[i] += curve[i];
    }
    for (auto& v : mean_pos) v /= static_cast<double>(std::max<std::size_t>(1, n_pos));
    for (auto& v : mean_neg) v /= static_cast<double>(std::max<std::size_t>(1, n_neg));
    double top = 1.0;
    for (std::size_t i = 0; i < nbins; ++i) top = std::max({top, mean_pos[i], mean_neg[i]});

    const double x0 = kMargin + degree * (kPanel + kMargin);
    const double y0 = kMargin;
    os << frame(x0, y0, "H" + std::to_string(degree) + " mean Betti curve");
    const Axis ax{0.0, static_cast<double>(std::max<std::size_t>(1, nbins - 1)), x0, kPanel};
    const Axis ay{0.0, top, y0 + kPanel, -kPanel};
    const auto polyline = [&](const std::vector<double>& ys, Group g, const char* color) {
      os << "<polyline class=\"curve-" << to_string(g) << "\" data-degree=\"" << degree
         << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < ys.size(); ++i) {
        os << (i ? " " : "") << num(ax(static_cast<double>(i))) << ',' << num(ay(ys[i]));
      }
      os << "\"/>\n";
    };
    polyline(mean_pos, positive, "#1f77b4");
    polyline(mean_neg, negative, "#d62728");
    os << text(x0 + kPanel / 2, y0 + kPanel + 30,
               grid.empty ? std::string("no pairs")
                          : "t in [" + num(grid.t_min) + ", " + num(grid.t_max) + "]");
  }
  os << text(kMargin, height - 8, "blue " + std::string(to_string(positive)) + "   red " +
                                      std::string(to_string(negative)),
             "start");
  os << "</svg>\n";
  return os.str();
}

}  // namespace tdagait
