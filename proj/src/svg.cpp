#include "rdet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rdet {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void open_svg(std::string& s, int w, int h, const std::string& title) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\" font-family=\"sans-serif\">\n",
                w, h, w, h);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(w / 2) + "\" y=\"22\" font-size=\"15\" "
       "text-anchor=\"middle\">" + title + "</text>\n";
}

void text_at(std::string& s, double x, double y, const std::string& t, int size,
             const char* anchor, const char* extra = "") {
  s += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
       std::to_string(size) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" + t +
       "</text>\n";
}

// White -> steel blue ramp for magnitudes in [0,1].
std::string blue_ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(255 + t * (70 - 255));
  const int g = static_cast<int>(255 + t * (130 - 255));
  const int b = static_cast<int>(255 + t * (180 - 255));
  char buf[24];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", r, g, b);
  return buf;
}

// Blue (-1) -> white (0) -> red (+1), for correlations.
std::string diverging_ramp(double v) {
  v = std::clamp(v, -1.0, 1.0);
  int r, g, b;
  if (v < 0) {
    r = static_cast<int>(255 + (-v) * (59 - 255));
    g = static_cast<int>(255 + (-v) * (76 - 255));
    b = static_cast<int>(255 + (-v) * (192 - 255));
  } else {
    r = static_cast<int>(255 + v * (180 - 255));
    g = static_cast<int>(255 + v * (4 - 255));
    b = static_cast<int>(255 + v * (38 - 255));
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", r, g, b);
  return buf;
}

}  // namespace

std::string pr_curve_svg(const PrCurve& curve, const std::string& title) {
  const int w = 480, h = 420;
  const double x0 = 60, y0 = 40, plot_w = 380, plot_h = 320;
  std::string s;
  open_svg(s, w, h, title);

  auto px = [&](double recall) { return x0 + recall * plot_w; };
  auto py = [&](double precision) { return y0 + (1.0 - precision) * plot_h; };

  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    s += "<line x1=\"" + num(px(frac)) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(px(frac)) +
         "\" y2=\"" + num(y0 + plot_h) + "\" stroke=\"#ddd\"/>\n";
    s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py(frac)) + "\" x2=\"" +
         num(x0 + plot_w) + "\" y2=\"" + num(py(frac)) + "\" stroke=\"#ddd\"/>\n";
    text_at(s, px(frac), y0 + plot_h + 16, num(frac), 10, "middle");
    text_at(s, x0 - 8, py(frac) + 4, num(frac), 10, "end");
  }
  s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(plot_w) +
       "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

  std::string pts;
  for (const PrPoint& p : curve.points) {
    if (!p.precision_defined) continue;
    if (!pts.empty()) pts.push_back(' ');
    pts += num(px(p.recall)) + "," + num(py(p.precision));
  }
  s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"steelblue\" "
       "stroke-width=\"1.5\"/>\n";
  text_at(s, x0 + plot_w / 2, h - 18, "recall", 12, "middle");
  text_at(s, 16, y0 + plot_h / 2, "precision", 12, "middle",
          " transform=\"rotate(-90 16 200)\"");
  s += "</svg>\n";
  return s;
}

std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title) {
  const int w = 420, h = 380;
  const double x0 = 110, y0 = 70, cell = 120;
  const long long cells[2][2] = {{cm.tp, cm.fn}, {cm.fp, cm.tn}};
  const long long biggest = std::max({cm.tp, cm.fn, cm.fp, cm.tn, 1ll});
  const int pos = cm.positive, neg = 1 - cm.positive;

  std::string s;
  open_svg(s, w, h, title);
  const std::string row_names[2] = {"actual " + std::to_string(pos),
                                    "actual " + std::to_string(neg)};
  const std::string col_names[2] = {"pred " + std::to_string(pos),
                                    "pred " + std::to_string(neg)};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double x = x0 + c * cell, y = y0 + r * cell;
      const double frac = static_cast<double>(cells[r][c]) / static_cast<double>(biggest);
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) +
           "\" height=\"" + num(cell) + "\" fill=\"" + blue_ramp(frac) +
           "\" stroke=\"black\"/>\n";
      text_at(s, x + cell / 2, y + cell / 2 + 5, std::to_string(cells[r][c]), 15, "middle");
    }
    text_at(s, x0 - 10, y0 + r * cell + cell / 2 + 4, row_names[r], 12, "end");
    text_at(s, x0 + r * cell + cell / 2, y0 - 10, col_names[r], 12, "middle");
  }
  s += "</svg>\n";
  return s;
}

std::string heatmap_svg(const Matrix& values, const std::vector<std::string>& names,
                        const std::string& title) {
  const int d = static_cast<int>(values.rows());
  const double cell = d > 0 ? std::min(28.0, 420.0 / d) : 28.0;
  const double x0 = 150, y0 = 170;
  const int w = static_cast<int>(x0 + d * cell + 30);
  const int h = static_cast<int>(y0 + d * cell + 30);

  std::string s;
  open_svg(s, w, h, title);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      s += "<rect x=\"" + num(x0 + j * cell) + "\" y=\"" + num(y0 + i * cell) +
           "\" width=\"" + num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" +
           diverging_ramp(values(i, j)) + "\" stroke=\"#999\" stroke-width=\"0.4\"/>\n";
    }
    text_at(s, x0 - 6, y0 + i * cell + cell / 2 + 3, names[static_cast<std::size_t>(i)], 9,
            "end");
    const double cx = x0 + i * cell + cell / 2;
    char rot[96];
    std::snprintf(rot, sizeof(rot), " transform=\"rotate(-60 %.2f %.2f)\"", cx, y0 - 6);
    text_at(s, cx, y0 - 6, names[static_cast<std::size_t>(i)], 9, "start", rot);
  }
  s += "</svg>\n";
  return s;
}

}  // namespace rdet
