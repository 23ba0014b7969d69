#include "dyadic/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include "dyadic/error.hpp"

namespace dyadic::svg {

namespace {

const char* kUserColor = "#1f77b4";
const char* kAiColor = "#d62728";
const char* kFieldColor = "#2ca02c";
const char* kSimColor = "#9467bd";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
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

std::pair<double, double> range_of(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

}  // namespace

Scale Scale::fit(double lo, double hi, double p0, double p1, double pad_fraction) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = (hi - lo) * pad_fraction;
  return Scale{lo - pad, hi + pad, p0, p1};
}

Plot::Plot(std::string title, std::string x_label, std::string y_label, Scale x, Scale y,
           int width, int height)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      x_(x),
      y_(y),
      width_(width),
      height_(height) {
  x_.p0 = kLeft;
  x_.p1 = width_ - kRight;
  y_.p0 = height_ - kBottom;
  y_.p1 = kTop;
}

void Plot::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                    double width, bool dashed, double opacity) {
  if (pts.empty()) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"";
  if (dashed) body_ += " stroke-dasharray=\"4 3\"";
  if (opacity < 1.0) body_ += " stroke-opacity=\"" + num(opacity) + "\"";
  body_ += " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ += ' ';
    body_ += num(x_(pts[i].first)) + "," + num(y_(pts[i].second));
  }
  body_ += "\"/>\n";
}

void Plot::circle(double x, double y, double r, const std::string& color, double opacity) {
  body_ += "<circle cx=\"" + num(x_(x)) + "\" cy=\"" + num(y_(y)) + "\" r=\"" + num(r) +
           "\" fill=\"" + color + "\"";
  if (opacity < 1.0) body_ += " fill-opacity=\"" + num(opacity) + "\"";
  body_ += "/>\n";
}

void Plot::box(double xc, double hw, double q1, double median, double q3, double lo, double hi,
               const std::string& color) {
  const double left = x_(xc - hw), right = x_(xc + hw), mid = x_(xc);
  body_ += "<g class=\"box\">\n";
  body_ += "<rect x=\"" + num(left) + "\" y=\"" + num(y_(q3)) + "\" width=\"" + num(right - left) +
           "\" height=\"" + num(y_(q1) - y_(q3)) + "\" fill=\"" + color +
           "\" fill-opacity=\"0.35\" stroke=\"" + color + "\"/>\n";
  body_ += "<line x1=\"" + num(left) + "\" y1=\"" + num(y_(median)) + "\" x2=\"" + num(right) +
           "\" y2=\"" + num(y_(median)) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  body_ += "<line x1=\"" + num(mid) + "\" y1=\"" + num(y_(q3)) + "\" x2=\"" + num(mid) + "\" y2=\"" +
           num(y_(hi)) + "\" stroke=\"" + color + "\"/>\n";
  body_ += "<line x1=\"" + num(mid) + "\" y1=\"" + num(y_(q1)) + "\" x2=\"" + num(mid) + "\" y2=\"" +
           num(y_(lo)) + "\" stroke=\"" + color + "\"/>\n";
  body_ += "</g>\n";
}

void Plot::legend(const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = kTop + 10;
  for (const auto& [label, color] : entries) {
    const double x = width_ - kRight - 150;
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 8) +
             "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    body_ += "<text x=\"" + num(x + 16) + "\" y=\"" + num(y + 1) + "\" font-size=\"11\">" +
             escape(label) + "</text>\n";
    y += 16;
  }
}

void Plot::x_category_labels(const std::vector<std::pair<double, std::string>>& labels) {
  categorical_x_ = true;
  for (const auto& [x, label] : labels) {
    body_ += "<text x=\"" + num(x_(x)) + "\" y=\"" + num(height_ - kBottom + 16) +
             "\" font-size=\"11\" text-anchor=\"middle\">" + escape(label) + "</text>\n";
  }
}

std::string Plot::str() const {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) +
       "\" height=\"" + std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) +
       " " + std::to_string(height_) + "\" font-family=\"sans-serif\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(width_ / 2.0) + "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" +
       escape(title_) + "</text>\n";
  const double bottom = height_ - kBottom, right = width_ - kRight;
  s += "<g class=\"axes\" stroke=\"black\">\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(right) + "\" y2=\"" +
       num(bottom) + "\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(bottom) + "\"/>\n";
  s += "</g>\n<g class=\"ticks\" font-size=\"10\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double yv = y_.d0 + (y_.d1 - y_.d0) * k / 4.0;
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y_(yv) + 3) + "\" text-anchor=\"end\">" +
         tick_label(yv) + "</text>\n";
    if (!categorical_x_) {
      const double xv = x_.d0 + (x_.d1 - x_.d0) * k / 4.0;
      s += "<text x=\"" + num(x_(xv)) + "\" y=\"" + num(bottom + 14) +
           "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
    }
  }
  s += "</g>\n";
  s += "<text x=\"" + num((kLeft + right) / 2) + "\" y=\"" + num(height_ - 12.0) +
       "\" font-size=\"12\" text-anchor=\"middle\">" + escape(x_label_) + "</text>\n";
  s += "<text x=\"14\" y=\"" + num((kTop + bottom) / 2) +
       "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       num((kTop + bottom) / 2) + ")\">" + escape(y_label_) + "</text>\n";
  s += "<g class=\"data\">\n" + body_ + "</g>\n</svg>\n";
  return s;
}

std::array<double, 5> five_numbers(std::vector<double> v) {
  if (v.empty()) throw Error(Errc::EmptyTable, "no values to summarize");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

std::string valence_trajectories(const std::vector<StoryValences>& stories) {
  std::vector<double> ys;
  double max_i = 0;
  for (const auto& s : stories) {
    ys.insert(ys.end(), s.user.begin(), s.user.end());
    ys.insert(ys.end(), s.ai.begin(), s.ai.end());
    max_i = std::max(max_i, static_cast<double>(s.user.size()) - 1);
  }
  if (ys.empty()) throw Error(Errc::EmptyTable, "no valences to plot");
  auto [lo, hi] = range_of(ys);
  Plot plot("Valence per interaction", "interaction", "valence", Scale::fit(0, max_i, 0, 1),
            Scale::fit(lo, hi, 0, 1));
  const double opacity = stories.size() > 10 ? 0.4 : 0.9;
  for (const auto& s : stories) {
    std::vector<std::pair<double, double>> u, a;
    for (std::size_t i = 0; i < s.user.size(); ++i) u.emplace_back(i, s.user[i]);
    for (std::size_t i = 0; i < s.ai.size(); ++i) a.emplace_back(i, s.ai[i]);
    plot.polyline(u, kUserColor, 1.0, false, opacity);
    plot.polyline(a, kAiColor, 1.0, true, opacity);
  }
  plot.legend({{"user", kUserColor}, {"AI", kAiColor}});
  return plot.str();
}

std::string alignment_boxes(const std::vector<AlignmentResult>& results) {
  if (results.empty()) throw Error(Errc::EmptyTable, "no alignment results to plot");
  std::map<std::pair<int, int>, std::vector<double>> cells;
  std::vector<double> all;
  for (const auto& r : results) {
    cells[{static_cast<int>(r.dataset), static_cast<int>(r.direction)}].push_back(r.fisher_z);
    all.push_back(r.fisher_z);
  }
  auto [lo, hi] = range_of(all);
  Plot plot("Alignment by condition", "condition", "Fisher z",
            Scale::fit(0.5, static_cast<double>(cells.size()) + 0.5, 0, 1, 0.0),
            Scale::fit(lo, hi, 0, 1));
  std::vector<std::pair<double, std::string>> labels;
  double x = 1;
  for (const auto& [key, zs] : cells) {
    const auto f = five_numbers(zs);
    const auto dataset = static_cast<Dataset>(key.first);
    plot.box(x, 0.3, f[1], f[2], f[3], f[0], f[4],
             dataset == Dataset::Field ? kFieldColor : kSimColor);
    labels.emplace_back(x, std::string(to_string(dataset)) + " " +
                               std::string(to_string(static_cast<Direction>(key.second))));
    x += 1;
  }
  plot.x_category_labels(labels);
  return plot.str();
}

std::string stage_lines(const std::vector<StageProfile>& profiles) {
  if (profiles.empty()) throw Error(Errc::EmptyTable, "no stage profiles to plot");
  std::vector<double> ys;
  for (const auto& p : profiles) ys.insert(ys.end(), {p.g1, p.g2, p.g3});
  auto [lo, hi] = range_of(ys);
  Plot plot("Valence gap by stage", "stage", "user - AI valence", Scale::fit(1, 3, 0, 1),
            Scale::fit(lo, hi, 0, 1));
  const double opacity = profiles.size() > 20 ? 0.35 : 0.9;
  for (const auto& p : profiles) {
    plot.polyline({{1, p.g1}, {2, p.g2}, {3, p.g3}},
                  p.volume == Volume::Long ? kUserColor : kAiColor, 1.0, false, opacity);
  }
  plot.x_category_labels({{1, "early"}, {2, "middle"}, {3, "late"}});
  plot.legend({{"long sessions", kUserColor}, {"short sessions", kAiColor}});
  return plot.str();
}

std::string exploration_scatter(const std::vector<BinRow>& rows,
                                const std::optional<ExplorationFit>& fit) {
  if (rows.empty()) throw Error(Errc::EmptyTable, "no exploration rows to plot");
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    xs.push_back(r.bin_size);
    ys.push_back(r.log_distance);
  }
  auto [xlo, xhi] = range_of(xs);
  auto [ylo, yhi] = range_of(ys);
  Plot plot("Centroid distance by bin size", "bin size", "log distance",
            Scale::fit(xlo, xhi, 0, 1), Scale::fit(ylo, yhi, 0, 1));
  const double opacity = rows.size() > 500 ? 0.25 : 0.6;
  for (const auto& r : rows) {
    plot.circle(r.bin_size, r.log_distance, 2.0,
                r.dataset == Dataset::Field ? kFieldColor : kSimColor, opacity);
  }
  if (fit) {
    const auto b = fit->model.estimates();
    plot.polyline({{xlo, b(0) + b(1) * xlo}, {xhi, b(0) + b(1) * xhi}}, kSimColor, 2.5);
    plot.polyline({{xlo, b(0) + b(2) + (b(1) + b(3)) * xlo}, {xhi, b(0) + b(2) + (b(1) + b(3)) * xhi}},
                  kFieldColor, 2.5);
  }
  plot.legend({{"field", kFieldColor}, {"simulated", kSimColor}});
  return plot.str();
}

std::string resonance_scatter(const std::vector<SurprisalRecord>& records,
                              const std::optional<ResonanceFit>& fit) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    if (r.boundary_excluded || !r.novelty_bits || !r.resonance_bits) continue;
    xs.push_back(*r.novelty_bits);
    ys.push_back(*r.resonance_bits);
  }
  if (xs.empty()) throw Error(Errc::EmptyTable, "no surprisal records to plot");
  auto [xlo, xhi] = range_of(xs);
  auto [ylo, yhi] = range_of(ys);
  Plot plot("Resonance against novelty", "novelty (bits)", "resonance (bits)",
            Scale::fit(xlo, xhi, 0, 1), Scale::fit(ylo, yhi, 0, 1));
  const double opacity = xs.size() > 500 ? 0.25 : 0.6;
  for (const auto& r : records) {
    if (r.boundary_excluded || !r.novelty_bits || !r.resonance_bits) continue;
    plot.circle(*r.novelty_bits, *r.resonance_bits, 2.0,
                r.agent == Agent::User ? kUserColor : kAiColor, opacity);
  }
  if (fit) {
    const auto b = fit->model.estimates();
    plot.polyline({{xlo, b(0) + b(1) * xlo}, {xhi, b(0) + b(1) * xhi}}, kUserColor, 2.5);
    plot.polyline({{xlo, b(0) + b(2) + (b(1) + b(3)) * xlo}, {xhi, b(0) + b(2) + (b(1) + b(3)) * xhi}},
                  kAiColor, 2.5);
  }
  plot.legend({{"user", kUserColor}, {"AI", kAiColor}});
  return plot.str();
}

}  // namespace dyadic::svg
