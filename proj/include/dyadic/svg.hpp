#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/alignment.hpp"
#include "dyadic/exploration.hpp"
#include "dyadic/infodynamics.hpp"

namespace dyadic::svg {

// Linear map from a data interval onto a pixel interval. A degenerate data
// interval is widened by 1 on each side.
struct Scale {
  double d0 = 0, d1 = 1;
  double p0 = 0, p1 = 1;

  static Scale fit(double lo, double hi, double p0, double p1, double pad_fraction = 0.05);
  double operator()(double v) const { return p0 + (v - d0) / (d1 - d0) * (p1 - p0); }
};

// Plot area with axes, ticks and labels; elements are appended in call order.
class Plot {
 public:
  Plot(std::string title, std::string x_label, std::string y_label, Scale x, Scale y,
       int width = 640, int height = 420);

  static constexpr double kLeft = 64, kRight = 16, kTop = 36, kBottom = 52;

  const Scale& x() const { return x_; }
  const Scale& y() const { return y_; }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width = 1.0, bool dashed = false, double opacity = 1.0);
  void circle(double x, double y, double r, const std::string& color, double opacity = 1.0);
  void box(double x_center, double half_width, double q1, double median, double q3, double lo,
           double hi, const std::string& color);
  void legend(const std::vector<std::pair<std::string, std::string>>& entries);  // (label, color)
  void x_category_labels(const std::vector<std::pair<double, std::string>>& labels);

  std::string str() const;

 private:
  std::string title_, x_label_, y_label_;
  Scale x_, y_;
  int width_, height_;
  bool categorical_x_ = false;
  std::string body_;
};

// Per-story user and AI valence against interaction index.
std::string valence_trajectories(const std::vector<StoryValences>& stories);

// One box of Fisher z per (dataset, direction) present in the results.
std::string alignment_boxes(const std::vector<AlignmentResult>& results);

// g1, g2, g3 per session, LONG and SHORT sessions in different colours.
std::string stage_lines(const std::vector<StageProfile>& profiles);

// log distance against bin size per dataset with the fitted simple slopes.
std::string exploration_scatter(const std::vector<BinRow>& rows,
                                const std::optional<ExplorationFit>& fit);

// Resonance against novelty per agent with the fitted simple slopes.
std::string resonance_scatter(const std::vector<SurprisalRecord>& records,
                              const std::optional<ResonanceFit>& fit);

// Five-number summary used by the box plot: (min, q1, median, q3, max),
// quartiles by linear interpolation between order statistics.
std::array<double, 5> five_numbers(std::vector<double> values);

}  // namespace dyadic::svg
