#pragma once

#include <string>
#include <vector>

#include "rq/particles.hpp"

namespace rq::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

enum class Axes { Linear, LogLog };

// Scatter plot with equal-aspect axes; the first two coordinates of each
// point are drawn, one <circle> element per point.
void emit_pointcloud(const std::string& path, const ParticleConfig& points);

// Multi-series line chart with circle markers. LogLog requires strictly
// positive data. Throws std::invalid_argument on empty input before any file
// is created.
void emit_series(const std::string& path, const std::vector<Series>& series, Axes axes,
                 const std::string& x_label = "", const std::string& y_label = "");

}  // namespace rq::svg
