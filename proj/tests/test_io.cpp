#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rq/csv.hpp"
#include "rq/svg.hpp"
#include "test_util.hpp"

using namespace rq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

// cx/cy pairs of every <circle> element, in document order
std::vector<std::pair<double, double>> circle_centers(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::size_t pos = 0;
  while ((pos = text.find("<circle", pos)) != std::string::npos) {
    const auto cx_pos = text.find("cx=\"", pos) + 4;
    const auto cy_pos = text.find("cy=\"", pos) + 4;
    out.emplace_back(std::stod(text.substr(cx_pos)), std::stod(text.substr(cy_pos)));
    ++pos;
  }
  return out;
}

}  // namespace

TEST_CASE("csv points round-trip exactly") {
  const auto dir = rqtest::scratch_dir("io_csv");
  auto x = rqtest::random_config(37, 3, 1);
  x.coords[0] = 1e-17;
  x.coords[1] = -3.0;
  x.coords[2] = 0.1 + 0.2;  // not exactly 0.3
  const auto path = dir + "/pts.csv";
  csv::write_points(path, x);
  const auto y = csv::read_points(path);
  CHECK(y.n == x.n);
  CHECK(y.dim == x.dim);
  CHECK(y.coords == x.coords);

  const auto text = slurp(path);
  CHECK(text.substr(0, 9) == "x1,x2,x3\n");
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("csv rejects garbage") {
  const auto dir = rqtest::scratch_dir("io_csv_bad");
  CHECK_THROWS(csv::read_points(dir + "/absent.csv"));
  {
    std::ofstream out(dir + "/empty.csv");
  }
  CHECK_THROWS(csv::read_points(dir + "/empty.csv"));
}

TEST_CASE("pointcloud svg has one circle per point") {
  const auto dir = rqtest::scratch_dir("io_svg");
  ParticleConfig pts(3, 2);
  pts.coords = {0.0, 0.0, 1.0, 0.5, -0.5, 2.0};
  const auto path = dir + "/cloud.svg";
  svg::emit_pointcloud(path, pts);
  const auto text = slurp(path);
  CHECK(count_occurrences(text, "<circle") == 3);
}

TEST_CASE("log-log series of n^-1 renders collinear points") {
  const auto dir = rqtest::scratch_dir("io_svg_series");
  svg::Series s;
  s.name = "decay";
  for (double n : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    s.x.push_back(n);
    s.y.push_back(1.0 / n);
  }
  const auto path = dir + "/series.svg";
  svg::emit_series(path, {s}, svg::Axes::LogLog);
  const auto centers = circle_centers(slurp(path));
  REQUIRE(centers.size() == 5);
  // fit the line through the first and last markers; middle ones must sit on it
  const auto [x0, y0] = centers.front();
  const auto [x1, y1] = centers.back();
  const double slope = (y1 - y0) / (x1 - x0);
  for (const auto& [cx, cy] : centers) {
    const double expected = y0 + slope * (cx - x0);
    CHECK(std::abs(cy - expected) < 1.0);  // within one pixel
  }
}

TEST_CASE("empty series is a structured error and writes nothing") {
  const auto dir = rqtest::scratch_dir("io_svg_empty");
  const auto path = dir + "/never.svg";
  CHECK_THROWS_AS(svg::emit_series(path, {}, svg::Axes::Linear), std::invalid_argument);
  svg::Series s;
  s.name = "empty";
  CHECK_THROWS_AS(svg::emit_series(path, {s}, svg::Axes::Linear), std::invalid_argument);
  // log-log with nonpositive data is rejected too
  s.x = {1.0, 2.0};
  s.y = {0.0, 1.0};
  CHECK_THROWS_AS(svg::emit_series(path, {s}, svg::Axes::LogLog), std::invalid_argument);
  CHECK(!fs::exists(path));

  ParticleConfig pts(1, 1);
  CHECK_THROWS_AS(svg::emit_pointcloud(dir + "/never2.svg", pts), std::invalid_argument);
  CHECK(!fs::exists(dir + "/never2.svg"));
}
