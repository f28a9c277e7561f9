#include "rq/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rq::csv {

namespace {

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw std::runtime_error("csv: cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("csv: write failed: " + path);
}

std::vector<std::vector<double>> read_table(const std::string& path,
                                            std::vector<std::string>* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (header) *header = split_line(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      std::size_t pos = 0;
      row.push_back(std::stod(f, &pos));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_points(const std::string& path, const ParticleConfig& points) {
  std::vector<std::string> header;
  header.reserve(points.dim);
  for (int k = 1; k <= points.dim; ++k) header.push_back("x" + std::to_string(k));
  std::vector<std::vector<double>> rows(points.n);
  for (int i = 0; i < points.n; ++i) {
    const auto p = points.point(i);
    rows[i].assign(p.begin(), p.end());
  }
  write_table(path, header, rows);
}

ParticleConfig read_points(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_table(path, &header);
  if (rows.empty()) throw std::runtime_error("csv: no points in " + path);
  const int dim = static_cast<int>(rows.front().size());
  ParticleConfig config(static_cast<int>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != dim)
      throw std::runtime_error("csv: ragged rows in " + path);
    std::copy(rows[i].begin(), rows[i].end(), config.point(static_cast<int>(i)).begin());
  }
  return config;
}

}  // namespace rq::csv
