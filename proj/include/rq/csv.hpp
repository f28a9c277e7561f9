#pragma once

#include <string>
#include <vector>

#include "rq/particles.hpp"

namespace rq::csv {

// Comma separated, '.' decimal point, header row, LF line endings. Doubles
// are written with %.17g so files round-trip exactly.

void write_points(const std::string& path, const ParticleConfig& points);  // header x1..xd
ParticleConfig read_points(const std::string& path);

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_table(const std::string& path,
                                            std::vector<std::string>* header = nullptr);

}  // namespace rq::csv
