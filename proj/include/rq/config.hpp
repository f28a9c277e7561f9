#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rq/embedding.hpp"
#include "rq/kernels.hpp"
#include "rq/measures.hpp"
#include "rq/samplers.hpp"

namespace rq {

// All validation problems of a config file, each prefixed with the JSON
// pointer of the offending field.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> errors;
};

struct PotentialSpec {
  enum class Kind { Quadratic, Equilibrated };
  Kind kind = Kind::Quadratic;
  double coeff = 1.0;        // quadratic: V(x) = coeff |x|^2 / 2
  EmbeddingConfig embedding; // equilibrated
};

struct ExperimentSection {
  std::string type;  // crystallize | energy-decay | variance | multimodal | concentration | sample | embed
  std::vector<int> n_grid;
  int replicates = 5;
  int reference_length = 10000;
  double baseline_proposal_std = 0.22360679774997896;  // variance 0.05 I_d
  std::vector<TemperatureSchedule> schedules;
  std::vector<double> r_grid;        // concentration; empty -> calibrate r from the first schedule
  std::vector<int> snapshots;        // multimodal
  std::vector<std::string> variants; // multimodal: cold | warm | annealed
  std::string integrand = "kernel_at_origin";
};

struct RunConfig {
  KernelSpec kernel;
  TargetMeasure target;
  GibbsRunConfig gibbs;
  PotentialSpec potential;
  ExperimentSection experiment;
  std::string output_dir;
  std::uint64_t seed = 0;

  // Canonical form: sorted keys, every effective value materialized. Parsing
  // the canonical form yields the same canonical form back.
  nlohmann::json canonical() const;
  std::string canonical_text() const;
  std::string config_hash() const;  // 16 hex chars, digest of canonical_text()
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& doc);

std::string beta_schedule_to_string(const TemperatureSchedule& schedule);

}  // namespace rq
