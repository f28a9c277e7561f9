#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rq/config.hpp"
#include "rq/embedding.hpp"
#include "rq/particles.hpp"

namespace rq {

inline constexpr const char* kVersionTag = "rq-0.1.0";

// One grid cell of an experiment: (n, method, replicate) plus its own RNG
// sub-seed and the statistics it produced. `stats` holds only deterministic
// values; wall-clock time is kept apart so the deterministic artifacts stay
// byte-stable across reruns.
struct ReportCell {
  int n = 0;
  std::string method;
  int replicate = 0;
  std::uint64_t sub_seed = 0;
  nlohmann::json stats;
  double runtime_s = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kVersionTag;
  std::vector<ReportCell> cells;
  nlohmann::json summary;

  nlohmann::json to_json() const;          // deterministic, no runtimes
  nlohmann::json timings_json() const;     // wall-clock sidecar
  void write(const std::string& run_dir) const;  // report.json + timings.json
};

// Embedding estimates and reference node sets are shared between experiments
// through the output root: they are persisted as CSV and keyed by a digest of
// everything that determines their content (target, kernel, M, proposal std,
// derived sub-seed).
std::shared_ptr<const EmbeddingEstimate> load_or_compute_embedding(const RunConfig& cfg,
                                                                   const std::string& out_root);
std::string embedding_file_path(const RunConfig& cfg, const std::string& out_root);

struct ReferenceSet {
  ParticleConfig nodes;
  double self_energy = 0.0;  // I_K of the reference empirical measure
};
ReferenceSet load_or_compute_reference(const RunConfig& cfg, const std::string& out_root);

// Equilibrated potential for a run config (loads/stores the shared embedding
// file). Throws if the config asks for a quadratic potential.
Potential build_potential(const RunConfig& cfg, const std::string& out_root,
                          std::shared_ptr<const EmbeddingEstimate>* out_embedding = nullptr);

// Nearest-center assignment counts against the mixture components.
std::vector<int> mode_occupancy(const ParticleConfig& points, const TargetMeasure& target);

// The experiment drivers. Each writes its artifacts (CSV, SVG, report.json,
// timings.json) under run_dir and shares embeddings/references under
// out_root. Grid cells run in parallel with per-cell RNG sub-seeds.
ExperimentReport run_energy_decay(const RunConfig& cfg, const std::string& out_root,
                                  const std::string& run_dir);
ExperimentReport run_variance_comparison(const RunConfig& cfg, const std::string& out_root,
                                         const std::string& run_dir);
ExperimentReport run_crystallization(const RunConfig& cfg, const std::string& out_root,
                                     const std::string& run_dir);
ExperimentReport run_concentration_tail(const RunConfig& cfg, const std::string& out_root,
                                        const std::string& run_dir);
ExperimentReport run_multimodal(const RunConfig& cfg, const std::string& out_root,
                                const std::string& run_dir);

}  // namespace rq
