#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rq/embedding.hpp"
#include "rq/energy.hpp"
#include "rq/kernels.hpp"
#include "rq/measures.hpp"
#include "rq/particles.hpp"
#include "rq/rng.hpp"

namespace rq {

// Inverse temperature schedule beta_n; the named tags are the three schedules
// of the crystallization study, an explicit value covers everything else.
struct TemperatureSchedule {
  enum class Tag { PowThreeHalves, PowTwo, PowThree, Explicit };
  Tag tag = Tag::PowTwo;
  double explicit_value = 0.0;

  double beta_for(int n) const;
  std::string label() const;

  static TemperatureSchedule pow_three_halves() { return {Tag::PowThreeHalves, 0.0}; }
  static TemperatureSchedule pow_two() { return {Tag::PowTwo, 0.0}; }
  static TemperatureSchedule pow_three() { return {Tag::PowThree, 0.0}; }
  static TemperatureSchedule explicit_beta(double beta) { return {Tag::Explicit, beta}; }
};

struct InitSpec {
  enum class Kind { ColdGaussian, WarmFromTarget, FromFile };
  Kind kind = Kind::ColdGaussian;
  double mean = 0.0;
  double stddev = 1.0;
  std::string path;
};

struct GibbsRunConfig {
  int n = 0;
  int dim = 0;
  TemperatureSchedule temperature;
  double alpha0 = 1.0;  // step-size seed; the MALA step size is alpha0 / beta_n
  int iterations = 0;   // T
  std::uint64_t seed = 0;
  InitSpec init;
  int anneal_rungs = 0;  // 0 or 1: no annealing
  bool autotune = true;

  double beta() const { return temperature.beta_for(n); }
  void validate() const;
};

struct ChainDiagnostics {
  double acceptance_rate = 0.0;  // accepted / steps, exactly
  long accepted = 0;
  int steps = 0;
  double tuned_alpha0 = 0.0;
  long nonfinite_rejects = 0;             // proposals auto-rejected on non-finite energy
  std::vector<double> energy_trace;       // H_n at init, then after every iteration
};

struct TuningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- MALA primitives (exposed for tests; sample_gibbs drives them) ---------

// Proposal mean x - alpha * beta * grad.
std::vector<double> mala_proposal_mean(std::span<const double> x, std::span<const double> grad,
                                       double alpha, double beta);

// log N(y; mean, 2 alpha I) up to the additive constant shared by the
// forward and reverse densities.
double mala_log_q(std::span<const double> y, std::span<const double> mean, double alpha);

// log of the Metropolis-Hastings ratio for proposal y from x.
double mala_log_accept_ratio(std::span<const double> x, double h_x, std::span<const double> grad_x,
                             std::span<const double> y, double h_y, std::span<const double> grad_y,
                             double alpha, double beta);

// One MALA update targeting exp(-beta_n H_n). Recomputes the energy and
// gradient at the current state; sample_gibbs uses the cached driver below
// instead.
std::pair<ParticleConfig, bool> mala_step(const ParticleConfig& x, const GibbsRunConfig& cfg,
                                          const KernelSpec& k, const Potential& v,
                                          rng::Stream& rng);

// Chain driver carrying the (energy, gradient) cache: one fused evaluation
// per proposal.
class MalaChain {
 public:
  MalaChain(ParticleConfig init, const KernelSpec& k, const Potential& v, double alpha0,
            double beta);

  bool step(rng::Stream& rng);
  const ParticleConfig& state() const { return state_; }
  double energy() const { return eval_.energy.total; }
  long nonfinite_rejects() const { return nonfinite_rejects_; }
  void set_alpha0(double alpha0) { alpha_ = alpha0 / beta_; }

 private:
  const KernelSpec& kernel_;
  const Potential& potential_;
  double alpha_;
  double beta_;
  ParticleConfig state_;
  HamiltonianEval eval_;
  long nonfinite_rejects_ = 0;
};

// --- Step-size tuning -------------------------------------------------------

// Bracket by doubling/halving alpha0, then bisect on log(alpha0). The probe
// maps (alpha0, pilot steps) to a measured acceptance rate. A candidate is
// adopted once pilots of 200, 1000 and 2000 steps land in bands tightening
// around 50%; if the probe budget runs out, the long-pilot measurement
// closest to 50% within [0.4, 0.6] is returned. Throws TuningError with the
// full probe trace when nothing acceptable was seen in `max_rounds` pilots.
double tune_alpha0_search(double initial,
                          const std::function<double(double, int)>& acceptance_probe,
                          int max_rounds = 60);

struct TuneOutcome {
  double alpha0 = 0.0;
  ParticleConfig state;              // chain state at the end of the pilot phase
  std::vector<double> energy_trace;  // H_n across the pilot phase
};

// Production tuner: pilot chains continue from one another, so the
// adaptation doubles as burn-in. sample_gibbs starts its T productive
// iterations from the returned state.
TuneOutcome tune_alpha0_chained(const GibbsRunConfig& cfg, const KernelSpec& k, const Potential& v,
                                const ParticleConfig& init, rng::Stream& rng);

double tune_alpha0(const GibbsRunConfig& cfg, const KernelSpec& k, const Potential& v,
                   const ParticleConfig& init, rng::Stream& rng);

// --- Full runs ---------------------------------------------------------------

using SnapshotFn = std::function<void(int iteration, const ParticleConfig&)>;

// Initializes per cfg.init, tunes alpha0 (unless cfg.autotune is off), runs
// cfg.iterations MALA steps and returns only the final configuration, plus
// diagnostics. `target` is required for WarmFromTarget initialization.
// Sub-streams are derived from cfg.seed as ("init"|"tune"|"chain", rung).
std::pair<ParticleConfig, ChainDiagnostics> sample_gibbs(
    const GibbsRunConfig& cfg, const KernelSpec& k, const Potential& v,
    const TargetMeasure* target = nullptr, const std::vector<int>& snapshot_iters = {},
    const SnapshotFn& on_snapshot = nullptr);

// Baseline quadrature rule: the full length-n history of a random-walk MH
// chain targeting pi, started from an exact draw.
ParticleConfig mh_baseline_chain(const TargetMeasure& target, int n, double proposal_std,
                                 rng::Stream& rng);

// Tempering ladder t_k = k/l, k = 1..l; the last rung is pi itself.
std::vector<double> anneal_ladder(int rungs);

struct EmbeddingConfig {
  int count = 1000;           // M
  double proposal_std = 0.3;  // near the duplicate/autocorrelation optimum on unit-ball targets
};

struct AnnealedDiagnostics {
  std::vector<double> ladder;
  std::vector<ChainDiagnostics> per_rung;
  std::vector<double> energy_trace;  // concatenated over rungs
};

// Annealed run: for each rung, re-estimate the embedding of pi^{t_k}, rebuild
// the equilibrated potential, run iterations/l MALA steps, and chain final
// states as initializations. With rungs == 1 this reduces exactly to the
// plain equilibrated pipeline (same sub-streams, same output).
std::pair<ParticleConfig, AnnealedDiagnostics> sample_gibbs_annealed(
    const GibbsRunConfig& cfg, const KernelSpec& k, const TargetMeasure& target,
    const EmbeddingConfig& embed, const std::vector<int>& snapshot_iters = {},
    const SnapshotFn& on_snapshot = nullptr);

}  // namespace rq
