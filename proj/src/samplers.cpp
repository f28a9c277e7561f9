#include "rq/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rq/csv.hpp"

namespace rq {

namespace {
constexpr int kPilotSteps = 200;
constexpr double kBandLow = 0.4;
constexpr double kBandHigh = 0.6;
}  // namespace

double TemperatureSchedule::beta_for(int n) const {
  switch (tag) {
    case Tag::PowThreeHalves: return std::pow(static_cast<double>(n), 1.5);
    case Tag::PowTwo: return static_cast<double>(n) * n;
    case Tag::PowThree: return static_cast<double>(n) * n * n;
    case Tag::Explicit: return explicit_value;
  }
  return explicit_value;
}

std::string TemperatureSchedule::label() const {
  switch (tag) {
    case Tag::PowThreeHalves: return "n^1.5";
    case Tag::PowTwo: return "n^2";
    case Tag::PowThree: return "n^3";
    case Tag::Explicit: {
      std::ostringstream os;
      os << "beta=" << explicit_value;
      return os.str();
    }
  }
  return "";
}

void GibbsRunConfig::validate() const {
  if (n < 1) throw std::invalid_argument("GibbsRunConfig: n must be >= 1");
  if (dim < 1) throw std::invalid_argument("GibbsRunConfig: dim must be >= 1");
  if (!(beta() > 0.0)) throw std::invalid_argument("GibbsRunConfig: beta must be > 0");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("GibbsRunConfig: alpha0 must be > 0");
  if (iterations < 1) throw std::invalid_argument("GibbsRunConfig: iterations must be >= 1");
  if (anneal_rungs < 0) throw std::invalid_argument("GibbsRunConfig: anneal_rungs must be >= 0");
}

std::vector<double> mala_proposal_mean(std::span<const double> x, std::span<const double> grad,
                                       double alpha, double beta) {
  std::vector<double> mean(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mean[i] = x[i] - alpha * beta * grad[i];
  return mean;
}

double mala_log_q(std::span<const double> y, std::span<const double> mean, double alpha) {
  double sq = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - mean[i];
    sq += d * d;
  }
  return -sq / (4.0 * alpha);
}

double mala_log_accept_ratio(std::span<const double> x, double h_x, std::span<const double> grad_x,
                             std::span<const double> y, double h_y, std::span<const double> grad_y,
                             double alpha, double beta) {
  const auto mean_x = mala_proposal_mean(x, grad_x, alpha, beta);
  const auto mean_y = mala_proposal_mean(y, grad_y, alpha, beta);
  const double log_q_forward = mala_log_q(y, mean_x, alpha);
  const double log_q_reverse = mala_log_q(x, mean_y, alpha);
  return -beta * (h_y - h_x) + log_q_reverse - log_q_forward;
}

MalaChain::MalaChain(ParticleConfig init, const KernelSpec& k, const Potential& v, double alpha0,
                     double beta)
    : kernel_(k),
      potential_(v),
      alpha_(alpha0 / beta),
      beta_(beta),
      state_(std::move(init)),
      eval_(hamiltonian_with_grad(state_, k, v)) {}

bool MalaChain::step(rng::Stream& rng) {
  const std::size_t nd = state_.coords.size();
  ParticleConfig proposal(state_.n, state_.dim);
  const double drift = alpha_ * beta_;
  const double noise = std::sqrt(2.0 * alpha_);
  for (std::size_t i = 0; i < nd; ++i)
    proposal.coords[i] = state_.coords[i] - drift * eval_.grad[i] + noise * rng.normal();

  HamiltonianEval prop_eval = hamiltonian_with_grad(proposal, kernel_, potential_);
  const double log_u = std::log(rng.uniform_pos());

  bool nonfinite = !std::isfinite(prop_eval.energy.total);
  if (!nonfinite)
    for (double g : prop_eval.grad)
      if (!std::isfinite(g)) {
        nonfinite = true;
        break;
      }
  if (nonfinite) {
    ++nonfinite_rejects_;
    return false;
  }

  const double log_ratio =
      mala_log_accept_ratio(state_.coords, eval_.energy.total, eval_.grad, proposal.coords,
                            prop_eval.energy.total, prop_eval.grad, alpha_, beta_);
  if (!(log_u < log_ratio)) return false;
  state_ = std::move(proposal);
  eval_ = std::move(prop_eval);
  return true;
}

std::pair<ParticleConfig, bool> mala_step(const ParticleConfig& x, const GibbsRunConfig& cfg,
                                          const KernelSpec& k, const Potential& v,
                                          rng::Stream& rng) {
  MalaChain chain(x, k, v, cfg.alpha0, cfg.beta());
  const bool accepted = chain.step(rng);
  return {chain.state(), accepted};
}

double tune_alpha0_search(double initial,
                          const std::function<double(double, int)>& acceptance_probe,
                          int max_rounds) {
  if (!(initial > 0.0)) throw std::invalid_argument("tune_alpha0: initial alpha0 must be > 0");
  std::vector<std::pair<double, double>> trace;
  int rounds = 0;
  auto probe = [&](double a, int steps) {
    const double acc = acceptance_probe(a, steps);
    trace.emplace_back(a, acc);
    ++rounds;
    return acc;
  };

  // The accept/reject sequence is strongly autocorrelated, so a candidate is
  // only adopted after a staged sequence of pilots of increasing length whose
  // bands tighten around the 50% target. A 200-step pilot alone is too noisy
  // for the tuned chain to stay inside [0.4, 0.6] over a long fresh run.
  struct Stage {
    int steps;
    double lo, hi;
  };
  const Stage stages[] = {{kPilotSteps, 0.45, 0.55},
                          {5 * kPilotSteps, 0.46, 0.54},
                          {10 * kPilotSteps, 0.47, 0.53}};

  // Track the acceptable fallback closest to 50%. Short pilots are too noisy
  // to act as evidence, so only measurements of at least 1000 steps qualify.
  double best_alpha = 0.0;
  double best_gap = 1.0;
  auto consider = [&](double a, double acc, int steps) {
    if (steps < 5 * kPilotSteps) return;
    if (acc < kBandLow || acc > kBandHigh) return;
    const double gap = std::abs(acc - 0.5);
    if (gap < best_gap) {
      best_gap = gap;
      best_alpha = a;
    }
  };

  // Acceptance decreases with the step size. Until both bracket ends are
  // seen the candidate doubles/halves; afterwards it bisects on log(alpha0).
  // lo carries step sizes that accepted too often, hi too rarely.
  double lo = 0.0, hi = 0.0;
  double a = initial;
  while (rounds < max_rounds) {
    double acc = 0.0;
    bool adopted = true;
    for (const auto& stage : stages) {
      if (rounds >= max_rounds) {
        adopted = false;
        break;
      }
      acc = probe(a, stage.steps);
      consider(a, acc, stage.steps);
      if (acc < stage.lo || acc > stage.hi) {
        adopted = false;
        break;
      }
    }
    if (adopted) return a;
    // The probe state advances between pilots and the acceptance curve moves
    // with it (cold starts at large beta), so a bracket end contradicted by
    // newer evidence is dropped rather than trusted.
    if (acc > 0.5) {
      lo = a;
      if (hi > 0.0 && hi <= lo * 1.0000001) hi = 0.0;
    } else {
      hi = a;
      if (lo > 0.0 && lo >= hi * 0.9999999) lo = 0.0;
    }
    if (lo > 0.0 && hi > 0.0)
      a = std::sqrt(lo * hi);
    else if (lo > 0.0)
      a = lo * 2.0;
    else
      a = hi * 0.5;
  }
  if (best_alpha > 0.0) return best_alpha;
  std::ostringstream os;
  os << "tune_alpha0: no alpha0 with acceptance in [" << kBandLow << ", " << kBandHigh
     << "] after " << trace.size() << " pilot rounds; trace:";
  for (const auto& [alpha, acc] : trace) os << " (" << alpha << ", " << acc << ")";
  throw TuningError(os.str());
}

TuneOutcome tune_alpha0_chained(const GibbsRunConfig& cfg, const KernelSpec& k, const Potential& v,
                                const ParticleConfig& init, rng::Stream& rng) {
  // Pilots continue the chain instead of restarting it, so the adaptation
  // doubles as burn-in and the tuned step size reflects the regime the chain
  // has actually reached rather than the initial transient.
  TuneOutcome outcome;
  MalaChain chain(init, k, v, cfg.alpha0, cfg.beta());
  outcome.energy_trace.push_back(chain.energy());
  auto probe = [&](double alpha0, int steps) {
    chain.set_alpha0(alpha0);
    long accepted = 0;
    for (int t = 0; t < steps; ++t) {
      accepted += chain.step(rng) ? 1 : 0;
      outcome.energy_trace.push_back(chain.energy());
    }
    return static_cast<double>(accepted) / steps;
  };
  outcome.alpha0 = tune_alpha0_search(cfg.alpha0, probe, 60);
  outcome.state = chain.state();
  return outcome;
}

double tune_alpha0(const GibbsRunConfig& cfg, const KernelSpec& k, const Potential& v,
                   const ParticleConfig& init, rng::Stream& rng) {
  return tune_alpha0_chained(cfg, k, v, init, rng).alpha0;
}

namespace {

ParticleConfig make_init(const GibbsRunConfig& cfg, const TargetMeasure* target, int rung) {
  ParticleConfig x(cfg.n, cfg.dim);
  switch (cfg.init.kind) {
    case InitSpec::Kind::ColdGaussian: {
      auto rng = rng::stream(cfg.seed, "init", static_cast<std::uint64_t>(rung));
      for (double& c : x.coords) c = cfg.init.mean + cfg.init.stddev * rng.normal();
      return x;
    }
    case InitSpec::Kind::WarmFromTarget: {
      if (!target)
        throw std::invalid_argument("sample_gibbs: WarmFromTarget init needs a target measure");
      auto rng = rng::stream(cfg.seed, "init", static_cast<std::uint64_t>(rung));
      for (int i = 0; i < cfg.n; ++i) {
        const auto draw = exact_sample(*target, rng);
        std::copy(draw.begin(), draw.end(), x.point(i).begin());
      }
      return x;
    }
    case InitSpec::Kind::FromFile: {
      auto loaded = csv::read_points(cfg.init.path);
      if (loaded.n != cfg.n || loaded.dim != cfg.dim)
        throw std::invalid_argument("sample_gibbs: init file shape does not match config");
      return loaded;
    }
  }
  return x;
}

std::pair<ParticleConfig, ChainDiagnostics> run_rung(const GibbsRunConfig& cfg, const KernelSpec& k,
                                                     const Potential& v, ParticleConfig init,
                                                     int rung, int iterations, double alpha0_guess,
                                                     int global_offset,
                                                     const std::vector<int>& snapshot_iters,
                                                     const SnapshotFn& on_snapshot) {
  ChainDiagnostics diag;
  double alpha0 = alpha0_guess;
  if (cfg.autotune) {
    GibbsRunConfig tune_cfg = cfg;
    tune_cfg.alpha0 = alpha0_guess;
    auto tune_rng = rng::stream(cfg.seed, "tune", static_cast<std::uint64_t>(rung));
    auto outcome = tune_alpha0_chained(tune_cfg, k, v, init, tune_rng);
    alpha0 = outcome.alpha0;
    init = std::move(outcome.state);  // the adaptation phase doubles as burn-in
    diag.energy_trace = std::move(outcome.energy_trace);
  }
  diag.tuned_alpha0 = alpha0;

  MalaChain chain(std::move(init), k, v, alpha0, cfg.beta());
  auto chain_rng = rng::stream(cfg.seed, "chain", static_cast<std::uint64_t>(rung));
  diag.energy_trace.reserve(diag.energy_trace.size() + iterations + 1);
  diag.energy_trace.push_back(chain.energy());
  for (int t = 1; t <= iterations; ++t) {
    diag.accepted += chain.step(chain_rng) ? 1 : 0;
    diag.energy_trace.push_back(chain.energy());
    if (on_snapshot) {
      const int global_iter = global_offset + t;
      if (std::find(snapshot_iters.begin(), snapshot_iters.end(), global_iter) !=
          snapshot_iters.end())
        on_snapshot(global_iter, chain.state());
    }
  }
  diag.steps = iterations;
  diag.acceptance_rate = static_cast<double>(diag.accepted) / iterations;
  diag.nonfinite_rejects = chain.nonfinite_rejects();
  return {chain.state(), std::move(diag)};
}

}  // namespace

std::pair<ParticleConfig, ChainDiagnostics> sample_gibbs(const GibbsRunConfig& cfg,
                                                         const KernelSpec& k, const Potential& v,
                                                         const TargetMeasure* target,
                                                         const std::vector<int>& snapshot_iters,
                                                         const SnapshotFn& on_snapshot) {
  cfg.validate();
  return run_rung(cfg, k, v, make_init(cfg, target, 0), 0, cfg.iterations, cfg.alpha0, 0,
                  snapshot_iters, on_snapshot);
}

ParticleConfig mh_baseline_chain(const TargetMeasure& target, int n, double proposal_std,
                                 rng::Stream& rng) {
  if (n < 1) throw std::invalid_argument("mh_baseline_chain: n must be >= 1");
  ParticleConfig chain(n, target.dim);
  const auto init = exact_sample(target, rng);
  auto logd = [&target](std::span<const double> x) { return log_density_unnorm(target, x); };
  rw_mh_chain(logd, init, n, /*include_init=*/false, proposal_std, rng, chain.coords.data(),
              target.dim);
  return chain;
}

std::vector<double> anneal_ladder(int rungs) {
  if (rungs < 1) throw std::invalid_argument("anneal_ladder: rungs must be >= 1");
  std::vector<double> ladder(rungs);
  for (int k = 1; k <= rungs; ++k) ladder[k - 1] = static_cast<double>(k) / rungs;
  return ladder;
}

std::pair<ParticleConfig, AnnealedDiagnostics> sample_gibbs_annealed(
    const GibbsRunConfig& cfg, const KernelSpec& k, const TargetMeasure& target,
    const EmbeddingConfig& embed, const std::vector<int>& snapshot_iters,
    const SnapshotFn& on_snapshot) {
  cfg.validate();
  const int rungs = std::max(1, cfg.anneal_rungs);
  AnnealedDiagnostics diag;
  diag.ladder = anneal_ladder(rungs);

  const int base_iters = cfg.iterations / rungs;
  const int remainder = cfg.iterations - base_iters * rungs;
  if (base_iters < 1)
    throw std::invalid_argument("sample_gibbs_annealed: iterations < anneal rungs");

  ParticleConfig x = make_init(cfg, &target, 0);
  double alpha0_guess = cfg.alpha0;
  int global_offset = 0;
  for (int r = 0; r < rungs; ++r) {
    auto embed_rng = rng::stream(cfg.seed, "embed", static_cast<std::uint64_t>(r));
    auto estimate = std::make_shared<EmbeddingEstimate>(estimate_embedding(
        target, k, embed.count, embed.proposal_std, embed_rng, diag.ladder[r]));
    const Potential v = Potential::equilibrated(std::move(estimate), target.radius);
    const int iterations = base_iters + (r == rungs - 1 ? remainder : 0);
    // alpha0 is tuned once, at the beginning of the run; later rungs keep it
    GibbsRunConfig rung_cfg = cfg;
    if (r > 0) rung_cfg.autotune = false;
    auto [state, rung_diag] = run_rung(rung_cfg, k, v, std::move(x), r, iterations, alpha0_guess,
                                       global_offset, snapshot_iters, on_snapshot);
    x = std::move(state);
    alpha0_guess = rung_diag.tuned_alpha0;
    global_offset += iterations;
    diag.energy_trace.insert(diag.energy_trace.end(), rung_diag.energy_trace.begin(),
                             rung_diag.energy_trace.end());
    diag.per_rung.push_back(std::move(rung_diag));
  }
  return {std::move(x), std::move(diag)};
}

}  // namespace rq
