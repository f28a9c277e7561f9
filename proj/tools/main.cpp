#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "rq/config.hpp"
#include "rq/csv.hpp"
#include "rq/experiments.hpp"
#include "rq/samplers.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;  // sample only
  long long seed_override = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out) {
  cmd->add_option("--config", opts.config_path, "run configuration (JSON)")->required();
  cmd->add_option("--seed", opts.seed_override, "override the config seed");
  cmd->add_option("--threads", opts.threads, "cap the number of worker threads");
  if (with_out) cmd->add_option("--out", opts.out_path, "node set output path (CSV)");
}

rq::RunConfig load(const CommonOpts& opts, const std::string& subcommand) {
  rq::RunConfig cfg = rq::parse_config(opts.config_path);
  if (cfg.experiment.type != subcommand)
    throw rq::ConfigError({"/experiment/type: is '" + cfg.experiment.type +
                           "' but the subcommand is '" + subcommand + "'"});
  if (opts.seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(opts.seed_override);
    cfg.gibbs.seed = cfg.seed;
  }
  if (const char* env_out = std::getenv("REPULSE_QUAD_OUT"); env_out && *env_out)
    cfg.output_dir = env_out;
  if (opts.threads > 0) {
#ifdef _OPENMP
    omp_set_num_threads(opts.threads);
#endif
  }
  return cfg;
}

std::string make_run_dir(const rq::RunConfig& cfg) {
  const fs::path dir = fs::path(cfg.output_dir) / cfg.config_hash();
  fs::create_directories(dir);
  return dir.string();
}

void write_diagnostics(const std::string& run_dir, const rq::ChainDiagnostics& diag) {
  const std::string trace_path = (fs::path(run_dir) / "energy_trace.csv").string();
  std::vector<std::vector<double>> rows;
  rows.reserve(diag.energy_trace.size());
  for (std::size_t i = 0; i < diag.energy_trace.size(); ++i)
    rows.push_back({static_cast<double>(i), diag.energy_trace[i]});
  rq::csv::write_table(trace_path, {"iteration", "hamiltonian"}, rows);

  nlohmann::json doc;
  doc["acceptance_rate"] = diag.acceptance_rate;
  doc["tuned_alpha0"] = diag.tuned_alpha0;
  doc["energy_trace_path"] = trace_path;
  std::ofstream out(fs::path(run_dir) / "diagnostics.json", std::ios::binary);
  out << doc.dump(2) << '\n';
}

int run_sample(const CommonOpts& opts) {
  rq::RunConfig cfg = load(opts, "sample");
  const std::string run_dir = make_run_dir(cfg);
  const rq::Potential v = rq::build_potential(cfg, cfg.output_dir);
  auto [nodes, diag] = rq::sample_gibbs(cfg.gibbs, cfg.kernel, v, &cfg.target);
  const std::string out_path =
      opts.out_path.empty() ? (fs::path(run_dir) / "nodes.csv").string() : opts.out_path;
  rq::csv::write_points(out_path, nodes);
  write_diagnostics(run_dir, diag);
  std::cout << "sample " << cfg.config_hash() << ": n=" << nodes.n << " d=" << nodes.dim
            << " beta=" << cfg.gibbs.beta() << " acceptance=" << diag.acceptance_rate
            << " nodes -> " << out_path << "\n";
  return 0;
}

int run_embed(const CommonOpts& opts) {
  rq::RunConfig cfg = load(opts, "embed");
  const std::string run_dir = make_run_dir(cfg);
  auto embedding = rq::load_or_compute_embedding(cfg, cfg.output_dir);
  const std::string path = rq::embedding_file_path(cfg, cfg.output_dir);
  nlohmann::json doc;
  doc["embedding_path"] = path;
  doc["m"] = embedding->count;
  doc["proposal_std"] = cfg.potential.embedding.proposal_std;
  std::ofstream out(fs::path(run_dir) / "embedding.json", std::ios::binary);
  out << doc.dump(2) << '\n';
  std::cout << "embed " << cfg.config_hash() << ": M=" << embedding->count << " points -> " << path
            << "\n";
  return 0;
}

int run_experiment(const CommonOpts& opts, const std::string& name) {
  rq::RunConfig cfg = load(opts, name);
  const std::string run_dir = make_run_dir(cfg);
  rq::ExperimentReport report;
  if (name == "energy-decay")
    report = rq::run_energy_decay(cfg, cfg.output_dir, run_dir);
  else if (name == "variance")
    report = rq::run_variance_comparison(cfg, cfg.output_dir, run_dir);
  else if (name == "crystallize")
    report = rq::run_crystallization(cfg, cfg.output_dir, run_dir);
  else if (name == "concentration")
    report = rq::run_concentration_tail(cfg, cfg.output_dir, run_dir);
  else
    report = rq::run_multimodal(cfg, cfg.output_dir, run_dir);

  std::cout << name << " " << report.config_hash << ": " << report.cells.size() << " cells";
  if (name == "energy-decay")
    std::cout << ", slope(gibbs)=" << report.summary.at("slope_gibbs").get<double>()
              << ", mh/gibbs=" << report.summary.at("mh_over_gibbs_geomean").get<double>();
  else if (name == "crystallize")
    std::cout << ", nn-cv decreasing votes "
              << report.summary.at("nn_cv_strictly_decreasing_votes").get<int>() << "/"
              << report.summary.at("seeds").get<int>();
  else if (name == "concentration")
    std::cout << ", tail non-increasing="
              << (report.summary.at("tail_nonincreasing_at_calibrated_r").get<bool>() ? "yes"
                                                                                      : "no");
  std::cout << ", outputs -> " << run_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repulsive Gibbs quadrature engine"};
  app.require_subcommand(1);

  const std::vector<std::string> experiments = {"crystallize", "energy-decay", "variance",
                                                "multimodal", "concentration"};
  std::map<std::string, CommonOpts> opts;
  for (const auto& name : experiments)
    add_common(app.add_subcommand(name, "run the " + name + " experiment"), opts[name], false);
  add_common(app.add_subcommand("sample", "draw one Gibbs node set"), opts["sample"], true);
  add_common(app.add_subcommand("embed", "estimate and persist the kernel embedding"),
             opts["embed"], false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "sample") return run_sample(opts[name]);
    if (name == "embed") return run_embed(opts[name]);
    return run_experiment(opts[name], name);
  } catch (const rq::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
