#include "rq/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "rq/csv.hpp"
#include "rq/energy.hpp"
#include "rq/rng.hpp"
#include "rq/samplers.hpp"
#include "rq/stats.hpp"
#include "rq/svg.hpp"

namespace rq {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void write_json_file(const std::string& path, const json& doc) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string sanitize(const std::string& label) {
  std::string out;
  for (char c : label) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

GibbsRunConfig cell_gibbs(const RunConfig& cfg, int n, std::uint64_t sub_seed) {
  GibbsRunConfig g = cfg.gibbs;
  g.n = n;
  g.seed = sub_seed;
  return g;
}

void require_equilibrated(const RunConfig& cfg, const char* experiment) {
  if (cfg.potential.kind != PotentialSpec::Kind::Equilibrated)
    throw std::invalid_argument(std::string(experiment) +
                                ": requires gibbs.potential.type = \"equilibrated\"");
}

// Run a list of independent cell jobs, heavy ones first, catching per-cell
// failures so an exception cannot escape the parallel region.
void run_cells(std::vector<std::function<void()>>& jobs) {
  std::vector<std::string> failures(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < static_cast<int>(jobs.size()); ++i) {
    try {
      jobs[i]();
    } catch (const std::exception& e) {
      failures[i] = e.what();
    } catch (...) {
      failures[i] = "unknown error";
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw std::runtime_error("experiment cell failed: " + f);
}

double mean_of(const std::vector<double>& v) { return stats::mean(v); }

// f(x) = K(x, 0): the single integrand of the variance study.
double node_average_kernel_at_origin(const ParticleConfig& x, const KernelSpec& k) {
  std::vector<double> origin(k.dim, 0.0);
  double sum = 0.0;
  detail::kernel_row_accumulate(k, origin.data(), x.coords.data(), x.n, -1, &sum, nullptr);
  return sum / x.n;
}

double mmd2_against_reference(const ParticleConfig& x, const ReferenceSet& ref,
                              const KernelSpec& k) {
  return interaction_energy(x, k) - 2.0 * cross_energy(x, ref.nodes, k) + ref.self_energy;
}

void sort_cells(std::vector<ReportCell>& cells) {
  std::sort(cells.begin(), cells.end(), [](const ReportCell& a, const ReportCell& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.n != b.n) return a.n < b.n;
    return a.replicate < b.replicate;
  });
}

}  // namespace

json ExperimentReport::to_json() const {
  json doc;
  doc["experiment"] = experiment;
  doc["config_hash"] = config_hash;
  doc["seed"] = seed;
  doc["version"] = version;
  json cell_arr = json::array();
  for (const auto& c : cells) {
    json jc;
    jc["n"] = c.n;
    jc["method"] = c.method;
    jc["replicate"] = c.replicate;
    jc["sub_seed"] = c.sub_seed;
    jc["stats"] = c.stats;
    cell_arr.push_back(std::move(jc));
  }
  doc["cells"] = std::move(cell_arr);
  doc["summary"] = summary;
  return doc;
}

json ExperimentReport::timings_json() const {
  json doc;
  doc["experiment"] = experiment;
  doc["config_hash"] = config_hash;
  json cell_arr = json::array();
  double total = 0.0;
  for (const auto& c : cells) {
    cell_arr.push_back(json{{"n", c.n},
                            {"method", c.method},
                            {"replicate", c.replicate},
                            {"runtime_s", c.runtime_s}});
    total += c.runtime_s;
  }
  doc["cells"] = std::move(cell_arr);
  doc["total_cell_runtime_s"] = total;
  return doc;
}

void ExperimentReport::write(const std::string& run_dir) const {
  write_json_file((fs::path(run_dir) / "report.json").string(), to_json());
  write_json_file((fs::path(run_dir) / "timings.json").string(), timings_json());
}

std::string embedding_file_path(const RunConfig& cfg, const std::string& out_root) {
  const auto canon = cfg.canonical();
  json key;
  key["kernel"] = canon["kernel"];
  key["target"] = canon["target"];
  key["m"] = cfg.potential.embedding.count;
  key["proposal_std"] = cfg.potential.embedding.proposal_std;
  key["stream"] = rng::derive(cfg.seed, "embed", 0);
  const std::string digest = hex16(rng::fnv1a64(key.dump()));
  return (fs::path(out_root) / "embeddings" / ("emb_" + digest + ".csv")).string();
}

std::shared_ptr<const EmbeddingEstimate> load_or_compute_embedding(const RunConfig& cfg,
                                                                   const std::string& out_root) {
  const std::string path = embedding_file_path(cfg, out_root);
  auto est = std::make_shared<EmbeddingEstimate>();
  est->kernel = cfg.kernel;
  est->dim = cfg.target.dim;
  est->count = cfg.potential.embedding.count;
  if (fs::exists(path)) {
    auto loaded = csv::read_points(path);
    if (loaded.n == est->count && loaded.dim == est->dim) {
      est->points = std::move(loaded.coords);
      return est;
    }
  }
  auto rng = rng::stream(cfg.seed, "embed", 0);
  *est = estimate_embedding(cfg.target, cfg.kernel, cfg.potential.embedding.count,
                            cfg.potential.embedding.proposal_std, rng);
  ParticleConfig pts(est->count, est->dim);
  pts.coords = est->points;
  csv::write_points(path, pts);
  return est;
}

ReferenceSet load_or_compute_reference(const RunConfig& cfg, const std::string& out_root) {
  const auto canon = cfg.canonical();
  json key;
  key["target"] = canon["target"];
  key["length"] = cfg.experiment.reference_length;
  key["proposal_std"] = cfg.experiment.baseline_proposal_std;
  key["stream"] = rng::derive(cfg.seed, "reference", 0);
  const std::string digest = hex16(rng::fnv1a64(key.dump()));
  const std::string path = (fs::path(out_root) / "refs" / ("ref_" + digest + ".csv")).string();

  ReferenceSet ref;
  bool loaded_ok = false;
  if (fs::exists(path)) {
    auto loaded = csv::read_points(path);
    if (loaded.n == cfg.experiment.reference_length && loaded.dim == cfg.target.dim) {
      ref.nodes = std::move(loaded);
      loaded_ok = true;
    }
  }
  if (!loaded_ok) {
    auto rng = rng::stream(cfg.seed, "reference", 0);
    ref.nodes = mh_baseline_chain(cfg.target, cfg.experiment.reference_length,
                                  cfg.experiment.baseline_proposal_std, rng);
    csv::write_points(path, ref.nodes);
  }
  ref.self_energy = interaction_energy(ref.nodes, cfg.kernel);
  return ref;
}

Potential build_potential(const RunConfig& cfg, const std::string& out_root,
                          std::shared_ptr<const EmbeddingEstimate>* out_embedding) {
  if (cfg.potential.kind == PotentialSpec::Kind::Quadratic)
    return Potential::quadratic(cfg.potential.coeff);
  auto embedding = load_or_compute_embedding(cfg, out_root);
  if (out_embedding) *out_embedding = embedding;
  return Potential::equilibrated(embedding, cfg.target.radius);
}

std::vector<int> mode_occupancy(const ParticleConfig& points, const TargetMeasure& target) {
  if (target.components.empty())
    throw std::invalid_argument("mode_occupancy: target has no mixture components");
  std::vector<int> counts(target.components.size(), 0);
  for (int i = 0; i < points.n; ++i) {
    const auto p = points.point(i);
    int best = 0;
    double best_d = 1e300;
    for (std::size_t c = 0; c < target.components.size(); ++c) {
      const double d = squared_distance(p, target.components[c].center);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    ++counts[best];
  }
  return counts;
}

// ---------------------------------------------------------------------------
// energy decay (worst-case error vs n, Gibbs nodes against the MH baseline)
// ---------------------------------------------------------------------------

ExperimentReport run_energy_decay(const RunConfig& cfg, const std::string& out_root,
                                  const std::string& run_dir) {
  require_equilibrated(cfg, "energy-decay");
  std::shared_ptr<const EmbeddingEstimate> embedding;
  const Potential v = build_potential(cfg, out_root, &embedding);
  const ReferenceSet ref = load_or_compute_reference(cfg, out_root);

  std::vector<int> grid = cfg.experiment.n_grid;
  const int reps = cfg.experiment.replicates;
  const int num_n = static_cast<int>(grid.size());

  ExperimentReport report;
  report.experiment = "energy-decay";
  report.config_hash = cfg.config_hash();
  report.seed = cfg.seed;
  report.cells.resize(static_cast<std::size_t>(num_n) * reps * 2);

  // heavy cells first: iterate n descending
  std::vector<int> n_order(num_n);
  for (int i = 0; i < num_n; ++i) n_order[i] = i;
  std::sort(n_order.begin(), n_order.end(), [&](int a, int b) { return grid[a] > grid[b]; });

  std::vector<std::function<void()>> jobs;
  for (int oi = 0; oi < num_n; ++oi)
    for (int rep = 0; rep < reps; ++rep) {
      const int ni = n_order[oi];
      jobs.emplace_back([&, ni, rep] {
        const int n = grid[ni];
        const std::uint64_t idx = static_cast<std::uint64_t>(ni) * reps + rep;
        // Gibbs cell
        {
          const std::uint64_t sub_seed = rng::derive(cfg.seed, "cell:energy-decay:gibbs", idx);
          const double t0 = now_s();
          auto gcfg = cell_gibbs(cfg, n, sub_seed);
          auto [x, diag] = sample_gibbs(gcfg, cfg.kernel, v, &cfg.target);
          const double mmd2 = mmd2_against_reference(x, ref, cfg.kernel);
          ReportCell cell;
          cell.n = n;
          cell.method = "gibbs";
          cell.replicate = rep;
          cell.sub_seed = sub_seed;
          cell.stats = {{"mmd2", mmd2},
                        {"acceptance", diag.acceptance_rate},
                        {"tuned_alpha0", diag.tuned_alpha0},
                        {"nonfinite_rejects", diag.nonfinite_rejects}};
          cell.runtime_s = now_s() - t0;
          report.cells[idx * 2] = std::move(cell);
        }
        // MH baseline cell
        {
          const std::uint64_t sub_seed = rng::derive(cfg.seed, "cell:energy-decay:mh", idx);
          const double t0 = now_s();
          auto rng = rng::Stream(sub_seed);
          const auto x = mh_baseline_chain(cfg.target, n, cfg.experiment.baseline_proposal_std, rng);
          const double mmd2 = mmd2_against_reference(x, ref, cfg.kernel);
          ReportCell cell;
          cell.n = n;
          cell.method = "mh";
          cell.replicate = rep;
          cell.sub_seed = sub_seed;
          cell.stats = {{"mmd2", mmd2}};
          cell.runtime_s = now_s() - t0;
          report.cells[idx * 2 + 1] = std::move(cell);
        }
      });
    }
  run_cells(jobs);

  // summary: seed-averaged curves, slopes, ratio
  std::vector<double> ns, gibbs_mean, mh_mean, ratios;
  json per_n = json::array();
  for (int ni = 0; ni < num_n; ++ni) {
    std::vector<double> g, m;
    for (const auto& c : report.cells) {
      if (c.n != grid[ni]) continue;
      if (c.method == "gibbs") g.push_back(c.stats.at("mmd2").get<double>());
      if (c.method == "mh") m.push_back(c.stats.at("mmd2").get<double>());
    }
    const double gm = mean_of(g), mm = mean_of(m);
    ns.push_back(grid[ni]);
    gibbs_mean.push_back(gm);
    mh_mean.push_back(mm);
    ratios.push_back(mm / gm);
    per_n.push_back(json{{"n", grid[ni]}, {"gibbs_mmd2_mean", gm}, {"mh_mmd2_mean", mm},
                         {"ratio", mm / gm}});
  }
  report.summary = {{"per_n", per_n},
                    {"slope_gibbs", stats::slope_loglog(ns, gibbs_mean)},
                    {"slope_mh", stats::slope_loglog(ns, mh_mean)},
                    {"mh_over_gibbs_geomean", stats::geometric_mean(ratios)}};

  sort_cells(report.cells);
  // artifacts
  std::vector<std::vector<double>> grows, mrows;
  for (const auto& c : report.cells) {
    if (c.method == "gibbs")
      grows.push_back({static_cast<double>(c.n), static_cast<double>(c.replicate),
                       c.stats.at("mmd2").get<double>(), c.stats.at("acceptance").get<double>()});
    else
      mrows.push_back({static_cast<double>(c.n), static_cast<double>(c.replicate),
                       c.stats.at("mmd2").get<double>()});
  }
  csv::write_table((fs::path(run_dir) / "mmd2_gibbs.csv").string(),
                   {"n", "replicate", "mmd2", "acceptance"}, grows);
  csv::write_table((fs::path(run_dir) / "mmd2_mh.csv").string(), {"n", "replicate", "mmd2"}, mrows);
  svg::emit_series((fs::path(run_dir) / "energy_decay.svg").string(),
                   {{"gibbs", ns, gibbs_mean}, {"mh", ns, mh_mean}}, svg::Axes::LogLog, "n",
                   "mmd^2");
  report.write(run_dir);
  return report;
}

// ---------------------------------------------------------------------------
// single-integrand variance across replicate chains
// ---------------------------------------------------------------------------

ExperimentReport run_variance_comparison(const RunConfig& cfg, const std::string& out_root,
                                         const std::string& run_dir) {
  require_equilibrated(cfg, "variance");
  std::shared_ptr<const EmbeddingEstimate> embedding;
  const Potential v = build_potential(cfg, out_root, &embedding);

  std::vector<int> grid = cfg.experiment.n_grid;
  const int reps = cfg.experiment.replicates;
  const int num_n = static_cast<int>(grid.size());

  ExperimentReport report;
  report.experiment = "variance";
  report.config_hash = cfg.config_hash();
  report.seed = cfg.seed;
  report.cells.resize(static_cast<std::size_t>(num_n) * reps * 2);

  std::vector<int> n_order(num_n);
  for (int i = 0; i < num_n; ++i) n_order[i] = i;
  std::sort(n_order.begin(), n_order.end(), [&](int a, int b) { return grid[a] > grid[b]; });

  std::vector<std::function<void()>> jobs;
  for (int oi = 0; oi < num_n; ++oi)
    for (int rep = 0; rep < reps; ++rep) {
      const int ni = n_order[oi];
      jobs.emplace_back([&, ni, rep] {
        const int n = grid[ni];
        const std::uint64_t idx = static_cast<std::uint64_t>(ni) * reps + rep;
        {
          const std::uint64_t sub_seed = rng::derive(cfg.seed, "cell:variance:gibbs", idx);
          const double t0 = now_s();
          auto gcfg = cell_gibbs(cfg, n, sub_seed);
          auto [x, diag] = sample_gibbs(gcfg, cfg.kernel, v, &cfg.target);
          ReportCell cell;
          cell.n = n;
          cell.method = "gibbs";
          cell.replicate = rep;
          cell.sub_seed = sub_seed;
          cell.stats = {{"node_average", node_average_kernel_at_origin(x, cfg.kernel)},
                        {"acceptance", diag.acceptance_rate},
                        {"tuned_alpha0", diag.tuned_alpha0}};
          cell.runtime_s = now_s() - t0;
          report.cells[idx * 2] = std::move(cell);
        }
        {
          const std::uint64_t sub_seed = rng::derive(cfg.seed, "cell:variance:mh", idx);
          const double t0 = now_s();
          auto rng = rng::Stream(sub_seed);
          const auto x = mh_baseline_chain(cfg.target, n, cfg.experiment.baseline_proposal_std, rng);
          ReportCell cell;
          cell.n = n;
          cell.method = "mh";
          cell.replicate = rep;
          cell.sub_seed = sub_seed;
          cell.stats = {{"node_average", node_average_kernel_at_origin(x, cfg.kernel)}};
          cell.runtime_s = now_s() - t0;
          report.cells[idx * 2 + 1] = std::move(cell);
        }
      });
    }
  run_cells(jobs);

  std::vector<double> ns, var_gibbs, var_mh;
  json per_n = json::array();
  for (int ni = 0; ni < num_n; ++ni) {
    std::vector<double> g, m;
    for (const auto& c : report.cells) {
      if (c.n != grid[ni]) continue;
      if (c.method == "gibbs") g.push_back(c.stats.at("node_average").get<double>());
      if (c.method == "mh") m.push_back(c.stats.at("node_average").get<double>());
    }
    const double vg = stats::sample_variance(g), vm = stats::sample_variance(m);
    ns.push_back(grid[ni]);
    var_gibbs.push_back(vg);
    var_mh.push_back(vm);
    per_n.push_back(json{{"n", grid[ni]},
                         {"gibbs_variance", vg},
                         {"mh_variance", vm},
                         {"gibbs_over_mh", vm > 0.0 ? vg / vm : 0.0}});
  }
  report.summary = {{"per_n", per_n},
                    {"integrand", cfg.experiment.integrand},
                    {"slope_mh_variance", stats::slope_loglog(ns, var_mh)},
                    {"slope_gibbs_variance", stats::slope_loglog(ns, var_gibbs)}};

  sort_cells(report.cells);
  std::vector<std::vector<double>> grows, mrows;
  for (const auto& c : report.cells) {
    const double avg = c.stats.at("node_average").get<double>();
    if (c.method == "gibbs")
      grows.push_back({static_cast<double>(c.n), static_cast<double>(c.replicate), avg});
    else
      mrows.push_back({static_cast<double>(c.n), static_cast<double>(c.replicate), avg});
  }
  csv::write_table((fs::path(run_dir) / "averages_gibbs.csv").string(),
                   {"n", "replicate", "node_average"}, grows);
  csv::write_table((fs::path(run_dir) / "averages_mh.csv").string(),
                   {"n", "replicate", "node_average"}, mrows);
  svg::emit_series((fs::path(run_dir) / "variance.svg").string(),
                   {{"gibbs", ns, var_gibbs}, {"mh", ns, var_mh}}, svg::Axes::LogLog, "n",
                   "variance");
  report.write(run_dir);
  return report;
}

// ---------------------------------------------------------------------------
// crystallization across temperature schedules
// ---------------------------------------------------------------------------

ExperimentReport run_crystallization(const RunConfig& cfg, const std::string& out_root,
                                     const std::string& run_dir) {
  (void)out_root;
  if (cfg.potential.kind != PotentialSpec::Kind::Quadratic)
    throw std::invalid_argument("crystallize: requires gibbs.potential.type = \"quadratic\"");
  const Potential v = Potential::quadratic(cfg.potential.coeff);
  const auto& schedules = cfg.experiment.schedules;
  const int reps = cfg.experiment.replicates;
  const int num_s = static_cast<int>(schedules.size());

  ExperimentReport report;
  report.experiment = "crystallize";
  report.config_hash = cfg.config_hash();
  report.seed = cfg.seed;
  report.cells.resize(static_cast<std::size_t>(num_s) * reps);

  std::vector<ParticleConfig> clouds(num_s);
  std::vector<std::function<void()>> jobs;
  for (int rep = 0; rep < reps; ++rep)
    for (int si = 0; si < num_s; ++si) {
      jobs.emplace_back([&, si, rep] {
        const std::uint64_t idx = static_cast<std::uint64_t>(si) * reps + rep;
        const std::string label = schedules[si].label();
        const std::uint64_t sub_seed = rng::derive(cfg.seed, "cell:crystallize:" + label, rep);
        const double t0 = now_s();
        auto gcfg = cell_gibbs(cfg, cfg.gibbs.n, sub_seed);
        gcfg.temperature = schedules[si];
        auto [x, diag] = sample_gibbs(gcfg, cfg.kernel, v, &cfg.target);
        ReportCell cell;
        cell.n = gcfg.n;
        cell.method = label;
        cell.replicate = rep;
        cell.sub_seed = sub_seed;
        cell.stats = {{"nn_cv", stats::nn_distance_cv(x)},
                      {"max_radius", stats::max_norm(x)},
                      {"acceptance", diag.acceptance_rate},
                      {"tuned_alpha0", diag.tuned_alpha0}};
        cell.runtime_s = now_s() - t0;
        report.cells[idx] = std::move(cell);
        if (rep == 0) clouds[si] = std::move(x);
      });
    }
  run_cells(jobs);

  // per-schedule statistics and the ordering vote across seeds
  json per_schedule = json::array();
  std::vector<std::vector<double>> cv_by_schedule(num_s, std::vector<double>(reps, 0.0));
  double max_radius = 0.0;
  for (int si = 0; si < num_s; ++si) {
    std::vector<double> cvs;
    for (const auto& c : report.cells)
      if (c.method == schedules[si].label()) {
        cvs.push_back(c.stats.at("nn_cv").get<double>());
        cv_by_schedule[si][c.replicate] = cvs.back();
        max_radius = std::max(max_radius, c.stats.at("max_radius").get<double>());
      }
    per_schedule.push_back(
        json{{"schedule", schedules[si].label()}, {"nn_cv_mean", mean_of(cvs)}, {"nn_cv", cvs}});
  }
  int decreasing_votes = 0;
  for (int rep = 0; rep < reps; ++rep) {
    bool decreasing = true;
    for (int si = 0; si + 1 < num_s; ++si)
      if (!(cv_by_schedule[si][rep] > cv_by_schedule[si + 1][rep])) decreasing = false;
    decreasing_votes += decreasing ? 1 : 0;
  }
  report.summary = {{"per_schedule", per_schedule},
                    {"nn_cv_strictly_decreasing_votes", decreasing_votes},
                    {"seeds", reps},
                    {"max_radius", max_radius}};

  sort_cells(report.cells);
  for (int si = 0; si < num_s; ++si) {
    const std::string tag = sanitize(schedules[si].label());
    csv::write_points((fs::path(run_dir) / ("cloud_" + tag + ".csv")).string(), clouds[si]);
    svg::emit_pointcloud((fs::path(run_dir) / ("cloud_" + tag + ".svg")).string(), clouds[si]);
  }
  report.write(run_dir);
  return report;
}

// ---------------------------------------------------------------------------
// concentration tails across temperature schedules
// ---------------------------------------------------------------------------

ExperimentReport run_concentration_tail(const RunConfig& cfg, const std::string& out_root,
                                        const std::string& run_dir) {
  require_equilibrated(cfg, "concentration");
  std::shared_ptr<const EmbeddingEstimate> embedding;
  const Potential v = build_potential(cfg, out_root, &embedding);
  const ReferenceSet ref = load_or_compute_reference(cfg, out_root);

  const auto& schedules = cfg.experiment.schedules;
  const int reps = cfg.experiment.replicates;
  const int num_s = static_cast<int>(schedules.size());

  ExperimentReport report;
  report.experiment = "concentration";
  report.config_hash = cfg.config_hash();
  report.seed = cfg.seed;
  report.cells.resize(static_cast<std::size_t>(num_s) * reps);

  std::vector<std::function<void()>> jobs;
  for (int rep = 0; rep < reps; ++rep)
    for (int si = 0; si < num_s; ++si) {
      jobs.emplace_back([&, si, rep] {
        const std::string label = schedules[si].label();
        const std::uint64_t idx = static_cast<std::uint64_t>(si) * reps + rep;
        const std::uint64_t sub_seed = rng::derive(cfg.seed, "cell:concentration:" + label, rep);
        const double t0 = now_s();
        auto gcfg = cell_gibbs(cfg, cfg.gibbs.n, sub_seed);
        gcfg.temperature = schedules[si];
        auto [x, diag] = sample_gibbs(gcfg, cfg.kernel, v, &cfg.target);
        ReportCell cell;
        cell.n = gcfg.n;
        cell.method = label;
        cell.replicate = rep;
        cell.sub_seed = sub_seed;
        cell.stats = {{"mmd2", mmd2_against_reference(x, ref, cfg.kernel)},
                      {"acceptance", diag.acceptance_rate}};
        cell.runtime_s = now_s() - t0;
        report.cells[idx] = std::move(cell);
      });
    }
  run_cells(jobs);

  std::vector<std::vector<double>> mmd2_by_schedule(num_s);
  for (int si = 0; si < num_s; ++si)
    for (const auto& c : report.cells)
      if (c.method == schedules[si].label())
        mmd2_by_schedule[si].push_back(c.stats.at("mmd2").get<double>());

  // calibrated threshold: the median mmd2 under the first (hottest) schedule,
  // so its own tail sits near 1/2
  std::vector<double> r_values = cfg.experiment.r_grid;
  const double calibrated_r = std::sqrt(std::max(stats::median(mmd2_by_schedule[0]), 0.0));
  if (r_values.empty()) r_values.push_back(calibrated_r);

  auto tail = [](const std::vector<double>& values, double r2) {
    int count = 0;
    for (double v2 : values) count += (v2 > r2) ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(values.size());
  };

  json tails = json::array();
  for (double r : r_values) {
    json row;
    row["r"] = r;
    json per_schedule = json::array();
    for (int si = 0; si < num_s; ++si)
      per_schedule.push_back(json{{"schedule", schedules[si].label()},
                                  {"tail", tail(mmd2_by_schedule[si], r * r)}});
    row["tails"] = std::move(per_schedule);
    tails.push_back(std::move(row));
  }
  bool monotone_at_calibrated = true;
  {
    double prev = 2.0;
    for (int si = 0; si < num_s; ++si) {
      const double t = tail(mmd2_by_schedule[si], calibrated_r * calibrated_r);
      if (t > prev + 1e-12) monotone_at_calibrated = false;
      prev = t;
    }
  }
  report.summary = {{"tails", tails},
                    {"calibrated_r", calibrated_r},
                    {"tail_nonincreasing_at_calibrated_r", monotone_at_calibrated},
                    {"replicates", reps}};

  sort_cells(report.cells);
  std::vector<std::vector<double>> rows;
  for (int si = 0; si < num_s; ++si)
    for (std::size_t rep = 0; rep < mmd2_by_schedule[si].size(); ++rep)
      rows.push_back({static_cast<double>(si), static_cast<double>(rep), mmd2_by_schedule[si][rep]});
  csv::write_table((fs::path(run_dir) / "mmd2_cells.csv").string(),
                   {"schedule_index", "replicate", "mmd2"}, rows);
  report.write(run_dir);
  return report;
}

// ---------------------------------------------------------------------------
// multimodal target: cold / warm / annealed starts
// ---------------------------------------------------------------------------

ExperimentReport run_multimodal(const RunConfig& cfg, const std::string& out_root,
                                const std::string& run_dir) {
  (void)out_root;
  require_equilibrated(cfg, "multimodal");
  if (cfg.target.components.size() < 2)
    throw std::invalid_argument("multimodal: target must be a mixture");

  const auto& variants = cfg.experiment.variants;
  const int reps = cfg.experiment.replicates;
  const int num_v = static_cast<int>(variants.size());
  const int rungs = cfg.gibbs.anneal_rungs > 0 ? cfg.gibbs.anneal_rungs : 10;

  ExperimentReport report;
  report.experiment = "multimodal";
  report.config_hash = cfg.config_hash();
  report.seed = cfg.seed;
  report.cells.resize(static_cast<std::size_t>(num_v) * reps);

  struct Snapshot {
    std::string variant;
    int iteration;
    ParticleConfig points;
  };

  std::vector<std::function<void()>> jobs;
  std::vector<std::vector<Snapshot>> snapshot_slots(num_v);
  for (int rep = 0; rep < reps; ++rep)
    for (int vi = 0; vi < num_v; ++vi) {
      jobs.emplace_back([&, vi, rep] {
        const std::string& variant = variants[vi];
        const std::uint64_t sub_seed = rng::derive(cfg.seed, "cell:multimodal:" + variant, rep);
        const double t0 = now_s();
        auto gcfg = cell_gibbs(cfg, cfg.gibbs.n, sub_seed);
        SnapshotFn on_snapshot = nullptr;
        std::vector<Snapshot>* slot = rep == 0 ? &snapshot_slots[vi] : nullptr;
        if (slot)
          on_snapshot = [slot, &variant](int iter, const ParticleConfig& x) {
            slot->push_back({variant, iter, x});
          };

        ParticleConfig final_state(1, 1);
        double acceptance = 0.0;
        double tuned = 0.0;
        if (variant == "annealed") {
          gcfg.init = InitSpec{InitSpec::Kind::ColdGaussian, 0.0, 1.0, ""};
          gcfg.anneal_rungs = rungs;
          auto [x, diag] = sample_gibbs_annealed(gcfg, cfg.kernel, cfg.target,
                                                 cfg.potential.embedding,
                                                 cfg.experiment.snapshots, on_snapshot);
          long accepted = 0;
          long steps = 0;
          for (const auto& rd : diag.per_rung) {
            accepted += rd.accepted;
            steps += rd.steps;
          }
          acceptance = steps > 0 ? static_cast<double>(accepted) / steps : 0.0;
          tuned = diag.per_rung.back().tuned_alpha0;
          final_state = std::move(x);
        } else {
          gcfg.init = variant == "warm" ? InitSpec{InitSpec::Kind::WarmFromTarget, 0.0, 1.0, ""}
                                        : InitSpec{InitSpec::Kind::ColdGaussian, 0.0, 1.0, ""};
          gcfg.anneal_rungs = 0;
          // per-cell embedding, same stream layout as rung 0 of the annealed run
          auto embed_rng = rng::stream(sub_seed, "embed", 0);
          auto est = std::make_shared<EmbeddingEstimate>(
              estimate_embedding(cfg.target, cfg.kernel, cfg.potential.embedding.count,
                                 cfg.potential.embedding.proposal_std, embed_rng));
          const Potential v = Potential::equilibrated(std::move(est), cfg.target.radius);
          auto [x, diag] =
              sample_gibbs(gcfg, cfg.kernel, v, &cfg.target, cfg.experiment.snapshots, on_snapshot);
          acceptance = diag.acceptance_rate;
          tuned = diag.tuned_alpha0;
          final_state = std::move(x);
        }

        const auto occupancy = mode_occupancy(final_state, cfg.target);
        const int min_occ = *std::min_element(occupancy.begin(), occupancy.end());
        ReportCell cell;
        cell.n = gcfg.n;
        cell.method = variant;
        cell.replicate = rep;
        cell.sub_seed = sub_seed;
        cell.stats = {{"occupancy", occupancy},
                      {"min_occupancy", min_occ},
                      {"acceptance", acceptance},
                      {"tuned_alpha0", tuned}};
        cell.runtime_s = now_s() - t0;
        report.cells[static_cast<std::size_t>(vi) * reps + rep] = std::move(cell);
      });
    }
  run_cells(jobs);

  const int threshold = cfg.gibbs.n / 12;
  json per_variant = json::array();
  for (int vi = 0; vi < num_v; ++vi) {
    int votes = 0;
    json occ = json::array();
    for (const auto& c : report.cells)
      if (c.method == variants[vi]) {
        const int min_occ = c.stats.at("min_occupancy").get<int>();
        votes += (min_occ >= threshold) ? 1 : 0;
        occ.push_back(c.stats.at("occupancy"));
      }
    per_variant.push_back(json{{"variant", variants[vi]},
                               {"all_modes_populated_votes", votes},
                               {"occupancy", occ}});
  }
  report.summary = {{"per_variant", per_variant},
                    {"min_occupancy_threshold", threshold},
                    {"seeds", reps},
                    {"snapshots", cfg.experiment.snapshots},
                    {"ladder", anneal_ladder(rungs)}};

  sort_cells(report.cells);
  for (int vi = 0; vi < num_v; ++vi)
    for (const auto& snap : snapshot_slots[vi]) {
      const std::string base = "snapshot_" + snap.variant + "_" + std::to_string(snap.iteration);
      csv::write_points((fs::path(run_dir) / (base + ".csv")).string(), snap.points);
      svg::emit_pointcloud((fs::path(run_dir) / (base + ".svg")).string(), snap.points);
    }
  report.write(run_dir);
  return report;
}

}  // namespace rq
