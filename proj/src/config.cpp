#include "rq/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rq/rng.hpp"

namespace rq {

using nlohmann::json;

namespace {

struct Ctx {
  std::vector<std::string> errors;
  void error(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }
};

// Strict-object view: typed getters mark keys as consumed, finish() rejects
// whatever was not consumed. Every problem is recorded with its JSON pointer
// so a bad config reports all mistakes at once.
class Obj {
 public:
  Obj(const json* node, std::string path, Ctx& ctx) : node_(node), path_(std::move(path)), ctx_(ctx) {
    if (node_ && !node_->is_object()) {
      ctx_.error(path_, "expected an object");
      node_ = nullptr;
    }
  }

  bool present() const { return node_ != nullptr; }

  const json* raw(const char* key) {
    if (!node_) return nullptr;
    seen_.insert(key);
    const auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  bool has(const char* key) {
    if (!node_) return false;
    return node_->find(key) != node_->end();
  }

  double number(const char* key, double fallback, bool required) {
    const json* v = raw(key);
    if (!v) {
      if (required) ctx_.error(path_ + "/" + key, "missing required number");
      return fallback;
    }
    if (!v->is_number()) {
      ctx_.error(path_ + "/" + key, "expected a number");
      return fallback;
    }
    return v->get<double>();
  }

  double positive(const char* key, double fallback, bool required) {
    const double v = number(key, fallback, required);
    if (has(key) && !(v > 0.0)) ctx_.error(path_ + "/" + key, "must be > 0");
    return v;
  }

  long long integer(const char* key, long long fallback, bool required) {
    const json* v = raw(key);
    if (!v) {
      if (required) ctx_.error(path_ + "/" + key, "missing required integer");
      return fallback;
    }
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
      ctx_.error(path_ + "/" + key, "expected an integer");
      return fallback;
    }
    return v->get<long long>();
  }

  std::uint64_t uint64(const char* key, std::uint64_t fallback, bool required) {
    const json* v = raw(key);
    if (!v) {
      if (required) ctx_.error(path_ + "/" + key, "missing required integer");
      return fallback;
    }
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      ctx_.error(path_ + "/" + key, "expected a non-negative integer");
      return fallback;
    }
    return v->get<std::uint64_t>();
  }

  std::string str(const char* key, std::string fallback, bool required) {
    const json* v = raw(key);
    if (!v) {
      if (required) ctx_.error(path_ + "/" + key, "missing required string");
      return fallback;
    }
    if (!v->is_string()) {
      ctx_.error(path_ + "/" + key, "expected a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  bool flag(const char* key, bool fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      ctx_.error(path_ + "/" + key, "expected a boolean");
      return fallback;
    }
    return v->get<bool>();
  }

  void finish() {
    if (!node_) return;
    for (const auto& item : node_->items())
      if (!seen_.contains(item.key())) ctx_.error(path_ + "/" + item.key(), "unknown key");
  }

  const std::string& path() const { return path_; }
  Ctx& ctx() { return ctx_; }

 private:
  const json* node_;
  std::string path_;
  Ctx& ctx_;
  std::set<std::string> seen_;
};

bool parse_schedule(const json& v, TemperatureSchedule& out) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "n^1.5" || s == "n^{3/2}" || s == "n^3/2") {
      out = TemperatureSchedule::pow_three_halves();
      return true;
    }
    if (s == "n^2") {
      out = TemperatureSchedule::pow_two();
      return true;
    }
    if (s == "n^3") {
      out = TemperatureSchedule::pow_three();
      return true;
    }
    return false;
  }
  if (v.is_number()) {
    const double b = v.get<double>();
    if (!(b > 0.0)) return false;
    out = TemperatureSchedule::explicit_beta(b);
    return true;
  }
  return false;
}

KernelSpec parse_kernel(Obj obj, int dim, Ctx& ctx) {
  KernelSpec k;
  k.dim = dim;
  const std::string family = obj.str("family", "gaussian", true);
  k.weight = obj.number("weight", 1.0, false);
  if (obj.has("weight") && !(k.weight >= 0.0)) ctx.error(obj.path() + "/weight", "must be >= 0");
  if (family == "gaussian") {
    k.family = KernelFamily::Gaussian;
    k.lengthscale = obj.positive("lengthscale", 1.0, false);
  } else if (family == "truncated_riesz") {
    k.family = KernelFamily::TruncatedRiesz;
    k.epsilon = obj.positive("epsilon", 0.1, true);
    k.exponent = obj.number("exponent", 0.5 * (dim - 2), false);
  } else if (family == "truncated_log") {
    k.family = KernelFamily::TruncatedLog;
    k.epsilon = obj.positive("epsilon", 0.01, true);
  } else if (family == "truncated_multiquadric") {
    k.family = KernelFamily::TruncatedMultiquadric;
    k.epsilon = obj.positive("epsilon", 0.1, true);
    k.exponent = obj.number("exponent", 0.5, true);
  } else {
    ctx.error(obj.path() + "/family", "unknown kernel family '" + family + "'");
  }
  obj.finish();
  return k;
}

std::vector<double> parse_point(const json* v, int dim, const std::string& path, Ctx& ctx) {
  std::vector<double> out(dim, 0.0);
  if (!v) return out;
  if (!v->is_array() || static_cast<int>(v->size()) != dim) {
    ctx.error(path, "expected an array of " + std::to_string(dim) + " numbers");
    return out;
  }
  for (int i = 0; i < dim; ++i) {
    if (!(*v)[i].is_number()) {
      ctx.error(path, "expected numbers");
      return out;
    }
    out[i] = (*v)[i].get<double>();
  }
  return out;
}

TargetMeasure parse_target(Obj obj, Ctx& ctx, int& dim_out) {
  const std::string family = obj.str("family", "uniform_ball", true);
  const int dim = static_cast<int>(obj.integer("dim", 1, true));
  if (obj.has("dim") && dim < 1) ctx.error(obj.path() + "/dim", "must be >= 1");
  dim_out = std::max(dim, 1);
  try {
    if (family == "uniform_ball") {
      const double radius = obj.positive("radius", 1.0, true);
      obj.finish();
      return TargetMeasure::uniform_ball(dim_out, radius);
    }
    if (family == "truncated_gaussian") {
      const auto center = parse_point(obj.raw("center"), dim_out, obj.path() + "/center", ctx);
      const double variance = obj.positive("variance", 1.0, true);
      const double trunc_radius = obj.positive("trunc_radius", 1.0, true);
      obj.finish();
      return TargetMeasure::truncated_gaussian(center, variance, trunc_radius);
    }
    if (family == "truncated_gaussian_mixture") {
      if (const json* circle = obj.raw("circle")) {
        Obj cobj(circle, obj.path() + "/circle", ctx);
        const int count = static_cast<int>(cobj.integer("count", 1, true));
        const double trunc_radius = cobj.positive("trunc_radius", 0.5, true);
        const double variance = cobj.positive("variance", 0.1, true);
        const double circle_radius = cobj.positive("circle_radius", 1.0, false);
        cobj.finish();
        obj.finish();
        if (dim_out != 2) ctx.error(obj.path() + "/dim", "circle mixtures live in dimension 2");
        return mixture_on_circle(std::max(count, 1), trunc_radius, variance, circle_radius);
      }
      const json* comps = obj.raw("components");
      obj.finish();
      if (!comps || !comps->is_array() || comps->empty()) {
        ctx.error(obj.path() + "/components", "expected a non-empty array (or a 'circle' object)");
        return TargetMeasure::uniform_ball(dim_out, 1.0);
      }
      std::vector<GaussianComponent> components;
      for (std::size_t i = 0; i < comps->size(); ++i) {
        const std::string cpath = obj.path() + "/components/" + std::to_string(i);
        Obj cobj(&(*comps)[i], cpath, ctx);
        GaussianComponent comp;
        comp.center = parse_point(cobj.raw("center"), dim_out, cpath + "/center", ctx);
        comp.variance = cobj.positive("variance", 1.0, true);
        comp.trunc_radius = cobj.positive("trunc_radius", 1.0, true);
        comp.weight = cobj.number("weight", 1.0 / comps->size(), false);
        cobj.finish();
        components.push_back(std::move(comp));
      }
      return TargetMeasure::gaussian_mixture(std::move(components));
    }
    ctx.error(obj.path() + "/family", "unknown target family '" + family + "'");
  } catch (const std::invalid_argument& e) {
    ctx.error(obj.path(), e.what());
  }
  obj.finish();
  return TargetMeasure::uniform_ball(dim_out, 1.0);
}

void parse_gibbs(Obj obj, int dim, GibbsRunConfig& gibbs, PotentialSpec& potential, Ctx& ctx) {
  gibbs.dim = dim;
  gibbs.n = static_cast<int>(obj.integer("n", 1, true));
  if (obj.has("n") && gibbs.n < 1) ctx.error(obj.path() + "/n", "must be >= 1");
  if (const json* beta = obj.raw("beta")) {
    if (!parse_schedule(*beta, gibbs.temperature))
      ctx.error(obj.path() + "/beta", "expected 'n^1.5', 'n^2', 'n^3' or a positive number");
  } else {
    ctx.error(obj.path() + "/beta", "missing required schedule");
  }
  gibbs.alpha0 = obj.positive("alpha0", 1.0, true);
  gibbs.iterations = static_cast<int>(obj.integer("iterations", 1, true));
  if (obj.has("iterations") && gibbs.iterations < 1)
    ctx.error(obj.path() + "/iterations", "must be >= 1");
  gibbs.autotune = obj.flag("autotune", true);

  Obj init(obj.raw("init"), obj.path() + "/init", ctx);
  if (init.present()) {
    const std::string kind = init.str("kind", "cold_gaussian", true);
    if (kind == "cold_gaussian") {
      gibbs.init.kind = InitSpec::Kind::ColdGaussian;
      gibbs.init.mean = init.number("mean", 0.0, false);
      gibbs.init.stddev = init.positive("std", 1.0, false);
    } else if (kind == "warm_from_target") {
      gibbs.init.kind = InitSpec::Kind::WarmFromTarget;
    } else if (kind == "from_file") {
      gibbs.init.kind = InitSpec::Kind::FromFile;
      gibbs.init.path = init.str("path", "", true);
    } else {
      ctx.error(obj.path() + "/init/kind", "unknown init kind '" + kind + "'");
    }
    init.finish();
  } else {
    ctx.error(obj.path() + "/init", "missing required object");
  }

  Obj pot(obj.raw("potential"), obj.path() + "/potential", ctx);
  if (pot.present()) {
    const std::string type = pot.str("type", "quadratic", true);
    if (type == "quadratic") {
      potential.kind = PotentialSpec::Kind::Quadratic;
      potential.coeff = pot.positive("coeff", 1.0, false);
    } else if (type == "equilibrated") {
      potential.kind = PotentialSpec::Kind::Equilibrated;
      potential.embedding.count = static_cast<int>(pot.integer("m", 1000, false));
      if (potential.embedding.count < 1) ctx.error(obj.path() + "/potential/m", "must be >= 1");
      potential.embedding.proposal_std =
          pot.positive("proposal_std", potential.embedding.proposal_std, false);
    } else {
      ctx.error(obj.path() + "/potential/type", "unknown potential type '" + type + "'");
    }
    pot.finish();
  } else {
    ctx.error(obj.path() + "/potential", "missing required object");
  }

  gibbs.anneal_rungs = 0;
  if (const json* anneal = obj.raw("anneal")) {
    Obj aobj(anneal, obj.path() + "/anneal", ctx);
    gibbs.anneal_rungs = static_cast<int>(aobj.integer("rungs", 10, true));
    if (gibbs.anneal_rungs < 1) ctx.error(obj.path() + "/anneal/rungs", "must be >= 1");
    aobj.finish();
  }
  obj.finish();
}

const std::set<std::string> kExperimentTypes = {
    "crystallize", "energy-decay", "variance", "multimodal", "concentration", "sample", "embed"};

ExperimentSection parse_experiment(Obj obj, Ctx& ctx) {
  ExperimentSection ex;
  ex.type = obj.str("type", "sample", true);
  if (!kExperimentTypes.contains(ex.type))
    ctx.error(obj.path() + "/type", "unknown experiment type '" + ex.type + "'");

  auto parse_n_grid = [&](bool required) {
    const json* grid = obj.raw("n_grid");
    if (!grid) {
      if (required) ctx.error(obj.path() + "/n_grid", "missing required array");
      return;
    }
    if (!grid->is_array() || grid->empty()) {
      ctx.error(obj.path() + "/n_grid", "expected a non-empty array of integers");
      return;
    }
    for (const auto& v : *grid) {
      if (!v.is_number_integer() && !v.is_number_unsigned()) {
        ctx.error(obj.path() + "/n_grid", "expected integers");
        return;
      }
      ex.n_grid.push_back(v.get<int>());
    }
  };
  auto parse_schedules = [&](const std::vector<TemperatureSchedule>& fallback) {
    const json* arr = obj.raw("schedules");
    if (!arr) {
      ex.schedules = fallback;
      return;
    }
    if (!arr->is_array() || arr->empty()) {
      ctx.error(obj.path() + "/schedules", "expected a non-empty array");
      return;
    }
    for (const auto& v : *arr) {
      TemperatureSchedule s;
      if (!parse_schedule(v, s)) {
        ctx.error(obj.path() + "/schedules", "expected 'n^1.5', 'n^2', 'n^3' or positive numbers");
        return;
      }
      ex.schedules.push_back(s);
    }
  };
  const std::vector<TemperatureSchedule> three_schedules = {TemperatureSchedule::pow_three_halves(),
                                                            TemperatureSchedule::pow_two(),
                                                            TemperatureSchedule::pow_three()};

  if (ex.type == "energy-decay" || ex.type == "variance") {
    parse_n_grid(true);
    ex.replicates = static_cast<int>(obj.integer("replicates", 5, ex.type == "variance"));
    if (ex.replicates < 1) ctx.error(obj.path() + "/replicates", "must be >= 1");
    ex.reference_length = static_cast<int>(obj.integer("reference_length", 10000, false));
    if (ex.reference_length < 1) ctx.error(obj.path() + "/reference_length", "must be >= 1");
    ex.baseline_proposal_std = obj.positive("baseline_proposal_std", ex.baseline_proposal_std, false);
    if (ex.type == "variance") {
      ex.integrand = obj.str("integrand", "kernel_at_origin", false);
      if (ex.integrand != "kernel_at_origin")
        ctx.error(obj.path() + "/integrand", "unknown integrand '" + ex.integrand + "'");
    }
  } else if (ex.type == "crystallize") {
    parse_schedules(three_schedules);
    ex.replicates = static_cast<int>(obj.integer("seeds", 5, false));
    if (ex.replicates < 1) ctx.error(obj.path() + "/seeds", "must be >= 1");
  } else if (ex.type == "concentration") {
    parse_schedules(three_schedules);
    ex.replicates = static_cast<int>(obj.integer("replicates", 100, false));
    if (ex.replicates < 1) ctx.error(obj.path() + "/replicates", "must be >= 1");
    ex.reference_length = static_cast<int>(obj.integer("reference_length", 10000, false));
    ex.baseline_proposal_std = obj.positive("baseline_proposal_std", ex.baseline_proposal_std, false);
    if (const json* grid = obj.raw("r_grid")) {
      if (!grid->is_array())
        ctx.error(obj.path() + "/r_grid", "expected an array of positive numbers");
      else
        for (const auto& v : *grid) {
          if (!v.is_number() || !(v.get<double>() >= 0.0)) {
            ctx.error(obj.path() + "/r_grid", "expected non-negative numbers");
            break;
          }
          ex.r_grid.push_back(v.get<double>());
        }
    }
  } else if (ex.type == "multimodal") {
    ex.replicates = static_cast<int>(obj.integer("seeds", 5, false));
    if (ex.replicates < 1) ctx.error(obj.path() + "/seeds", "must be >= 1");
    if (const json* snaps = obj.raw("snapshots")) {
      if (!snaps->is_array() || snaps->empty())
        ctx.error(obj.path() + "/snapshots", "expected a non-empty array of iteration numbers");
      else
        for (const auto& v : *snaps) {
          if (!v.is_number_integer() && !v.is_number_unsigned()) {
            ctx.error(obj.path() + "/snapshots", "expected integers");
            break;
          }
          ex.snapshots.push_back(v.get<int>());
        }
    } else {
      ex.snapshots = {5000, 10000, 15000};
    }
    if (const json* variants = obj.raw("variants")) {
      if (!variants->is_array() || variants->empty())
        ctx.error(obj.path() + "/variants", "expected a non-empty array");
      else
        for (const auto& v : *variants) {
          const std::string name = v.is_string() ? v.get<std::string>() : "";
          if (name != "cold" && name != "warm" && name != "annealed") {
            ctx.error(obj.path() + "/variants", "expected 'cold', 'warm' or 'annealed'");
            break;
          }
          ex.variants.push_back(name);
        }
    } else {
      ex.variants = {"cold", "warm", "annealed"};
    }
  }
  obj.finish();
  return ex;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&problems] {
        std::ostringstream os;
        os << "invalid config (" << problems.size() << " problem"
           << (problems.size() == 1 ? "" : "s") << "):";
        for (const auto& p : problems) os << "\n  " << p;
        return os.str();
      }()),
      errors(std::move(problems)) {}

RunConfig parse_config_json(const json& doc) {
  Ctx ctx;
  Obj top(&doc, "", ctx);
  RunConfig cfg;

  int dim = 1;
  cfg.target = parse_target(Obj(top.raw("target"), "/target", ctx), ctx, dim);
  cfg.kernel = parse_kernel(Obj(top.raw("kernel"), "/kernel", ctx), dim, ctx);
  parse_gibbs(Obj(top.raw("gibbs"), "/gibbs", ctx), dim, cfg.gibbs, cfg.potential, ctx);
  cfg.experiment = parse_experiment(Obj(top.raw("experiment"), "/experiment", ctx), ctx);
  cfg.output_dir = top.str("output_dir", "out", true);
  cfg.seed = top.uint64("seed", 0, true);
  cfg.gibbs.seed = cfg.seed;
  top.finish();

  if (!ctx.errors.empty()) throw ConfigError(std::move(ctx.errors));
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open config file"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return parse_config_json(doc);
}

std::string beta_schedule_to_string(const TemperatureSchedule& schedule) {
  return schedule.label();
}

namespace {

json schedule_to_json(const TemperatureSchedule& s) {
  if (s.tag == TemperatureSchedule::Tag::Explicit) return s.explicit_value;
  return s.label();
}

}  // namespace

json RunConfig::canonical() const {
  json doc;

  json k;
  k["family"] = kernel_family_name(kernel.family);
  if (kernel.family == KernelFamily::Gaussian) k["lengthscale"] = kernel.lengthscale;
  if (kernel.family != KernelFamily::Gaussian) k["epsilon"] = kernel.epsilon;
  if (kernel.family == KernelFamily::TruncatedRiesz ||
      kernel.family == KernelFamily::TruncatedMultiquadric)
    k["exponent"] = kernel.exponent;
  k["weight"] = kernel.weight;
  doc["kernel"] = std::move(k);

  json t;
  t["family"] = target_family_name(target.family);
  t["dim"] = target.dim;
  if (target.family == TargetFamily::UniformBall) {
    t["radius"] = target.radius;
  } else if (target.family == TargetFamily::TruncatedGaussian) {
    const auto& comp = target.components.front();
    t["center"] = comp.center;
    t["variance"] = comp.variance;
    t["trunc_radius"] = comp.trunc_radius;
  } else {
    json comps = json::array();
    for (const auto& comp : target.components) {
      json c;
      c["center"] = comp.center;
      c["variance"] = comp.variance;
      c["trunc_radius"] = comp.trunc_radius;
      c["weight"] = comp.weight;
      comps.push_back(std::move(c));
    }
    t["components"] = std::move(comps);
  }
  doc["target"] = std::move(t);

  json g;
  g["n"] = gibbs.n;
  g["beta"] = schedule_to_json(gibbs.temperature);
  g["alpha0"] = gibbs.alpha0;
  g["iterations"] = gibbs.iterations;
  g["autotune"] = gibbs.autotune;
  json init;
  switch (gibbs.init.kind) {
    case InitSpec::Kind::ColdGaussian:
      init["kind"] = "cold_gaussian";
      init["mean"] = gibbs.init.mean;
      init["std"] = gibbs.init.stddev;
      break;
    case InitSpec::Kind::WarmFromTarget:
      init["kind"] = "warm_from_target";
      break;
    case InitSpec::Kind::FromFile:
      init["kind"] = "from_file";
      init["path"] = gibbs.init.path;
      break;
  }
  g["init"] = std::move(init);
  json pot;
  if (potential.kind == PotentialSpec::Kind::Quadratic) {
    pot["type"] = "quadratic";
    pot["coeff"] = potential.coeff;
  } else {
    pot["type"] = "equilibrated";
    pot["m"] = potential.embedding.count;
    pot["proposal_std"] = potential.embedding.proposal_std;
  }
  g["potential"] = std::move(pot);
  if (gibbs.anneal_rungs > 0) g["anneal"] = json{{"rungs", gibbs.anneal_rungs}};
  doc["gibbs"] = std::move(g);

  json ex;
  ex["type"] = experiment.type;
  if (experiment.type == "energy-decay" || experiment.type == "variance") {
    ex["n_grid"] = experiment.n_grid;
    ex["replicates"] = experiment.replicates;
    ex["reference_length"] = experiment.reference_length;
    ex["baseline_proposal_std"] = experiment.baseline_proposal_std;
    if (experiment.type == "variance") ex["integrand"] = experiment.integrand;
  } else if (experiment.type == "crystallize") {
    json scheds = json::array();
    for (const auto& s : experiment.schedules) scheds.push_back(schedule_to_json(s));
    ex["schedules"] = std::move(scheds);
    ex["seeds"] = experiment.replicates;
  } else if (experiment.type == "concentration") {
    json scheds = json::array();
    for (const auto& s : experiment.schedules) scheds.push_back(schedule_to_json(s));
    ex["schedules"] = std::move(scheds);
    ex["replicates"] = experiment.replicates;
    ex["reference_length"] = experiment.reference_length;
    ex["baseline_proposal_std"] = experiment.baseline_proposal_std;
    if (!experiment.r_grid.empty()) ex["r_grid"] = experiment.r_grid;
  } else if (experiment.type == "multimodal") {
    ex["seeds"] = experiment.replicates;
    ex["snapshots"] = experiment.snapshots;
    ex["variants"] = experiment.variants;
  }
  doc["experiment"] = std::move(ex);

  doc["output_dir"] = output_dir;
  doc["seed"] = seed;
  return doc;
}

std::string RunConfig::canonical_text() const { return canonical().dump(2) + "\n"; }

std::string RunConfig::config_hash() const {
  const std::uint64_t h = rng::fnv1a64(canonical_text());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rq
