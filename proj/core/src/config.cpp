#include "acc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "acc/errors.hpp"
#include "acc/kernels.hpp"

namespace acc {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

ModelSpec parse_model(const json& j) {
  reject_unknown(j, {"name", "n", "theta0", "unknown", "summary", "known_location", "known_scale", "burn_in"},
                 "model");
  ModelSpec m;
  read(j, "name", m.name, "model");
  read(j, "n", m.n, "model");
  read(j, "theta0", m.theta0, "model");
  read(j, "unknown", m.unknown, "model");
  read(j, "summary", m.summary, "model");
  read(j, "known_location", m.known_location, "model");
  read(j, "known_scale", m.known_scale, "model");
  read(j, "burn_in", m.burn_in, "model");
  return m;
}

DistributionSpec parse_distribution(const json& j, const std::string& where) {
  reject_unknown(j,
                 {"kind", "box_multiple", "scale_factor", "box_half_width", "mu", "b", "df", "location", "scale",
                  "nu", "subset_size", "batches", "policy", "stride", "estimator", "estimator_offset",
                  "refine_particles", "refine_iterations", "refine_initial_quantile", "refine_final_quantile"},
                 where);
  DistributionSpec d;
  read(j, "kind", d.kind, where);
  read(j, "box_multiple", d.box_multiple, where);
  read(j, "scale_factor", d.scale_factor, where);
  read(j, "box_half_width", d.box_half_width, where);
  read(j, "mu", d.mu, where);
  read(j, "b", d.b, where);
  read(j, "df", d.df, where);
  read(j, "location", d.location, where);
  read(j, "scale", d.scale, where);
  read(j, "nu", d.nu, where);
  read(j, "subset_size", d.subset_size, where);
  read(j, "batches", d.batches, where);
  read(j, "policy", d.policy, where);
  read(j, "stride", d.stride, where);
  read(j, "estimator", d.estimator, where);
  read(j, "estimator_offset", d.estimator_offset, where);
  read(j, "refine_particles", d.refine_particles, where);
  read(j, "refine_iterations", d.refine_iterations, where);
  read(j, "refine_initial_quantile", d.refine_initial_quantile, where);
  read(j, "refine_final_quantile", d.refine_final_quantile, where);
  return d;
}

json distribution_json(const DistributionSpec& d) {
  return json{{"kind", d.kind},
              {"box_multiple", d.box_multiple},
              {"scale_factor", d.scale_factor},
              {"box_half_width", d.box_half_width},
              {"mu", d.mu},
              {"b", d.b},
              {"df", d.df},
              {"location", d.location},
              {"scale", d.scale},
              {"nu", d.nu},
              {"subset_size", d.subset_size},
              {"batches", d.batches},
              {"policy", d.policy},
              {"stride", d.stride},
              {"estimator", d.estimator},
              {"estimator_offset", d.estimator_offset},
              {"refine_particles", d.refine_particles},
              {"refine_iterations", d.refine_iterations},
              {"refine_initial_quantile", d.refine_initial_quantile},
              {"refine_final_quantile", d.refine_final_quantile}};
}

void validate_distribution(const DistributionSpec& d, const std::string& where, bool is_prior) {
  static const std::set<std::string> kinds{"flat",    "one_over_sigma", "location_scale",    "normal",
                                           "student_t", "minibatch",    "refined_minibatch", "prior"};
  if (!kinds.count(d.kind)) throw ValidationError(where + ": unknown kind '" + d.kind + "'");
  if (is_prior && (d.kind == "prior" || d.kind == "minibatch" || d.kind == "refined_minibatch")) {
    throw ValidationError(where + ": kind '" + d.kind + "' cannot serve as a prior");
  }
  if (!(d.box_multiple > 0.0)) throw ValidationError(where + ": box_multiple must be positive");
  if (!(d.scale_factor > 1.0)) throw ValidationError(where + ": scale_factor must exceed 1");
  if (!(d.box_half_width >= 0.0)) throw ValidationError(where + ": box_half_width must be non-negative");
  if (d.kind == "normal" && !(d.b > 0.0)) throw ValidationError(where + ": normal needs b > 0");
  if (d.kind == "student_t" && (!(d.df > 0.0) || !(d.scale > 0.0))) {
    throw ValidationError(where + ": student_t needs df > 0 and scale > 0");
  }
  if (d.kind == "minibatch" || d.kind == "refined_minibatch") {
    if (!(d.nu > 0.0 && d.nu < 1.0)) throw ValidationError(where + ": nu must lie in (0, 1)");
    static const std::set<std::string> policies{"auto", "disjoint", "overlapping"};
    if (!policies.count(d.policy)) throw ValidationError(where + ": unknown policy '" + d.policy + "'");
    if (d.stride == 0) throw ValidationError(where + ": stride must be positive");
    static const std::set<std::string> estimators{"median", "mad", "median_mad", "mean", "msl"};
    if (!estimators.count(d.estimator)) {
      throw ValidationError(where + ": unknown estimator '" + d.estimator + "'");
    }
  }
  if (d.kind == "refined_minibatch") {
    if (d.refine_particles < 10) throw ValidationError(where + ": refine_particles must be at least 10");
    if (!(d.refine_final_quantile > 0.0 && d.refine_final_quantile < d.refine_initial_quantile &&
          d.refine_initial_quantile < 1.0)) {
      throw ValidationError(where + ": refine quantiles must satisfy 0 < final < initial < 1");
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::set<std::string> models{"gaussian", "cauchy", "ricker"};
  if (!models.count(model.name)) throw ValidationError("unknown model '" + model.name + "'");
  if (model.name == "ricker" ? model.n < 6 : model.n < 4) throw ValidationError("model.n is too small");
  std::size_t p = 1;
  if (model.name == "ricker") p = 3;
  if (model.name == "cauchy") {
    parse_cauchy_summary(model.summary);
    if (parse_cauchy_unknown(model.unknown) == CauchyUnknown::joint) p = 2;
    if (!(model.known_scale > 0.0)) throw ValidationError("model.known_scale must be positive");
  }
  if (model.theta0.size() != p) {
    throw ValidationError("model.theta0 needs " + std::to_string(p) + " values");
  }
  for (double t : model.theta0) {
    if (!std::isfinite(t)) throw ValidationError("model.theta0 must be finite");
  }
  validate_distribution(initial, "initial", false);
  validate_distribution(prior, "prior", true);
  if (methods.empty()) throw ValidationError("at least one method is required");
  for (const auto& m : methods) {
    if (m.algorithm != "r-abc" && m.algorithm != "r-acc" && m.algorithm != "is-abc") {
      throw ValidationError("unknown algorithm '" + m.algorithm + "'");
    }
    if (m.interval != "auto" && m.interval != "reflected" && m.interval != "percentile") {
      throw ValidationError("unknown interval form '" + m.interval + "'");
    }
  }
  parse_kernel_family(sampler.kernel);
  if (sampler.acceptance.empty() == sampler.epsilons.empty()) {
    throw ValidationError("sampler needs exactly one of 'acceptance' and 'epsilons'");
  }
  for (double q : sampler.acceptance) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("acceptance proportions must lie in (0, 1)");
  }
  for (double e : sampler.epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ValidationError("epsilons must be positive");
  }
  if (sampler.target_accepted == 0 && sampler.n_proposals == 0) {
    throw ValidationError("sampler.n_proposals must be positive");
  }
  if (sampler.target_accepted != 0 && !sampler.acceptance.empty()) {
    throw ValidationError("target_accepted applies to fixed epsilons only");
  }
  if (sampler.max_attempts != 0 && sampler.max_attempts < sampler.target_accepted) {
    throw ValidationError("sampler.max_attempts is below target_accepted");
  }
  if (alphas.empty()) throw ValidationError("at least one alpha is required");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ValidationError("alphas must lie in (0, 1)");
  }
  if (region != "auto" && region != "intervals" && region != "depth") {
    throw ValidationError("unknown region kind '" + region + "'");
  }
  if (region == "depth" && p == 1) throw ValidationError("depth regions need more than one parameter");
  if (replications == 0) throw ValidationError("replications must be positive");
  if (workers == 0) throw ValidationError("workers must be positive");
  if (oracle && model.name != "gaussian") throw ValidationError("the oracle applies to the gaussian model");
  if (synthetic.replicates < 15 && model.name == "ricker") {
    throw ValidationError("synthetic.replicates must be at least d + 2 = 15");
  }
}

ExperimentConfig parse_config(const std::string& json_text, bool paper_scale) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed configuration: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("configuration must be a JSON object");
  if (paper_scale && doc.contains("paper_scale")) doc.merge_patch(doc.at("paper_scale"));
  doc.erase("paper_scale");
  reject_unknown(doc,
                 {"setting", "model", "initial", "prior", "methods", "sampler", "alphas", "region", "replications",
                  "seed", "workers", "oracle", "synthetic", "output", "description"},
                 "configuration");

  ExperimentConfig c;
  read(doc, "setting", c.setting, "configuration");
  if (doc.contains("model")) c.model = parse_model(doc.at("model"));
  if (doc.contains("initial")) c.initial = parse_distribution(doc.at("initial"), "initial");
  if (doc.contains("prior")) c.prior = parse_distribution(doc.at("prior"), "prior");
  if (doc.contains("methods")) {
    const json& list = doc.at("methods");
    if (!list.is_array()) throw ValidationError("methods must be an array");
    for (const auto& m : list) {
      reject_unknown(m, {"algorithm", "adjust", "interval"}, "method");
      MethodSpec spec;
      read(m, "algorithm", spec.algorithm, "method");
      read(m, "adjust", spec.adjust, "method");
      read(m, "interval", spec.interval, "method");
      c.methods.push_back(spec);
    }
  }
  if (doc.contains("sampler")) {
    const json& s = doc.at("sampler");
    reject_unknown(s, {"kernel", "n_proposals", "acceptance", "epsilons", "target_accepted", "max_attempts"},
                   "sampler");
    read(s, "kernel", c.sampler.kernel, "sampler");
    read(s, "n_proposals", c.sampler.n_proposals, "sampler");
    read(s, "acceptance", c.sampler.acceptance, "sampler");
    read(s, "epsilons", c.sampler.epsilons, "sampler");
    read(s, "target_accepted", c.sampler.target_accepted, "sampler");
    read(s, "max_attempts", c.sampler.max_attempts, "sampler");
  }
  read(doc, "alphas", c.alphas, "configuration");
  read(doc, "region", c.region, "configuration");
  read(doc, "replications", c.replications, "configuration");
  read(doc, "seed", c.seed, "configuration");
  read(doc, "workers", c.workers, "configuration");
  read(doc, "oracle", c.oracle, "configuration");
  if (doc.contains("synthetic")) {
    const json& s = doc.at("synthetic");
    reject_unknown(s, {"replicates", "max_evaluations", "restarts", "restart_spread", "initial_step"}, "synthetic");
    read(s, "replicates", c.synthetic.replicates, "synthetic");
    read(s, "max_evaluations", c.synthetic.max_evaluations, "synthetic");
    read(s, "restarts", c.synthetic.restarts, "synthetic");
    read(s, "restart_spread", c.synthetic.restart_spread, "synthetic");
    read(s, "initial_step", c.synthetic.initial_step, "synthetic");
  }
  read(doc, "output", c.output, "configuration");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, bool paper_scale) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open configuration '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), paper_scale);
}

std::string config_to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (const auto& m : c.methods) {
    methods.push_back({{"algorithm", m.algorithm}, {"adjust", m.adjust}, {"interval", m.interval}});
  }
  const json doc{
      {"setting", c.setting},
      {"model",
       {{"name", c.model.name},
        {"n", c.model.n},
        {"theta0", c.model.theta0},
        {"unknown", c.model.unknown},
        {"summary", c.model.summary},
        {"known_location", c.model.known_location},
        {"known_scale", c.model.known_scale},
        {"burn_in", c.model.burn_in}}},
      {"initial", distribution_json(c.initial)},
      {"prior", distribution_json(c.prior)},
      {"methods", methods},
      {"sampler",
       {{"kernel", c.sampler.kernel},
        {"n_proposals", c.sampler.n_proposals},
        {"acceptance", c.sampler.acceptance},
        {"epsilons", c.sampler.epsilons},
        {"target_accepted", c.sampler.target_accepted},
        {"max_attempts", c.sampler.max_attempts}}},
      {"alphas", c.alphas},
      {"region", c.region},
      {"replications", c.replications},
      {"seed", c.seed},
      {"workers", c.workers},
      {"oracle", c.oracle},
      {"synthetic",
       {{"replicates", c.synthetic.replicates},
        {"max_evaluations", c.synthetic.max_evaluations},
        {"restarts", c.synthetic.restarts},
        {"restart_spread", c.synthetic.restart_spread},
        {"initial_step", c.synthetic.initial_step}}},
      {"output", c.output}};
  return doc.dump(2);
}

}  // namespace acc
