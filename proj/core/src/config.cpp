#include "temperflow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "temperflow/csv.hpp"
#include "temperflow/errors.hpp"

namespace temperflow {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at '" + path + "': " + what);
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      fail(path + "." + item.key(), "unknown key");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < 0) fail(path, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = get_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a matrix (array of rows)");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = get_vector(j[r], path + "[" + std::to_string(r) + "]");
    if (r == 0) {
      cols = static_cast<std::size_t>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<std::size_t>(row.size()) != cols) {
      fail(path, "ragged matrix rows");
    }
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

template <typename T, typename Getter>
std::vector<T> get_list(const json& j, const std::string& path, Getter get) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<T> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

GaussianDist parse_gaussian(const json& j, const std::string& path) {
  check_keys(j, path, {"mean", "cov"});
  if (!j.contains("mean") || !j.contains("cov")) fail(path, "needs mean and cov");
  try {
    return GaussianDist::make(get_vector(j.at("mean"), path + ".mean"),
                              get_matrix(j.at("cov"), path + ".cov"));
  } catch (const ModelError& e) {
    fail(path, e.what());
  }
}

ModelConfig parse_model(const json& j, const std::string& path) {
  check_keys(j, path, {"mu0", "pi"});
  if (!j.contains("mu0") || !j.contains("pi")) fail(path, "needs mu0 and pi");
  ModelConfig out;
  out.mu0 = parse_gaussian(j.at("mu0"), path + ".mu0");

  const json& pi = j.at("pi");
  if (!pi.is_object()) fail(path + ".pi", "expected an object");
  const std::string kind =
      pi.contains("kind") ? get_string(pi.at("kind"), path + ".pi.kind") : "gaussian";
  if (kind == "gaussian") {
    check_keys(pi, path + ".pi", {"kind", "mean", "cov"});
    json g = pi;
    g.erase("kind");
    out.pi = parse_gaussian(g, path + ".pi");
    out.pi_is_mixture = false;
  } else if (kind == "mixture") {
    check_keys(pi, path + ".pi", {"kind", "m"});
    if (!pi.contains("m")) fail(path + ".pi", "mixture needs m");
    out.pi_is_mixture = true;
    out.mixture_m = get_number(pi.at("m"), path + ".pi.m");
  } else {
    fail(path + ".pi.kind", "must be 'gaussian' or 'mixture'");
  }
  return out;
}

ScheduleConfig parse_schedule(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "T", "rate", "beta_param", "dt"});
  ScheduleConfig out;
  if (j.contains("kind")) out.kind = get_string(j.at("kind"), path + ".kind");
  static const std::set<std::string> kinds = {
      "constant", "linear", "exponential", "chehab", "grad_flow", "constant_kl", "ess"};
  if (!kinds.count(out.kind)) fail(path + ".kind", "unknown schedule kind '" + out.kind + "'");
  if (j.contains("T")) out.horizon = get_number(j.at("T"), path + ".T");
  if (j.contains("rate")) out.rate = get_number(j.at("rate"), path + ".rate");
  if (j.contains("beta_param")) out.beta_param = get_number(j.at("beta_param"), path + ".beta_param");
  if (j.contains("dt")) out.dt = get_number(j.at("dt"), path + ".dt");
  return out;
}

SamplerBlock parse_sampler(const json& j, const std::string& path) {
  check_keys(j, path,
             {"algorithm", "N", "gamma", "gammas", "iterations", "seed",
              "resample", "ess_threshold", "snapshot_stride"});
  SamplerBlock out;
  if (j.contains("algorithm")) out.algorithm = get_string(j.at("algorithm"), path + ".algorithm");
  if (j.contains("N")) out.n_particles = get_int(j.at("N"), path + ".N");
  if (j.contains("gamma")) out.gamma = get_number(j.at("gamma"), path + ".gamma");
  if (j.contains("gammas")) {
    out.gammas = get_list<double>(j.at("gammas"), path + ".gammas", get_number);
  }
  if (j.contains("iterations")) out.iterations = get_int(j.at("iterations"), path + ".iterations");
  if (j.contains("seed")) out.seed = get_u64(j.at("seed"), path + ".seed");
  if (j.contains("resample")) {
    const std::string mode = get_string(j.at("resample"), path + ".resample");
    if (mode == "every_step") {
      out.resample_every_step = true;
    } else if (mode == "ess_threshold") {
      out.resample_every_step = false;
    } else {
      fail(path + ".resample", "must be 'every_step' or 'ess_threshold'");
    }
  }
  if (j.contains("ess_threshold")) {
    out.ess_threshold = get_number(j.at("ess_threshold"), path + ".ess_threshold");
    if (!(out.ess_threshold > 0.0) || out.ess_threshold > 1.0) {
      fail(path + ".ess_threshold", "must lie in (0, 1]");
    }
  }
  if (j.contains("snapshot_stride")) {
    out.snapshot_stride = get_int(j.at("snapshot_stride"), path + ".snapshot_stride");
  }
  return out;
}

MetricsBlock parse_metrics(const json& j, const std::string& path) {
  check_keys(j, path, {"bandwidth", "estimator", "ref_size", "threshold"});
  MetricsBlock out;
  if (j.contains("bandwidth")) out.bandwidth = get_number(j.at("bandwidth"), path + ".bandwidth");
  if (j.contains("estimator")) {
    out.estimator = get_string(j.at("estimator"), path + ".estimator");
    if (out.estimator != "v_statistic" && out.estimator != "u_statistic") {
      fail(path + ".estimator", "must be 'v_statistic' or 'u_statistic'");
    }
  }
  if (j.contains("ref_size")) out.ref_size = get_int(j.at("ref_size"), path + ".ref_size");
  if (j.contains("threshold")) out.threshold = get_number(j.at("threshold"), path + ".threshold");
  return out;
}

MixtureBlock parse_mixture(const json& j, const std::string& path) {
  check_keys(j, path,
             {"m_grid", "replications", "schedules", "exponential_rate",
              "m_grid_paper", "replications_paper"});
  MixtureBlock out;
  if (j.contains("m_grid")) out.m_grid = get_list<double>(j.at("m_grid"), path + ".m_grid", get_number);
  if (j.contains("replications")) out.replications = get_int(j.at("replications"), path + ".replications");
  if (j.contains("schedules")) {
    out.schedules = get_list<std::string>(j.at("schedules"), path + ".schedules", get_string);
  }
  if (j.contains("exponential_rate")) {
    out.exponential_rate = get_number(j.at("exponential_rate"), path + ".exponential_rate");
  }
  if (j.contains("m_grid_paper")) {
    out.m_grid_paper = get_list<double>(j.at("m_grid_paper"), path + ".m_grid_paper", get_number);
  }
  if (j.contains("replications_paper")) {
    out.replications_paper = get_int(j.at("replications_paper"), path + ".replications_paper");
  }
  return out;
}

SmcBlock parse_smc(const json& j, const std::string& path) {
  check_keys(j, path, {"gammas", "horizons", "N", "seeds", "ode_dt"});
  SmcBlock out;
  if (j.contains("gammas")) out.gammas = get_list<double>(j.at("gammas"), path + ".gammas", get_number);
  if (j.contains("horizons")) out.horizons = get_list<double>(j.at("horizons"), path + ".horizons", get_number);
  if (j.contains("N")) out.n_particles = get_int(j.at("N"), path + ".N");
  if (j.contains("seeds")) out.seeds = get_list<std::uint64_t>(j.at("seeds"), path + ".seeds", get_u64);
  if (j.contains("ode_dt")) out.ode_dt = get_number(j.at("ode_dt"), path + ".ode_dt");
  if (out.gammas.size() != out.horizons.size()) {
    fail(path, "gammas and horizons must have equal length");
  }
  return out;
}

AdaptiveBlock parse_adaptive(const json& j, const std::string& path) {
  check_keys(j, path, {"strategies", "beta_param", "seeds"});
  AdaptiveBlock out;
  if (j.contains("strategies")) {
    out.strategies = get_list<std::string>(j.at("strategies"), path + ".strategies", get_string);
  }
  if (j.contains("beta_param")) out.beta_param = get_number(j.at("beta_param"), path + ".beta_param");
  if (j.contains("seeds")) out.seeds = get_list<std::uint64_t>(j.at("seeds"), path + ".seeds", get_u64);
  return out;
}

FlowBlock parse_flow(const json& j, const std::string& path) {
  check_keys(j, path, {"t_end", "dt", "kinds"});
  FlowBlock out;
  if (j.contains("t_end")) out.t_end = get_number(j.at("t_end"), path + ".t_end");
  if (j.contains("dt")) out.dt = get_number(j.at("dt"), path + ".dt");
  if (j.contains("kinds")) {
    out.kinds = get_list<std::string>(j.at("kinds"), path + ".kinds", get_string);
    static const std::set<std::string> known = {"w", "fr", "wfr", "tw", "tfr", "twfr"};
    for (const auto& k : out.kinds) {
      if (!known.count(k)) fail(path + ".kinds", "unknown flow kind '" + k + "'");
    }
  }
  return out;
}

BoundsBlock parse_bounds(const json& j, const std::string& path) {
  check_keys(j, path, {"t_max", "t_step", "ode_dt"});
  BoundsBlock out;
  if (j.contains("t_max")) out.t_max = get_number(j.at("t_max"), path + ".t_max");
  if (j.contains("t_step")) out.t_step = get_number(j.at("t_step"), path + ".t_step");
  if (j.contains("ode_dt")) out.ode_dt = get_number(j.at("ode_dt"), path + ".ode_dt");
  return out;
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "flows") return ExperimentKind::flows;
  if (s == "mixture") return ExperimentKind::mixture;
  if (s == "smc_compare") return ExperimentKind::smc_compare;
  if (s == "schedules") return ExperimentKind::schedules;
  if (s == "bounds") return ExperimentKind::bounds;
  if (s == "sample") return ExperimentKind::sample;
  fail("experiment", "unknown experiment '" + s + "'");
}

}  // namespace

TargetPair ModelConfig::build() const {
  if (pi_is_mixture) return build_with_mixture_m(mixture_m);
  return TargetPair::gaussian(mu0, pi);
}

TargetPair ModelConfig::build_with_mixture_m(double m) const {
  return TargetPair::gaussian_mixture(mu0, MixtureTarget{m});
}

bool ScheduleConfig::is_fixed() const {
  return kind == "constant" || kind == "linear" || kind == "exponential" ||
         kind == "chehab";
}

FixedSchedule ScheduleConfig::fixed() const {
  if (kind == "constant") return FixedSchedule::constant_one();
  if (kind == "linear") return FixedSchedule::linear(horizon);
  if (kind == "exponential") return FixedSchedule::exponential(rate);
  if (kind == "chehab") return FixedSchedule::chehab();
  throw ConfigError("schedule kind '" + kind + "' is adaptive, not fixed");
}

SamplerConfig SamplerBlock::build(const FixedSchedule& schedule) const {
  SamplerConfig cfg;
  cfg.n_particles = n_particles;
  cfg.gamma = gamma;
  cfg.gammas = gammas;
  cfg.schedule = schedule;
  cfg.seed = seed;
  cfg.iterations = iterations;
  cfg.resample = resample_every_step ? ResampleMode::always()
                                     : ResampleMode::on_ess(ess_threshold);
  cfg.snapshot_stride = snapshot_stride;
  return cfg;
}

Algorithm SamplerBlock::parsed_algorithm() const {
  if (algorithm == "tula") return Algorithm::tula;
  if (algorithm == "smc_twfr") return Algorithm::smc_twfr;
  if (algorithm == "tempering_smc") return Algorithm::tempering_smc;
  throw ConfigError("unknown sampler algorithm '" + algorithm + "'");
}

MmdConfig build_mmd_config(const MetricsBlock& m, int fallback_ref) {
  MmdConfig cfg;
  cfg.bandwidth = m.bandwidth;
  cfg.estimator = m.estimator == "u_statistic" ? MmdEstimator::u_statistic
                                               : MmdEstimator::v_statistic;
  cfg.ref_size = m.ref_size > 0 ? m.ref_size : fallback_ref;
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "<root>",
             {"experiment", "model", "schedule", "sampler", "metrics", "mixture",
              "smc", "adaptive", "flow", "bounds", "output", "paper_scale"});
  if (!j.contains("experiment")) fail("experiment", "missing");
  if (!j.contains("model")) fail("model", "missing");

  ExperimentConfig cfg;
  cfg.experiment = parse_kind(get_string(j.at("experiment"), "experiment"));
  cfg.model = parse_model(j.at("model"), "model");
  if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"), "schedule");
  if (j.contains("sampler")) cfg.sampler = parse_sampler(j.at("sampler"), "sampler");
  if (j.contains("metrics")) cfg.metrics = parse_metrics(j.at("metrics"), "metrics");
  if (j.contains("mixture")) cfg.mixture = parse_mixture(j.at("mixture"), "mixture");
  if (j.contains("smc")) cfg.smc = parse_smc(j.at("smc"), "smc");
  if (j.contains("adaptive")) cfg.adaptive = parse_adaptive(j.at("adaptive"), "adaptive");
  if (j.contains("flow")) cfg.flow = parse_flow(j.at("flow"), "flow");
  if (j.contains("bounds")) cfg.bounds = parse_bounds(j.at("bounds"), "bounds");
  if (j.contains("output")) {
    check_keys(j.at("output"), "output", {"dir"});
    if (j.at("output").contains("dir")) {
      cfg.out_dir = get_string(j.at("output").at("dir"), "output.dir");
    }
  }
  if (j.contains("paper_scale")) {
    if (!j.at("paper_scale").is_boolean()) fail("paper_scale", "expected a boolean");
    cfg.paper_scale = j.at("paper_scale").get<bool>();
  }

  // Cross-block requirements.
  const bool stochastic = cfg.experiment == ExperimentKind::mixture ||
                          cfg.experiment == ExperimentKind::smc_compare ||
                          cfg.experiment == ExperimentKind::schedules ||
                          cfg.experiment == ExperimentKind::sample;
  if (stochastic && cfg.experiment == ExperimentKind::sample && !j.contains("sampler")) {
    fail("sampler", "the sample experiment needs an explicit sampler block");
  }
  if ((cfg.experiment == ExperimentKind::mixture ||
       cfg.experiment == ExperimentKind::schedules) &&
      !cfg.model.pi_is_mixture) {
    fail("model.pi", "this experiment needs the mixture target");
  }
  if ((cfg.experiment == ExperimentKind::flows ||
       cfg.experiment == ExperimentKind::smc_compare ||
       cfg.experiment == ExperimentKind::bounds) &&
      cfg.model.pi_is_mixture) {
    fail("model.pi", "this experiment needs a Gaussian target");
  }

  cfg.config_hash = fnv1a64(text.data(), text.size());
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace temperflow
