#include "linf/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "linf/errors.hpp"
#include "linf/evt.hpp"
#include "linf/rng.hpp"
#include "linf/signal_model.hpp"

namespace linf {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_seconds(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing key \"" + key + "\" in " + where);
  if (!obj[key].is_number()) throw ConfigError("key \"" + key + "\" in " + where + " must be a number");
  return obj[key].get<double>();
}

PriorSpec parse_prior(const json& obj) {
  if (!obj.is_object() || !obj.contains("type"))
    throw ConfigError("prior must be an object with a \"type\"");
  const std::string type = obj["type"].get<std::string>();
  if (type == "mixture-gaussian") {
    reject_unknown_keys(obj, {"type", "weights", "variances"}, "prior");
    MixtureGaussianPrior prior;
    if (!obj.contains("weights") || !obj.contains("variances"))
      throw ConfigError("mixture-gaussian prior needs \"weights\" and \"variances\"");
    prior.weights = obj["weights"].get<std::vector<double>>();
    prior.variances = obj["variances"].get<std::vector<double>>();
    return prior;
  }
  if (type == "sparse-gaussian") {
    reject_unknown_keys(obj, {"type", "sparsity", "variance"}, "prior");
    SparseGaussianPrior prior;
    prior.sparsity = require_number(obj, "sparsity", "prior");
    prior.variance = require_number(obj, "variance", "prior");
    return prior;
  }
  if (type == "sparse-weibull") {
    reject_unknown_keys(obj, {"type", "sparsity", "scale", "shape"}, "prior");
    SparseWeibullPrior prior;
    prior.sparsity = require_number(obj, "sparsity", "prior");
    prior.scale = require_number(obj, "scale", "prior");
    prior.shape = require_number(obj, "shape", "prior");
    return prior;
  }
  throw ConfigError("unknown prior type \"" + type + "\"");
}

struct ParsedChannel {
  bool gaussian = true;
  std::optional<double> variance;
  double alpha = 0.0;
};

ParsedChannel parse_channel(const json& obj) {
  if (!obj.is_object() || !obj.contains("type"))
    throw ConfigError("channel must be an object with a \"type\"");
  const std::string type = obj["type"].get<std::string>();
  ParsedChannel ch;
  if (type == "gaussian") {
    reject_unknown_keys(obj, {"type", "variance"}, "channel");
    if (obj.contains("variance")) ch.variance = require_number(obj, "variance", "channel");
    return ch;
  }
  if (type == "poisson") {
    reject_unknown_keys(obj, {"type", "alpha"}, "channel");
    ch.gaussian = false;
    ch.alpha = require_number(obj, "alpha", "channel");
    return ch;
  }
  throw ConfigError("unknown channel type \"" + type + "\"");
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "scalar-mixture") return ExperimentKind::ScalarMixture;
  if (name == "scalar-sparse") return ExperimentKind::ScalarSparse;
  if (name == "lms") return ExperimentKind::Lms;
  if (name == "popt-sweep") return ExperimentKind::PoptSweep;
  if (name == "evt-check") return ExperimentKind::EvtCheck;
  throw ConfigError("unknown experiment kind \"" + name + "\"");
}

void validate_config(const ExperimentConfig& cfg) {
  validate(cfg.prior);
  validate(cfg.channel);
  if (cfg.n_values.empty()) throw ConfigError("n list must be nonempty");
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    if (cfg.n_values[i] < 1) throw ConfigError("n values must be >= 1");
    if (i > 0 && cfg.n_values[i] <= cfg.n_values[i - 1])
      throw ConfigError("n list must be strictly increasing");
  }
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.pipeline != "scalar" && cfg.pipeline != "lms")
    throw ConfigError("pipeline must be \"scalar\" or \"lms\"");

  const bool lms = cfg.uses_lms_pipeline();
  if (lms && !(cfg.measurement_ratio > 0.0 && cfg.measurement_ratio <= 1.0))
    throw ConfigError("measurement_ratio must be in (0, 1]");

  const bool poisson = std::holds_alternative<PoissonChannel>(cfg.channel);
  if (poisson && !lms)
    throw ConfigError("poisson channel requires the linear-mixing pipeline");
  if (poisson && !std::holds_alternative<SparseWeibullPrior>(cfg.prior))
    throw ConfigError("poisson channel requires a sparse-weibull prior (nonnegative signal)");

  if (cfg.kind == ExperimentKind::ScalarMixture &&
      !std::holds_alternative<MixtureGaussianPrior>(cfg.prior))
    throw ConfigError("scalar-mixture experiments need a mixture-gaussian prior");
  if (cfg.kind == ExperimentKind::ScalarSparse &&
      std::holds_alternative<MixtureGaussianPrior>(cfg.prior))
    throw ConfigError("scalar-sparse experiments need a sparse prior");

  if (cfg.kind == ExperimentKind::EvtCheck) {
    if (!cfg.estimator_names.empty() || !cfg.p_values.empty())
      throw ConfigError("evt-check does not take estimators or p values");
    if (std::holds_alternative<SparseWeibullPrior>(cfg.prior))
      throw ConfigError("evt-check needs a Gaussian-family prior");
    return;
  }

  if (cfg.estimator_names.empty()) throw ConfigError("estimator list must be nonempty");
  std::set<std::string> seen;
  bool has_lp = false;
  for (const auto& name : cfg.estimator_names) {
    if (!seen.insert(name).second) throw ConfigError("duplicate estimator \"" + name + "\"");
    const bool weibull = std::holds_alternative<SparseWeibullPrior>(cfg.prior);
    if (name == "wiener" || (name.size() >= 2 && name[0] == 'W')) {
      if (weibull)
        throw ConfigError("the wiener filter does not apply to sparse-weibull priors");
    }
    if (name.size() >= 2 && name[0] == 'W' && name != "wiener") {
      const auto* mix = std::get_if<MixtureGaussianPrior>(&cfg.prior);
      if (mix == nullptr)
        throw ConfigError("component estimators (W1, W2, ...) need a mixture prior");
      int component = 0;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), component);
      if (res.ec != std::errc() || res.ptr != name.data() + name.size() || component < 1 ||
          std::size_t(component) > mix->variances.size())
        throw ConfigError("estimator \"" + name + "\" does not name a mixture component");
    } else if (name == "lp") {
      has_lp = true;
    } else if (name != "wiener" && name != "pm") {
      throw ConfigError("unknown estimator \"" + name + "\"");
    }
  }
  if (has_lp && cfg.p_values.empty())
    throw ConfigError("the lp estimator needs a nonempty p list");
  if (!has_lp && !cfg.p_values.empty())
    throw ConfigError("p list given but no lp estimator requested");
  std::set<double> p_seen;
  for (double p : cfg.p_values) {
    if (!(p >= 1.0)) throw ConfigError("p values must be >= 1");
    if (!p_seen.insert(p).second) throw ConfigError("duplicate p value in p list");
  }

  if (cfg.kind == ExperimentKind::PoptSweep) {
    const std::size_t variants =
        cfg.estimator_names.size() - (has_lp ? 1 : 0) + cfg.p_values.size();
    if (variants < 2) throw ConfigError("popt-sweep needs at least 2 estimator variants");
  }
}

struct EstimatorTask {
  EstimatorSpec spec;
  std::optional<double> p;  // recorded in the CSV for lp variants
};

std::vector<EstimatorTask> estimator_tasks(const ExperimentConfig& cfg) {
  std::vector<EstimatorTask> tasks;
  for (const auto& name : cfg.estimator_names) {
    if (name == "wiener") {
      tasks.push_back({{EstimatorSpec::Kind::Wiener, -1, 2.0}, std::nullopt});
    } else if (name == "pm") {
      tasks.push_back({{EstimatorSpec::Kind::PosteriorMean, -1, 2.0}, std::nullopt});
    } else if (name == "lp") {
      for (double p : cfg.p_values)
        tasks.push_back({{EstimatorSpec::Kind::LpOptimal, -1, p}, p});
    } else {  // W<k>
      int component = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), component);
      tasks.push_back({{EstimatorSpec::Kind::WienerComponent, component - 1, 2.0}, std::nullopt});
    }
  }
  return tasks;
}

// Runs compute(0..total-1) on `threads` workers and calls emit in index
// order. Worker exceptions are rethrown on the calling thread.
template <typename R, typename Compute, typename Emit>
void ordered_parallel_for(int total, int threads, Compute&& compute, Emit&& emit) {
  if (threads <= 1 || total <= 1) {
    for (int i = 0; i < total; ++i) {
      R r = compute(i);
      emit(i, r);
    }
    return;
  }
  std::vector<std::optional<R>> results(static_cast<std::size_t>(total));
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<int> next{0};
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= total) return;
      try {
        R r = compute(i);
        std::lock_guard<std::mutex> lock(mutex);
        results[std::size_t(i)] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!error) error = std::current_exception();
        next.store(total);
      }
      ready.notify_all();
    }
  };

  std::vector<std::thread> pool;
  const int workers = std::min(threads, total);
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

  {
    std::unique_lock<std::mutex> lock(mutex);
    for (int i = 0; i < total && !error; ++i) {
      ready.wait(lock, [&] { return results[std::size_t(i)].has_value() || error; });
      if (error) break;
      R r = std::move(*results[std::size_t(i)]);
      results[std::size_t(i)].reset();
      lock.unlock();
      emit(i, r);
      lock.lock();
    }
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct TrialOutput {
  std::vector<TrialRecord> records;
  std::vector<std::string> trace_rows;
};

}  // namespace

const char* const kRecordsCsvHeader = "experiment,N,M,trial,seed,estimator,p,linf,l2,seconds";

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ScalarMixture: return "scalar-mixture";
    case ExperimentKind::ScalarSparse: return "scalar-sparse";
    case ExperimentKind::Lms: return "lms";
    case ExperimentKind::PoptSweep: return "popt-sweep";
    case ExperimentKind::EvtCheck: return "evt-check";
  }
  return "?";
}

bool ExperimentConfig::uses_lms_pipeline() const {
  return kind == ExperimentKind::Lms ||
         (kind == ExperimentKind::PoptSweep && pipeline == "lms");
}

ExperimentConfig parse_config_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"experiment", "prior", "channel", "snr_db", "n", "measurement_ratio", "p",
                       "estimators", "trials", "seed", "output_dir", "pipeline", "gamp",
                       "gamp_trace"},
                      "config");
  if (!doc.contains("experiment")) throw ConfigError("missing \"experiment\" kind");
  ExperimentConfig cfg;
  cfg.kind = parse_kind(doc["experiment"].get<std::string>());
  if (!doc.contains("prior")) throw ConfigError("missing \"prior\"");
  cfg.prior = parse_prior(doc["prior"]);
  if (!doc.contains("channel")) throw ConfigError("missing \"channel\"");
  const ParsedChannel ch = parse_channel(doc["channel"]);
  if (doc.contains("snr_db")) cfg.snr_db = require_number(doc, "snr_db", "config");

  if (ch.gaussian) {
    if (ch.variance && cfg.snr_db)
      throw ConfigError("give either an explicit channel variance or snr_db, not both");
    if (!ch.variance && !cfg.snr_db)
      throw ConfigError("gaussian channel needs an explicit variance or snr_db");
    const double mu_z = ch.variance ? *ch.variance : snr_to_noise_variance(cfg.prior, *cfg.snr_db);
    cfg.channel = GaussianChannel{mu_z};
  } else {
    if (cfg.snr_db) throw ConfigError("snr_db does not apply to the poisson channel");
    cfg.channel = PoissonChannel{ch.alpha};
  }

  if (!doc.contains("n")) throw ConfigError("missing \"n\" list");
  for (const auto& v : doc["n"]) cfg.n_values.push_back(v.get<Eigen::Index>());
  if (doc.contains("measurement_ratio")) {
    cfg.measurement_ratio = require_number(doc, "measurement_ratio", "config");
    if (!(cfg.kind == ExperimentKind::Lms || cfg.kind == ExperimentKind::PoptSweep))
      throw ConfigError("measurement_ratio only applies to lms pipelines");
  }
  if (doc.contains("p")) cfg.p_values = doc["p"].get<std::vector<double>>();
  if (doc.contains("estimators"))
    cfg.estimator_names = doc["estimators"].get<std::vector<std::string>>();
  if (doc.contains("trials")) cfg.trials = doc["trials"].get<int>();
  if (doc.contains("seed")) cfg.master_seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
  if (doc.contains("pipeline")) {
    if (cfg.kind != ExperimentKind::PoptSweep)
      throw ConfigError("pipeline only applies to popt-sweep");
    cfg.pipeline = doc["pipeline"].get<std::string>();
  }
  if (doc.contains("gamp")) {
    const json& g = doc["gamp"];
    reject_unknown_keys(
        g, {"max_iterations", "damping", "tolerance", "variance_floor", "weibull_grid_resolution"},
        "gamp");
    if (g.contains("max_iterations")) cfg.gamp.max_iterations = g["max_iterations"].get<int>();
    if (g.contains("damping")) cfg.gamp.damping = g["damping"].get<double>();
    if (g.contains("tolerance")) cfg.gamp.tolerance = g["tolerance"].get<double>();
    if (g.contains("variance_floor")) cfg.gamp.variance_floor = g["variance_floor"].get<double>();
    if (g.contains("weibull_grid_resolution"))
      cfg.gamp.weibull_grid_resolution = g["weibull_grid_resolution"].get<int>();
    if (!cfg.uses_lms_pipeline()) throw ConfigError("gamp settings only apply to lms pipelines");
  }
  if (doc.contains("gamp_trace")) {
    cfg.gamp_trace = doc["gamp_trace"].get<bool>();
    if (!cfg.uses_lms_pipeline()) throw ConfigError("gamp_trace only applies to lms pipelines");
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_json(text);
}

std::vector<EstimatorSpec> estimator_variants(const ExperimentConfig& config) {
  std::vector<EstimatorSpec> specs;
  for (const auto& task : estimator_tasks(config)) specs.push_back(task.spec);
  return specs;
}

std::string format_record_row(const TrialRecord& r) {
  std::string row;
  row.reserve(96);
  row += r.experiment;
  row += ',';
  row += std::to_string(r.n);
  row += ',';
  row += std::to_string(r.m);
  row += ',';
  row += std::to_string(r.trial);
  row += ',';
  row += std::to_string(r.seed);
  row += ',';
  row += r.estimator;
  row += ',';
  if (r.p) row += format_double(*r.p);
  row += ',';
  row += format_double(r.linf);
  row += ',';
  row += format_double(r.l2);
  row += ',';
  row += format_seconds(r.seconds);
  return row;
}

namespace {

RunOutputs run_evt_check(const ExperimentConfig& cfg) {
  RunOutputs out;
  std::filesystem::create_directories(cfg.output_dir);
  out.csv_path = std::filesystem::path(cfg.output_dir) / "evt.csv";
  out.summary_path = std::filesystem::path(cfg.output_dir) / "summary.json";
  const double mu_z = std::get<GaussianChannel>(cfg.channel).noise_variance;

  std::ofstream csv(out.csv_path, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + out.csv_path.string());
  csv << "check,n,trials,mean_ratio,sd_ratio,dominance_fraction,evaluated,skipped,"
         "norm_max_support,norm_max_zero\n";

  json summary;
  summary["experiment"] = kind_name(cfg.kind);
  summary["per_n"] = json::array();
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    const Eigen::Index n = cfg.n_values[i];
    const BermanResult br =
        berman_ratio(n, cfg.trials, derive_seed(cfg.master_seed, 2 * i));
    const DominanceResult dr =
        support_dominance(cfg.prior, mu_z, n, cfg.trials, derive_seed(cfg.master_seed, 2 * i + 1));
    csv << "berman," << n << ',' << cfg.trials << ',' << format_double(br.mean_ratio) << ','
        << format_double(br.stddev_ratio) << ",,,,,\n";
    csv << "dominance," << n << ',' << cfg.trials << ",,," << format_double(dr.fraction) << ','
        << dr.evaluated << ',' << dr.skipped << ',' << format_double(dr.mean_norm_support) << ','
        << format_double(dr.mean_norm_zero) << '\n';
    csv.flush();
    json entry;
    entry["n"] = n;
    entry["berman_mean_ratio"] = br.mean_ratio;
    entry["berman_sd_ratio"] = br.stddev_ratio;
    entry["dominance_fraction"] = dr.fraction;
    entry["dominance_evaluated"] = dr.evaluated;
    entry["dominance_skipped"] = dr.skipped;
    entry["norm_max_support"] = dr.mean_norm_support;
    entry["norm_max_zero"] = dr.mean_norm_zero;
    summary["per_n"].push_back(entry);
  }
  std::ofstream sum(out.summary_path, std::ios::trunc);
  sum << summary.dump(2) << '\n';
  return out;
}

}  // namespace

RunOutputs run_experiment(const ExperimentConfig& cfg, int threads) {
  validate_config(cfg);
  if (cfg.kind == ExperimentKind::EvtCheck) return run_evt_check(cfg);

  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  const auto started = std::chrono::steady_clock::now();

  RunOutputs out;
  std::filesystem::create_directories(cfg.output_dir);
  out.csv_path = std::filesystem::path(cfg.output_dir) / "records.csv";
  out.summary_path = std::filesystem::path(cfg.output_dir) / "summary.json";

  std::ofstream csv(out.csv_path, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + out.csv_path.string());
  csv << kRecordsCsvHeader << '\n';

  std::ofstream trace_csv;
  if (cfg.gamp_trace) {
    trace_csv.open(std::filesystem::path(cfg.output_dir) / "gamp_trace.csv", std::ios::trunc);
    trace_csv << "experiment,N,trial,iteration,residual,mu_r\n";
  }

  const auto tasks = estimator_tasks(cfg);
  const bool lms = cfg.uses_lms_pipeline();
  const std::string experiment_name = kind_name(cfg.kind);

  for (std::size_t n_idx = 0; n_idx < cfg.n_values.size(); ++n_idx) {
    const Eigen::Index n = cfg.n_values[n_idx];
    const Eigen::Index m =
        lms ? std::max<Eigen::Index>(1, Eigen::Index(std::llround(cfg.measurement_ratio * n))) : n;

    auto compute = [&](int trial) {
      const std::uint64_t trial_seed =
          derive_seed(cfg.master_seed, (std::uint64_t(n_idx) << 32) | std::uint64_t(trial));
      TrialOutput result;

      Eigen::VectorXd truth;
      EffectiveChannel channel;
      if (lms) {
        LinearMixingInstance inst = make_lms_instance(cfg.prior, cfg.channel, m, n, trial_seed);
        GampResult gamp = gamp_run(inst.matrix, inst.observations, cfg.prior, cfg.channel,
                                   cfg.gamp);
        truth = std::move(inst.signal);
        channel = std::move(gamp.channel);
        if (cfg.gamp_trace) {
          for (const auto& stat : gamp.trace) {
            result.trace_rows.push_back(experiment_name + ',' + std::to_string(n) + ',' +
                                        std::to_string(trial) + ',' +
                                        std::to_string(stat.iteration) + ',' +
                                        format_double(stat.residual) + ',' +
                                        format_double(stat.input_noise_variance));
          }
        }
      } else {
        truth = sample_signal(cfg.prior, n, trial_seed);
        const double mu_z = std::get<GaussianChannel>(cfg.channel).noise_variance;
        channel.pseudo_observations = apply_channel(cfg.channel, truth, trial_seed);
        channel.noise_variance = mu_z;
      }

      for (const auto& task : tasks) {
        const auto t0 = std::chrono::steady_clock::now();
        const Eigen::VectorXd estimate =
            apply_estimator(task.spec, channel, cfg.prior, cfg.gamp.weibull_grid_resolution);
        const ErrorReport report = error_report(estimate, truth, {2.0});
        const double seconds = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - t0).count();
        TrialRecord rec;
        rec.experiment = experiment_name;
        rec.n = n;
        rec.m = m;
        rec.trial = trial;
        rec.seed = trial_seed;
        rec.estimator = task.spec.label();
        rec.p = task.p;
        rec.linf = report.linf;
        rec.l2 = report.lp[0].second;
        rec.seconds = seconds;
        result.records.push_back(std::move(rec));
      }
      return result;
    };

    auto emit = [&](int, TrialOutput& result) {
      for (const auto& rec : result.records) {
        csv << format_record_row(rec) << '\n';
        out.records.push_back(rec);
      }
      csv.flush();
      if (cfg.gamp_trace) {
        for (const auto& row : result.trace_rows) trace_csv << row << '\n';
        trace_csv.flush();
      }
    };

    ordered_parallel_for<TrialOutput>(cfg.trials, threads, compute, emit);
  }

  out.sweep = aggregate_sweep(out.records, estimator_variants(cfg));

  json summary;
  summary["experiment"] = experiment_name;
  summary["trials"] = cfg.trials;
  summary["master_seed"] = cfg.master_seed;
  summary["threads"] = threads;
  summary["per_n"] = json::array();
  for (const auto& entry : out.sweep.per_n) {
    json e;
    e["n"] = entry.n;
    e["estimators"] = json::array();
    for (const auto& est : entry.estimators) {
      json j;
      j["estimator"] = est.label;
      if (est.p) j["p"] = *est.p;
      j["mean_linf"] = est.mean_linf;
      j["stderr_linf"] = est.stderr_linf;
      j["trials"] = est.trials;
      e["estimators"].push_back(j);
    }
    if (entry.p_opt) e["p_opt"] = *entry.p_opt;
    e["p_opt_tie"] = entry.tie_flag;
    summary["per_n"].push_back(e);
  }
  summary["total_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ofstream sum(out.summary_path, std::ios::trunc);
  sum << summary.dump(2) << '\n';
  return out;
}

SweepResult aggregate_sweep(const std::vector<TrialRecord>& records,
                            const std::vector<EstimatorSpec>& variants) {
  SweepResult sweep;
  std::vector<Eigen::Index> n_order;
  for (const auto& rec : records) {
    if (std::find(n_order.begin(), n_order.end(), rec.n) == n_order.end())
      n_order.push_back(rec.n);
  }
  for (Eigen::Index n : n_order) {
    SweepEntry entry;
    entry.n = n;
    for (const auto& spec : variants) {
      const std::optional<double> p =
          spec.kind == EstimatorSpec::Kind::LpOptimal ? std::optional<double>(spec.p)
                                                      : std::nullopt;
      EstimatorSummary summary;
      summary.label = spec.label();
      summary.p = p;
      double sum = 0.0, sum_sq = 0.0;
      int count = 0;
      for (const auto& rec : records) {
        if (rec.n != n || rec.estimator != summary.label || rec.p != p) continue;
        sum += rec.linf;
        sum_sq += rec.linf * rec.linf;
        ++count;
      }
      if (count == 0) continue;
      summary.trials = count;
      summary.mean_linf = sum / count;
      summary.stderr_linf =
          count > 1
              ? std::sqrt(std::max(sum_sq - count * summary.mean_linf * summary.mean_linf, 0.0) /
                          (count - 1) / count)
              : 0.0;
      entry.estimators.push_back(summary);
    }
    // p_opt over the lp variants; tie flag from the best vs runner-up gap
    // measured against the combined standard error.
    const EstimatorSummary* best_lp = nullptr;
    for (const auto& est : entry.estimators) {
      if (!est.p) continue;
      if (best_lp == nullptr || est.mean_linf < best_lp->mean_linf) best_lp = &est;
    }
    if (best_lp != nullptr) entry.p_opt = best_lp->p;
    if (entry.estimators.size() >= 2) {
      const EstimatorSummary* best = nullptr;
      const EstimatorSummary* runner = nullptr;
      for (const auto& est : entry.estimators) {
        if (best == nullptr || est.mean_linf < best->mean_linf) {
          runner = best;
          best = &est;
        } else if (runner == nullptr || est.mean_linf < runner->mean_linf) {
          runner = &est;
        }
      }
      const double gap = runner->mean_linf - best->mean_linf;
      const double se = std::sqrt(best->stderr_linf * best->stderr_linf +
                                  runner->stderr_linf * runner->stderr_linf);
      entry.tie_flag = gap < se;
    }
    sweep.per_n.push_back(std::move(entry));
  }
  return sweep;
}

PairedGap paired_linf_gap(const std::vector<TrialRecord>& records, Eigen::Index n,
                          const std::string& label_a, std::optional<double> p_a,
                          const std::string& label_b, std::optional<double> p_b) {
  std::map<int, double> a, b;
  for (const auto& rec : records) {
    if (rec.n != n) continue;
    if (rec.estimator == label_a && rec.p == p_a) a[rec.trial] = rec.linf;
    if (rec.estimator == label_b && rec.p == p_b) b[rec.trial] = rec.linf;
  }
  PairedGap gap;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& [trial, va] : a) {
    const auto it = b.find(trial);
    if (it == b.end()) continue;
    const double d = va - it->second;
    sum += d;
    sum_sq += d * d;
    ++gap.trials;
  }
  if (gap.trials == 0) throw ParameterError("paired_linf_gap: no common trials");
  gap.mean = sum / gap.trials;
  gap.stderr_mean =
      gap.trials > 1
          ? std::sqrt(std::max(sum_sq - gap.trials * gap.mean * gap.mean, 0.0) /
                      (gap.trials - 1) / gap.trials)
          : 0.0;
  return gap;
}

double mean_linf(const std::vector<TrialRecord>& records, Eigen::Index n,
                 const std::string& label, std::optional<double> p) {
  double sum = 0.0;
  int count = 0;
  for (const auto& rec : records) {
    if (rec.n == n && rec.estimator == label && rec.p == p) {
      sum += rec.linf;
      ++count;
    }
  }
  if (count == 0) throw ParameterError("mean_linf: no matching records");
  return sum / count;
}

std::vector<TrialRecord> parse_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty CSV " + path.string(), 1);
  ++line_no;
  if (line != kRecordsCsvHeader) throw ParseError("unexpected CSV header", line_no);

  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 10) throw ParseError("expected 10 fields", line_no);
    try {
      TrialRecord rec;
      rec.experiment = fields[0];
      rec.n = std::stoll(fields[1]);
      rec.m = std::stoll(fields[2]);
      rec.trial = std::stoi(fields[3]);
      rec.seed = std::stoull(fields[4]);
      rec.estimator = fields[5];
      if (!fields[6].empty()) rec.p = std::stod(fields[6]);
      rec.linf = std::stod(fields[7]);
      rec.l2 = std::stod(fields[8]);
      rec.seconds = std::stod(fields[9]);
      if (rec.linf < 0.0 || rec.l2 < 0.0) throw std::invalid_argument("negative error");
      records.push_back(std::move(rec));
    } catch (const std::exception&) {
      throw ParseError("malformed record", line_no);
    }
  }
  return records;
}

}  // namespace linf
