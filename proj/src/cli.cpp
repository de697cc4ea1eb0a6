#include "gaussmc/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaussmc/baseline.hpp"
#include "gaussmc/chain.hpp"
#include "gaussmc/covariance.hpp"
#include "gaussmc/diagnostics.hpp"
#include "gaussmc/errors.hpp"
#include "gaussmc/estimators.hpp"
#include "gaussmc/functional.hpp"
#include "gaussmc/model_io.hpp"

namespace gaussmc::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Raw flag values; which ones were actually given is tracked by CLI11.
struct Flags {
  std::string config;
  std::string model;
  std::size_t d = 0;
  double range = 10.0;
  double ratio = 7.44 / 8.0;
  double theta = 1.0;
  std::string h;
  std::uint64_t n = 0;
  std::uint64_t b = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  std::size_t n_prime = 0;
  std::vector<std::uint64_t> checkpoints;
  std::string record;
};

// Effective settings after merging the config file and the flags.
struct RunConfig {
  CovarianceModel model = CovarianceModel::identity(1);
  std::string h_spec;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> b;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  std::size_t n_prime = 10000;
  bool replications_given = false;
  std::vector<std::uint64_t> checkpoints;
  std::string record;
};

class ConfigReader {
 public:
  ConfigReader(const CLI::App& app, json file) : app_(app), file_(std::move(file)) {}

  bool given(const std::string& flag) const {
    const auto* opt = app_.get_option_no_throw("--" + flag);
    return opt != nullptr && opt->count() > 0;
  }

  template <class T>
  std::optional<T> get(const std::string& key, const T& flag_value) const {
    if (given(key)) return flag_value;
    if (file_.contains(key)) {
      try {
        return file_.at(key).get<T>();
      } catch (const json::exception&) {
        throw ArgumentError("config: field '" + key + "' has the wrong type");
      }
    }
    return std::nullopt;
  }

  const json& file() const { return file_; }

 private:
  const CLI::App& app_;
  json file_;
};

CovarianceModel resolve_model(const ConfigReader& reader, const Flags& flags) {
  const auto d = reader.get<std::size_t>("d", flags.d).value_or(0);
  const double range = reader.get<double>("r", flags.range).value_or(10.0);
  const double ratio = reader.get<double>("ratio", flags.ratio).value_or(7.44 / 8.0);
  const double theta = reader.get<double>("theta", flags.theta).value_or(1.0);

  json descriptor;
  if (reader.given("model")) {
    descriptor = flags.model;
  } else if (reader.file().contains("model")) {
    descriptor = reader.file().at("model");
  } else {
    throw ArgumentError("no model given (use --model)");
  }

  if (descriptor.is_object()) return model_from_json(descriptor);
  if (!descriptor.is_string()) throw ArgumentError("model must be a file name, keyword or JSON object");
  const auto text = descriptor.get<std::string>();
  if (!text.empty() && text.front() == '{') {
    try {
      return model_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw ArgumentError(std::string("inline model is not valid JSON: ") + e.what());
    }
  }
  if (text == "identity" || text == "scaledexp" || text == "powexp") {
    if (d == 0) throw ArgumentError("model '" + text + "' needs --d");
    if (text == "identity") return CovarianceModel::identity(d);
    if (text == "scaledexp") return CovarianceModel::scaled_exponential(grid_locations(d), range, ratio);
    return CovarianceModel::powered_exponential(grid_locations(d), range, theta);
  }
  return load_model_file(text);
}

RunConfig resolve(const CLI::App& sub, const Flags& flags) {
  json file = json::object();
  if (sub.count("--config") > 0) {
    std::ifstream in(flags.config);
    if (!in) throw ArgumentError("cannot open config file '" + flags.config + "'");
    try {
      in >> file;
    } catch (const json::exception& e) {
      throw ArgumentError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!file.is_object()) throw ArgumentError("config file must hold a JSON object");
  }
  const ConfigReader reader(sub, std::move(file));

  RunConfig cfg;
  cfg.model = resolve_model(reader, flags);
  cfg.h_spec = reader.get<std::string>("h", flags.h).value_or("");
  cfg.n = reader.get<std::uint64_t>("n", flags.n);
  cfg.b = reader.get<std::uint64_t>("b", flags.b);
  if (auto r = reader.get<std::size_t>("replications", flags.replications)) {
    cfg.replications = *r;
    cfg.replications_given = true;
  }
  cfg.seed = reader.get<std::uint64_t>("seed", flags.seed).value_or(1);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  cfg.threads = reader.get<unsigned>("threads", flags.threads).value_or(hw);
  if (cfg.threads == 0) cfg.threads = hw;
  cfg.out = reader.get<std::string>("out", flags.out).value_or("");
  cfg.n_prime = reader.get<std::size_t>("nprime", flags.n_prime).value_or(10000);
  cfg.checkpoints = reader.get<std::vector<std::uint64_t>>("checkpoints", flags.checkpoints).value_or(std::vector<std::uint64_t>{});
  cfg.record = reader.get<std::string>("record", flags.record).value_or("");
  return cfg;
}

std::uint64_t require_n(const RunConfig& cfg) {
  if (!cfg.n) throw ArgumentError("--n is required");
  return *cfg.n;
}

// Burn-in defaults to n/2.
std::uint64_t burn_in(const RunConfig& cfg, std::uint64_t n) {
  const std::uint64_t b = cfg.b.value_or(n / 2);
  if (b >= n) throw ArgumentError("burn-in must satisfy b < n");
  return b;
}

TestFunctional functional(const RunConfig& cfg) {
  if (cfg.h_spec.empty()) throw ArgumentError("--h is required");
  return TestFunctional::parse(cfg.h_spec, cfg.model.dim());
}

ordered_json header(const char* command, const RunConfig& cfg) {
  ordered_json j;
  j["command"] = command;
  j["model"] = model_to_json(cfg.model, false);
  if (!cfg.h_spec.empty()) j["h"] = cfg.h_spec;
  j["seed"] = cfg.seed;
  return j;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out);
  if (!file) throw ArgumentError("cannot open output file '" + cfg.out + "'");
  file << text;
}

void emit_json(const RunConfig& cfg, const ordered_json& report, std::ostream& out) {
  emit(cfg, report.dump(2) + "\n", out);
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  const auto n = require_n(cfg);
  const auto b = burn_in(cfg, n);
  const auto h = functional(cfg);
  const auto start = Clock::now();
  const auto est = mcmc_estimate(cfg.model, h, n, b, cfg.seed);
  const double elapsed = seconds_since(start);

  auto report = header("estimate", cfg);
  report["n"] = n;
  report["b"] = b;
  report["estimate"] = est.estimate;
  report["timing"] = {{"seconds", elapsed}};
  emit_json(cfg, report, out);
  return kOk;
}

int cmd_mse(const RunConfig& cfg, std::ostream& out) {
  const auto n = require_n(cfg);
  const auto b = burn_in(cfg, n);
  const auto h = functional(cfg);
  const auto t0 = Clock::now();
  const auto factor = CholeskyFactor::factor(cfg.model);
  const double factor_seconds = seconds_since(t0);
  const auto t1 = Clock::now();
  const auto rep = estimate_mse(cfg.model, factor, h, n, b, cfg.replications, cfg.seed, {cfg.threads, kPivotTol});
  const double elapsed = seconds_since(t1);

  auto report = header("mse", cfg);
  report["n"] = n;
  report["b"] = b;
  report["replications"] = rep.replications;
  report["varianceTerm"] = rep.variance_term;
  report["biasTerm"] = rep.bias_term;
  report["biasStdError"] = rep.bias_std_error;
  report["mse"] = rep.mse;
  report["rmse"] = std::sqrt(rep.mse);
  report["mcmcMean"] = rep.mcmc_mean;
  report["exactChainMean"] = rep.exact_chain_mean;
  report["timing"] = {{"factorizationSeconds", factor_seconds}, {"seconds", elapsed}};
  emit_json(cfg, report, out);
  return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto n = require_n(cfg);
  const auto b = burn_in(cfg, n);
  const auto h = functional(cfg);
  if (cfg.n_prime < 2) throw ArgumentError("--nprime must be at least 2");

  auto report = header("compare", cfg);
  report["n"] = n;
  report["b"] = b;
  report["nPrime"] = cfg.n_prime;
  ordered_json timing;

  const auto t_mcmc = Clock::now();
  const auto mcmc = mcmc_estimate(cfg.model, h, n, b, cfg.seed);
  const double mcmc_seconds = seconds_since(t_mcmc);
  report["mcmc"] = {{"estimate", mcmc.estimate}};

  std::optional<CholeskyFactor> factor;
  std::string warning;
  double factor_seconds = 0.0;
  if (cfg.model.dim() > kBaselineCap) {
    warning = "dimension above baseline cap; MC side skipped";
  } else {
    const auto t0 = Clock::now();
    try {
      factor = CholeskyFactor::factor(cfg.model);
    } catch (const FactorizationError& e) {
      warning = std::string("factorization failed: ") + e.what();
    }
    factor_seconds = seconds_since(t0);
  }

  if (factor) {
    const auto t_sim = Clock::now();
    RngStream stream(cfg.seed, 0, kStartSubstream);
    const auto mc = mc_estimate(*factor, h, cfg.n_prime, stream);
    const double sim_seconds = seconds_since(t_sim);
    report["mc"] = {{"mean", mc.mean}, {"stdev", mc.stdev}, {"varOfMean", mc.var_of_mean}};
    timing["factorizationSeconds"] = factor_seconds;
    timing["simulationSeconds"] = sim_seconds;

    if (cfg.replications_given && cfg.replications >= 2) {
      const auto rep = estimate_mse(cfg.model, *factor, h, n, b, cfg.replications, cfg.seed, {cfg.threads, kPivotTol});
      const double eps2 = rep.mse;
      report["rmse"] = std::sqrt(eps2);
      // Time for MC to reach variance eps^2 against one MCMC run at MSE eps^2.
      if (eps2 > 0.0 && mcmc_seconds > 0.0) {
        const double per_sample = sim_seconds / static_cast<double>(cfg.n_prime);
        const double tau_mc = factor_seconds + mc.stdev * mc.stdev / eps2 * per_sample;
        timing["timeRatio"] = tau_mc / mcmc_seconds;
      }
    }
  } else {
    report["mc"] = nullptr;
    report["warning"] = warning;
    err << "warning: " << warning << '\n';
  }
  timing["mcmcSeconds"] = mcmc_seconds;
  report["timing"] = timing;
  emit_json(cfg, report, out);
  return kOk;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const std::uint64_t n_max = cfg.n.value_or(100);
  const auto d = cfg.model.dim();
  const Eigen::MatrixXd v = cfg.model.materialize(kOracleCap);
  const auto validation = validate(cfg.model);
  const auto series = expected_m_norms(v, n_max);
  const double dd = static_cast<double>(d);

  ordered_json d_sq_over_n = ordered_json::array();
  ordered_json geometric = ordered_json::array();
  ordered_json w2 = ordered_json::array();
  bool within_d_sq = true;
  bool within_geometric = true;
  bool monotone = true;
  double sum = 0.0;
  for (std::uint64_t j = 0; j <= n_max; ++j) {
    const double value = series.values[j];
    sum += value;
    const double geo = geometric_trace_bound(d, validation.min_eigenvalue, j);
    geometric.push_back(geo);
    if (value > geo + 1e-9) within_geometric = false;
    if (j > 0 && value > series.values[j - 1] + 1e-12) monotone = false;
    if (j == 0) {
      d_sq_over_n.push_back(nullptr);
      w2.push_back({{"n", j}, {"oracle", std::sqrt(std::max(0.0, value))}, {"bound", nullptr}});
    } else {
      const double bound = trace_deficit_bound(d, j);
      d_sq_over_n.push_back(bound);
      if (value > bound + 1e-9) within_d_sq = false;
      w2.push_back({{"n", j}, {"oracle", std::sqrt(std::max(0.0, value))}, {"bound", wasserstein_bound(d, j)}});
    }
  }
  const auto grid = exp_lipschitz_grid(4.0, 0.05, 20);
  const auto cert = certify_exp_lipschitz(grid);

  auto report = header("diagnose", cfg);
  report["n"] = n_max;
  report["minEigenvalue"] = validation.min_eigenvalue;
  report["traceDeficitSeries"] = series.values;
  report["bounds"] = {{"dSqOverN", d_sq_over_n}, {"geometric", geometric}};
  report["w2Estimates"] = w2;
  report["certifications"] = {
      {"traceDeficitBound", within_d_sq},
      {"monotone", monotone},
      {"geometric", within_geometric},
      {"sumBound", {{"sum", sum}, {"limit", dd * dd}, {"ok", sum <= dd * dd + 1e-9}}},
      {"expLipschitz", {{"minSlack", cert.min_slack}, {"points", cert.points}, {"ok", cert.min_slack >= -1e-12}}}};
  emit_json(cfg, report, out);
  return kOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const auto n = require_n(cfg);
  std::vector<std::uint64_t> checkpoints = cfg.checkpoints;
  if (checkpoints.empty()) checkpoints.push_back(n);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.back() > n) throw ArgumentError("checkpoints must not exceed --n");
  const std::size_t reps = cfg.replications_given ? cfg.replications : 1;
  if (reps == 0) throw ArgumentError("--replications must be positive");

  const auto d = cfg.model.dim();
  std::ostringstream csv;
  csv.precision(17);
  csv << "rep,n";
  for (std::size_t i = 0; i < d; ++i) csv << ",x" << i;
  csv << '\n';
  auto write_row = [&](std::size_t rep, const ChainState& s) {
    csv << rep << ',' << s.n;
    for (double v : s.x) csv << ',' << v;
    csv << '\n';
  };

  std::ofstream record;
  if (!cfg.record.empty()) {
    record.open(cfg.record);
    if (!record) throw ArgumentError("cannot open step log '" + cfg.record + "'");
    write_step_log_header(record);
  }

  for (std::size_t rep = 0; rep < reps; ++rep) {
    auto schedule = IndexSchedule::uniform(d, RngStream(cfg.seed, rep, kIndexSubstream));
    RngStream g_stream(cfg.seed, rep, kGaussianSubstream);
    auto next = checkpoints.begin();
    const auto start = ChainState::zero(d);
    if (*next == 0) {
      write_row(rep, start);
      ++next;
    }
    run(cfg.model, schedule, g_stream, n, start.x, [&](const ChainState& s, const StepRecord& r) {
      if (rep == 0 && record.is_open()) write_step_record(record, r);
      if (next != checkpoints.end() && s.n == *next) {
        write_row(rep, s);
        ++next;
      }
    });
  }
  emit(cfg, csv.str(), out);
  return kOk;
}

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON config file; flags override its fields");
  sub.add_option("--model", f.model, "model JSON file, inline JSON, or identity|scaledexp|powexp");
  sub.add_option("--d", f.d, "dimension for keyword models");
  sub.add_option("--r", f.range, "kernel range (keyword models)");
  sub.add_option("--ratio", f.ratio, "sigma^2/varrho for scaledexp (keyword models)");
  sub.add_option("--theta", f.theta, "exponent for powexp (keyword models)");
  sub.add_option("--seed", f.seed, "64-bit seed; replication r uses stream id r");
  sub.add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub.add_option("--out", f.out, "write the report here instead of stdout");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MCMC sampling of Gaussian vectors with O(d) storage", "gaussmc"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  Flags f;

  auto* estimate = app.add_subcommand("estimate", "running-average estimate h_{n,b} of E h(X)");
  auto* mse = app.add_subcommand("mse", "coupled-chain estimate of MSE(n;b)");
  auto* compare = app.add_subcommand("compare", "Cholesky MC baseline against MCMC");
  auto* diagnose = app.add_subcommand("diagnose", "exact trace-deficit series and bound checks (d <= 64)");
  auto* sample = app.add_subcommand("sample", "emit chain states X_n as CSV");

  for (auto* sub : {estimate, mse, compare, diagnose, sample}) {
    sub->set_help_flag("--help", "print help and exit");
    add_common(*sub, f);
  }
  for (auto* sub : {estimate, mse, compare, sample}) {
    sub->add_option("--h", f.h, "functional: const:C, coord:K, max[:S], norm, indicator:A, basket:K=..,T=..,sigma=..,r=..");
    sub->add_option("--n", f.n, "chain length");
    sub->add_option("--b", f.b, "burn-in (default n/2)");
  }
  diagnose->add_option("--n", f.n, "largest step of the series (default 100)");
  for (auto* sub : {mse, compare, sample}) sub->add_option("--replications", f.replications, "independent replications");
  compare->add_option("--nprime", f.n_prime, "MC sample count (default 10000)");
  sample->add_option("--checkpoints", f.checkpoints, "steps at which to emit X_n (default: n)")->delimiter(',');
  sample->add_option("--record", f.record, "write the step log (n,i,g) of replication 0 here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const RunConfig cfg = resolve(*sub, f);
    if (cfg.model.symmetrized()) err << "warning: dense model was not symmetric; using (V + V^T)/2\n";
    if (sub == estimate) return cmd_estimate(cfg, out);
    if (sub == mse) return cmd_mse(cfg, out);
    if (sub == compare) return cmd_compare(cfg, out, err);
    if (sub == diagnose) return cmd_diagnose(cfg, out);
    return cmd_sample(cfg, out);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace gaussmc::cli
