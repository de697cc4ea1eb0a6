#include "gaussmc/estimators.hpp"

#include <cmath>

#include "gaussmc/errors.hpp"
#include "gaussmc/stats.hpp"
#include "parallel.hpp"

namespace gaussmc {

namespace {

void check_window(std::uint64_t n, std::uint64_t b) {
  if (n == 0 || b >= n) throw ArgumentError("estimator: need 0 <= b < n");
}

}  // namespace

McmcEstimate mcmc_estimate(const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b,
                           IndexSchedule& schedule, RngStream& g_stream) {
  check_window(n, b);
  RunningStats avg;
  std::vector<double> x0(model.dim(), 0.0);
  if (b == 0) avg.add(h.evaluate(x0));
  // States X_1 .. X_{n-1}; X_n is never averaged.
  run(model, schedule, g_stream, n - 1, std::move(x0), [&](const ChainState& s, const StepRecord&) {
    if (s.n >= b) avg.add(h.evaluate(s.x));
  });
  return {avg.mean(), n, b};
}

McmcEstimate mcmc_estimate(const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b,
                           std::uint64_t seed, std::uint64_t replication) {
  auto schedule = IndexSchedule::uniform(model.dim(), RngStream(seed, replication, kIndexSubstream));
  RngStream g_stream(seed, replication, kGaussianSubstream);
  return mcmc_estimate(model, h, n, b, schedule, g_stream);
}

MseReport estimate_mse(const CovarianceModel& model, const CholeskyFactor& factor, const TestFunctional& h,
                       std::uint64_t n, std::uint64_t b, std::size_t replications, std::uint64_t seed,
                       const MseOptions& options) {
  check_window(n, b);
  if (replications < 2) throw ArgumentError("estimate_mse: need at least two replications");
  if (factor.dim() != model.dim()) throw ArgumentError("estimate_mse: factor dimension does not match model");

  MseReport report;
  report.n = n;
  report.b = b;
  report.replications = replications;
  report.mcmc_values.assign(replications, 0.0);
  report.exact_values.assign(replications, 0.0);

  detail::parallel_for(replications, options.threads, [&](std::size_t r) {
    RngStream start_stream(seed, r, kStartSubstream);
    std::vector<double> x0 = sample_exact(factor, start_stream);
    auto schedule = IndexSchedule::uniform(model.dim(), RngStream(seed, r, kIndexSubstream));
    RngStream g_stream(seed, r, kGaussianSubstream);

    RunningStats zero_start;
    RunningStats exact_start;
    if (b == 0) {
      zero_start.add(h.evaluate(std::vector<double>(model.dim(), 0.0)));
      exact_start.add(h.evaluate(x0));
    }
    run_coupled(model, schedule, g_stream, n - 1, std::move(x0),
                [&](const ChainState& a, const ChainState& e, const StepRecord&) {
                  if (a.n < b) return;
                  zero_start.add(h.evaluate(a.x));
                  exact_start.add(h.evaluate(e.x));
                });
    report.mcmc_values[r] = zero_start.mean();
    report.exact_values[r] = exact_start.mean();
  });

  RunningStats values;
  RunningStats exact;
  RunningStats diff;
  for (std::size_t r = 0; r < replications; ++r) {
    values.add(report.mcmc_values[r]);
    exact.add(report.exact_values[r]);
    diff.add(report.mcmc_values[r] - report.exact_values[r]);
  }
  report.variance_term = values.variance();
  report.bias_term = diff.mean();
  report.bias_std_error = diff.std_error();
  report.mse = report.variance_term + report.bias_term * report.bias_term;
  report.mcmc_mean = values.mean();
  report.exact_chain_mean = exact.mean();
  return report;
}

MseReport estimate_mse(const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b,
                       std::size_t replications, std::uint64_t seed, const MseOptions& options) {
  const auto factor = CholeskyFactor::factor(model, options.pivot_tol);
  return estimate_mse(model, factor, h, n, b, replications, seed, options);
}

double mse_bound(double kappa, std::size_t d, std::uint64_t n) {
  if (n == 0) throw ArgumentError("mse_bound: n must be positive");
  const auto dd = static_cast<double>(d);
  return 18.0 * kappa * kappa * dd * dd / static_cast<double>(n);
}

double wasserstein_bound(std::size_t d, std::uint64_t n) {
  if (n == 0) throw ArgumentError("wasserstein_bound: n must be positive");
  return static_cast<double>(d) / std::sqrt(static_cast<double>(n));
}

double kappa_prime(double kappa, double lambda, double gamma, std::size_t d) {
  if (!(lambda > 0.0)) throw ArgumentError("kappa_prime: lambda must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ArgumentError("kappa_prime: gamma must lie in (0, 1]");
  return 2.0 * kappa * std::pow(static_cast<double>(d), 1.0 + gamma) / (lambda * gamma);
}

double burnin_bias_bound(double kappa, double lambda, double gamma, std::uint64_t n, std::size_t d) {
  if (!(lambda > 0.0)) throw ArgumentError("burnin_bias_bound: lambda must be positive");
  if (n == 0 || n % 2 != 0) throw ArgumentError("burnin_bias_bound: n must be even and positive");
  if (d < 3) throw ArgumentError("burnin_bias_bound: d must be at least 3");
  const double nn = static_cast<double>(n);
  return 2.0 * kappa_prime(kappa, lambda, gamma, d) * std::exp(-lambda * gamma * nn / (4.0 * static_cast<double>(d))) /
         nn;
}

std::uint64_t burnin_delta(double kappa, double lambda, double gamma, std::size_t d, double sigma) {
  if (!(lambda > 0.0) || !(gamma > 0.0) || !(sigma > 0.0) || !(kappa > 0.0)) {
    throw ArgumentError("burnin_delta: kappa, lambda, gamma and sigma must be positive");
  }
  const auto dd = static_cast<double>(d);
  const double value = 4.0 * dd * std::log(kappa * dd / sigma) / (lambda * gamma);
  return value <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(value));
}

double burnin_mse_bound(std::uint64_t delta, double sigma, std::uint64_t n) {
  if (n == 0) throw ArgumentError("burnin_mse_bound: n must be positive");
  return 34.0 * static_cast<double>(delta) * sigma * sigma / static_cast<double>(n);
}

double variance_bound(double kappa, std::size_t d) { return kappa * kappa * static_cast<double>(d); }

}  // namespace gaussmc
