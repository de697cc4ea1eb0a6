#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gaussmc/baseline.hpp"
#include "gaussmc/chain.hpp"
#include "gaussmc/covariance.hpp"
#include "gaussmc/functional.hpp"
#include "gaussmc/rng.hpp"

namespace gaussmc {

// Substreams used by the seeded entry points: replication r draws its
// Gaussians from (seed, r, kGaussianSubstream), its indices from
// (seed, r, kIndexSubstream) and the exact start from (seed, r, kStartSubstream).
inline constexpr std::uint64_t kGaussianSubstream = 0;
inline constexpr std::uint64_t kIndexSubstream = 1;
inline constexpr std::uint64_t kStartSubstream = 2;

struct McmcEstimate {
  double estimate = 0.0;
  std::uint64_t n = 0;
  std::uint64_t b = 0;
};

/// h_{n,b}: the average of h(X_j) for b <= j < n along one chain started at
/// X_0 = 0. Needs 0 <= b < n; uses O(d) memory.
McmcEstimate mcmc_estimate(const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b,
                           IndexSchedule& schedule, RngStream& g_stream);

// Uniform indices and Gaussians from the replication-r streams of seed.
McmcEstimate mcmc_estimate(const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b,
                           std::uint64_t seed, std::uint64_t replication = 0);

struct MseReport {
  std::uint64_t n = 0;
  std::uint64_t b = 0;
  std::size_t replications = 0;
  double variance_term = 0.0;  // sample variance of h_{n,b}
  double bias_term = 0.0;      // sample mean of h_{n,b} - h'_{n,b}
  double bias_std_error = 0.0;
  double mse = 0.0;  // variance_term + bias_term^2
  double mcmc_mean = 0.0;
  double exact_chain_mean = 0.0;
  std::vector<double> mcmc_values;   // h_{n,b} per replication
  std::vector<double> exact_values;  // h'_{n,b} per replication
};

struct MseOptions {
  unsigned threads = 1;
  double pivot_tol = kPivotTol;
};

/// Coupled-chain estimate of MSE(n; b).
///
/// Each replication draws X'_0 = A Z_0 from the Cholesky baseline and drives
/// the zero-start chain and the exact-start chain with the same (i_j, g_j).
/// The exact chain stays N(0, V) at every step, so h'_{n,b} is unbiased and
/// E(h_{n,b} - h'_{n,b}) is the bias of h_{n,b}. Replications may run on
/// several threads; the reduction is in replication order, so the report
/// does not depend on the thread count.
MseReport estimate_mse(const CovarianceModel& model, const CholeskyFactor& factor, const TestFunctional& h,
                       std::uint64_t n, std::uint64_t b, std::size_t replications, std::uint64_t seed,
                       const MseOptions& options = {});

MseReport estimate_mse(const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b,
                       std::size_t replications, std::uint64_t seed, const MseOptions& options = {});

// 18 kappa^2 d^2 / n: MSE bound for (kappa, V)-Lipschitz h without burn-in.
double mse_bound(double kappa, std::size_t d, std::uint64_t n);

// d / sqrt(n): Wasserstein distance bound between X_n and N(0, V).
double wasserstein_bound(std::size_t d, std::uint64_t n);

// kappa' = 2 kappa d^{1 + gamma} / (lambda gamma).
double kappa_prime(double kappa, double lambda, double gamma, std::size_t d);

// 2 kappa' e^{-lambda gamma n / (4 d)} / n: bias bound of h_{n, n/2}.
// Needs lambda > 0, even n > 0 and d >= 3.
double burnin_bias_bound(double kappa, double lambda, double gamma, std::uint64_t n, std::size_t d);

// ceil(4 d ln(kappa d / sigma) / (lambda gamma)).
std::uint64_t burnin_delta(double kappa, double lambda, double gamma, std::size_t d, double sigma);

// 34 delta sigma^2 / n, valid for n > 2 delta.
double burnin_mse_bound(std::uint64_t delta, double sigma, std::uint64_t n);

// kappa^2 d: upper bound on var(h(X)) for (kappa, V)-Lipschitz h.
double variance_bound(double kappa, std::size_t d);

}  // namespace gaussmc
