#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gaussmc {

inline constexpr double kPsdClamp = 1e-10;
inline constexpr std::size_t kOracleCap = 64;
inline constexpr std::uint64_t kOracleStepCap = 10000;
inline constexpr std::size_t kDenseDiagnosticsCap = 512;

struct SqrtFactor {
  Eigen::MatrixXd s;  // symmetric, s * s = V
};

// Symmetric square root by eigendecomposition. Eigenvalues in [-1e-10, 0)
// are clamped to zero; anything more negative raises NotPsdError.
SqrtFactor matrix_sqrt(const Eigen::MatrixXd& v);

/// tr(T^j(V)) for j = 0..n_max, where T(W) = (1/d) sum_i P_i W P_i and
/// P_i = I - f_i f_i^T with f_i the i-th column of sqrt(V).
///
/// values[j] equals E|M_j|_V^2 = tr(V - cov(X_j)) for uniform random indices.
struct OperatorTrace {
  std::vector<double> values;
};

OperatorTrace expected_m_norms(const Eigen::MatrixXd& v, std::uint64_t n_max, std::size_t cap = kOracleCap);

// |M|_V^2 = tr(M^T V M) for M = P_{i_{n-1}} ... P_{i_0}, built by explicit
// products of projections. Independent of the T-operator recursion.
double m_norm_squared(const SqrtFactor& root, const Eigen::MatrixXd& v, std::span<const std::size_t> indices);

// Pointwise bounds on values[n]: d^2/n (n >= 1) and d^2 (1 - lambda/d)^n.
double trace_deficit_bound(std::size_t d, std::uint64_t n);
double geometric_trace_bound(std::size_t d, double lambda, std::uint64_t n);

/// Single-pass unbiased sample covariance of a stream of vectors.
class EmpiricalCovariance {
 public:
  explicit EmpiricalCovariance(std::size_t d);

  void add(std::span<const double> x);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  std::uint64_t count() const noexcept { return count_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }

  // Needs at least two samples.
  Eigen::MatrixXd covariance() const;

 private:
  std::uint64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
  Eigen::VectorXd delta_;
};

/// Quadratic Wasserstein distance between N(0, A) and N(0, B).
///
/// Evaluated as |sqrt(A) - sqrt(B) U|_F with U the orthogonal polar factor
/// of sqrt(B) sqrt(A); this equals the Bures expression
/// tr A + tr B - 2 tr((sqrt(A) B sqrt(A))^{1/2}) without its cancellation.
double gaussian_w2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// One grid point of the exp-Lipschitz inequality for (X, X') centered
// Gaussian with var X = nu, var X' = nu_prime, cov(X, X') = cov.
struct ExpLipschitzPoint {
  double nu = 0.0;
  double nu_prime = 0.0;
  double cov = 0.0;
};

struct ExpLipschitzSides {
  double lhs = 0.0;  // E((e^X - e^X')^2)
  double rhs = 0.0;  // (nu + nu' + 1/2)(e^{2 nu} + e^{2 nu'}) E((X - X')^2)
};

ExpLipschitzSides exp_lipschitz_sides(const ExpLipschitzPoint& p);

struct CertificationReport {
  double min_slack = 0.0;  // min(rhs - lhs)
  ExpLipschitzPoint worst{};
  std::size_t points = 0;
};

CertificationReport certify_exp_lipschitz(std::span<const ExpLipschitzPoint> grid);

// nu, nu' on {0, step, ..., nu_max} with nu' <= nu; cov_steps + 1 evenly
// spaced covariances across [-sqrt(nu nu'), sqrt(nu nu')].
std::vector<ExpLipschitzPoint> exp_lipschitz_grid(double nu_max, double step, std::size_t cov_steps);

}  // namespace gaussmc
