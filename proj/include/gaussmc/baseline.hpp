#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gaussmc/covariance.hpp"
#include "gaussmc/functional.hpp"
#include "gaussmc/rng.hpp"

namespace gaussmc {

inline constexpr double kPivotTol = 1e-12;
inline constexpr std::size_t kBaselineCap = 8192;

/// Lower-triangular A with A A^T = V.
///
/// Plain left-looking Cholesky without pivoting; a pivot at or below
/// pivot_tol raises FactorizationError with its index. O(d^3) time,
/// O(d^2) storage.
class CholeskyFactor {
 public:
  static CholeskyFactor factor(const Eigen::MatrixXd& v, double pivot_tol = kPivotTol);
  static CholeskyFactor factor(const CovarianceModel& model, double pivot_tol = kPivotTol,
                               std::size_t cap = kBaselineCap);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.rows()); }
  const Eigen::MatrixXd& lower() const noexcept { return lower_; }

  // A z for a caller-supplied z.
  void apply(std::span<const double> z, std::span<double> out) const;

 private:
  explicit CholeskyFactor(Eigen::MatrixXd lower) : lower_(std::move(lower)) {}

  Eigen::MatrixXd lower_;
};

// A Z with Z a fresh vector of d independent N(0, 1) draws.
std::vector<double> sample_exact(const CholeskyFactor& factor, RngStream& stream);
void sample_exact(const CholeskyFactor& factor, RngStream& stream, std::span<double> out);

struct McEstimate {
  double mean = 0.0;
  double stdev = 0.0;
  double var_of_mean = 0.0;
  std::size_t samples = 0;
};

// Average of h(A Z_j) over n_prime exact draws.
McEstimate mc_estimate(const CholeskyFactor& factor, const TestFunctional& h, std::size_t n_prime, RngStream& stream);

}  // namespace gaussmc
