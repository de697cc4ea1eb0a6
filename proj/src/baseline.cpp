#include "gaussmc/baseline.hpp"

#include <cmath>

#include "gaussmc/errors.hpp"
#include "gaussmc/stats.hpp"

namespace gaussmc {

CholeskyFactor CholeskyFactor::factor(const Eigen::MatrixXd& v, double pivot_tol) {
  if (v.rows() != v.cols() || v.rows() == 0) throw ArgumentError("cholesky: matrix must be square and non-empty");
  const Eigen::Index d = v.rows();
  if (static_cast<std::size_t>(d) > kBaselineCap) {
    throw CapacityError("cholesky: dimension above cap", static_cast<std::size_t>(d), kBaselineCap);
  }
  // Row-major workspace so the inner products below run over contiguous rows.
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix a = RowMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = v(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= a(j, k) * a(j, k);
    if (!(pivot > pivot_tol)) throw FactorizationError(static_cast<std::size_t>(j), pivot);
    const double diag = std::sqrt(pivot);
    a(j, j) = diag;
    const double inv = 1.0 / diag;
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double acc = v(i, j);
      acc -= a.row(i).head(j).dot(a.row(j).head(j));
      a(i, j) = acc * inv;
    }
  }
  return CholeskyFactor(Eigen::MatrixXd(a));
}

CholeskyFactor CholeskyFactor::factor(const CovarianceModel& model, double pivot_tol, std::size_t cap) {
  return factor(model.materialize(std::min(cap, kBaselineCap)), pivot_tol);
}

void CholeskyFactor::apply(std::span<const double> z, std::span<double> out) const {
  const auto d = lower_.rows();
  if (z.size() != static_cast<std::size_t>(d) || out.size() != static_cast<std::size_t>(d)) {
    throw ArgumentError("cholesky apply: vector has wrong length");
  }
  const Eigen::Map<const Eigen::VectorXd> zv(z.data(), d);
  Eigen::Map<Eigen::VectorXd> ov(out.data(), d);
  ov.noalias() = lower_.triangularView<Eigen::Lower>() * zv;
}

void sample_exact(const CholeskyFactor& factor, RngStream& stream, std::span<double> out) {
  std::vector<double> z(factor.dim());
  for (double& v : z) v = stream.next_gaussian();
  factor.apply(z, out);
}

std::vector<double> sample_exact(const CholeskyFactor& factor, RngStream& stream) {
  std::vector<double> out(factor.dim());
  sample_exact(factor, stream, out);
  return out;
}

McEstimate mc_estimate(const CholeskyFactor& factor, const TestFunctional& h, std::size_t n_prime, RngStream& stream) {
  if (n_prime < 2) throw ArgumentError("mc_estimate: need at least two samples");
  const std::size_t d = factor.dim();
  std::vector<double> z(d);
  std::vector<double> x(d);
  RunningStats stats;
  for (std::size_t k = 0; k < n_prime; ++k) {
    for (double& v : z) v = stream.next_gaussian();
    factor.apply(z, x);
    stats.add(h.evaluate(x));
  }
  McEstimate est;
  est.mean = stats.mean();
  est.stdev = stats.stdev();
  est.var_of_mean = stats.variance() / static_cast<double>(n_prime);
  est.samples = n_prime;
  return est;
}

}  // namespace gaussmc
