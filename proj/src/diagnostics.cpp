#include "gaussmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gaussmc/errors.hpp"

namespace gaussmc {

namespace {

void check_square(const Eigen::MatrixXd& m, const char* what, std::size_t cap) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ArgumentError(std::string(what) + ": matrix must be square");
  if (static_cast<std::size_t>(m.rows()) > cap) {
    throw CapacityError(std::string(what) + ": dimension above cap", static_cast<std::size_t>(m.rows()), cap);
  }
}

Eigen::MatrixXd psd_root(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("matrix_sqrt: eigensolver did not converge");
  Eigen::VectorXd ev = solver.eigenvalues();
  if (ev.minCoeff() < -kPsdClamp) throw NotPsdError(ev.minCoeff());
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const auto& q = solver.eigenvectors();
  Eigen::MatrixXd root = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (root + root.transpose());
}

}  // namespace

SqrtFactor matrix_sqrt(const Eigen::MatrixXd& v) {
  check_square(v, "matrix_sqrt", kDenseDiagnosticsCap);
  return SqrtFactor{psd_root(v)};
}

OperatorTrace expected_m_norms(const Eigen::MatrixXd& v, std::uint64_t n_max, std::size_t cap) {
  check_square(v, "expected_m_norms", std::min(cap, kOracleCap));
  if (n_max > kOracleStepCap) {
    throw CapacityError("expected_m_norms: step count above cap", static_cast<std::size_t>(n_max), kOracleStepCap);
  }
  const auto d = v.rows();
  const double inv_d = 1.0 / static_cast<double>(d);
  const Eigen::MatrixXd f = psd_root(v);

  // With P_i W P_i = W - f_i u_i^T - u_i f_i^T + (f_i^T u_i) f_i f_i^T and
  // u_i = W f_i, summing over i gives
  //   sum_i P_i W P_i = d W - V W - W V + F diag(F W F) F,
  // since sum_i f_i f_i^T = F F = V. One application costs O(d^3).
  OperatorTrace out;
  out.values.reserve(static_cast<std::size_t>(n_max) + 1);
  Eigen::MatrixXd w = v;
  out.values.push_back(w.trace());
  for (std::uint64_t j = 0; j < n_max; ++j) {
    const Eigen::MatrixXd fw = f * w;
    const Eigen::VectorXd c = (fw * f).diagonal();
    const Eigen::MatrixXd vw = v * w;
    Eigen::MatrixXd next = w - inv_d * (vw + vw.transpose() - f * c.asDiagonal() * f);
    w = 0.5 * (next + next.transpose());
    out.values.push_back(w.trace());
  }
  return out;
}

double m_norm_squared(const SqrtFactor& root, const Eigen::MatrixXd& v, std::span<const std::size_t> indices) {
  const auto d = root.s.rows();
  if (v.rows() != d || v.cols() != d) throw ArgumentError("m_norm_squared: dimension mismatch");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  for (std::size_t i : indices) {
    if (i >= static_cast<std::size_t>(d)) throw ArgumentError("m_norm_squared: index out of range");
    const Eigen::VectorXd f = root.s.col(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d) - f * f.transpose();
    m = p * m;
  }
  return (m.transpose() * v * m).trace();
}

double trace_deficit_bound(std::size_t d, std::uint64_t n) {
  if (n == 0) throw ArgumentError("trace_deficit_bound: n must be positive");
  const auto dd = static_cast<double>(d);
  return dd * dd / static_cast<double>(n);
}

double geometric_trace_bound(std::size_t d, double lambda, std::uint64_t n) {
  const auto dd = static_cast<double>(d);
  return dd * dd * std::pow(1.0 - lambda / dd, static_cast<double>(n));
}

EmpiricalCovariance::EmpiricalCovariance(std::size_t d)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d))),
      m2_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))),
      delta_(static_cast<Eigen::Index>(d)) {
  if (d == 0) throw ArgumentError("EmpiricalCovariance: d must be positive");
}

void EmpiricalCovariance::add(std::span<const double> x) {
  if (x.size() != dim()) throw ArgumentError("EmpiricalCovariance: sample has wrong length");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), mean_.size());
  ++count_;
  delta_ = xv - mean_;
  mean_ += delta_ / static_cast<double>(count_);
  // Welford: M2 += (x - old mean)(x - new mean)^T.
  m2_.selfadjointView<Eigen::Lower>().rankUpdate(delta_, xv - mean_, 0.5);
}

Eigen::MatrixXd EmpiricalCovariance::covariance() const {
  if (count_ < 2) throw ArgumentError("EmpiricalCovariance: need at least two samples");
  Eigen::MatrixXd cov = m2_.selfadjointView<Eigen::Lower>();
  return cov / static_cast<double>(count_ - 1);
}

double gaussian_w2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  check_square(a, "gaussian_w2", kDenseDiagnosticsCap);
  if (b.rows() != a.rows() || b.cols() != a.cols()) throw ArgumentError("gaussian_w2: dimension mismatch");
  const Eigen::MatrixXd ra = psd_root(a);
  const Eigen::MatrixXd rb = psd_root(b);
  // min over orthogonal U of |ra - rb U|_F is attained at the polar factor
  // of rb^T ra = rb ra.
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rb * ra, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd u = svd.matrixU() * svd.matrixV().transpose();
  return (ra - rb * u).norm();
}

ExpLipschitzSides exp_lipschitz_sides(const ExpLipschitzPoint& p) {
  if (!(p.nu >= 0.0) || !(p.nu_prime >= 0.0)) throw ArgumentError("exp-Lipschitz: variances must be non-negative");
  const double bound = std::sqrt(p.nu * p.nu_prime);
  if (!(std::abs(p.cov) <= bound * (1.0 + 1e-12) + 1e-300)) {
    throw ArgumentError("exp-Lipschitz: |cov| exceeds sqrt(nu nu')");
  }
  // rho = E((X - X')^2); the clamp absorbs rounding at cov = sqrt(nu nu').
  const double rho = std::max(0.0, p.nu + p.nu_prime - 2.0 * p.cov);
  const double half_gap = 0.5 * (p.nu - p.nu_prime);
  const double sh = std::sinh(half_gap);
  // e^{2nu} + e^{2nu'} - 2e^{(nu+nu')/2 + cov}
  //   = 2 e^{nu+nu'} (cosh(nu - nu') - e^{-rho/2})
  //   = 2 e^{nu+nu'} (2 sinh^2((nu - nu')/2) - expm1(-rho/2)),
  // a sum of non-negative terms, exact at the diagonal.
  ExpLipschitzSides sides;
  sides.lhs = 2.0 * std::exp(p.nu + p.nu_prime) * (2.0 * sh * sh - std::expm1(-0.5 * rho));
  sides.rhs = (p.nu + p.nu_prime + 0.5) * (std::exp(2.0 * p.nu) + std::exp(2.0 * p.nu_prime)) * rho;
  return sides;
}

CertificationReport certify_exp_lipschitz(std::span<const ExpLipschitzPoint> grid) {
  CertificationReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& p : grid) {
    const auto sides = exp_lipschitz_sides(p);
    const double slack = sides.rhs - sides.lhs;
    if (slack < report.min_slack) {
      report.min_slack = slack;
      report.worst = p;
    }
    ++report.points;
  }
  return report;
}

std::vector<ExpLipschitzPoint> exp_lipschitz_grid(double nu_max, double step, std::size_t cov_steps) {
  if (!(step > 0.0) || !(nu_max >= 0.0) || cov_steps == 0) {
    throw ArgumentError("exp_lipschitz_grid: need step > 0, nu_max >= 0 and cov_steps >= 1");
  }
  const auto count = static_cast<std::size_t>(std::floor(nu_max / step + 1e-9)) + 1;
  std::vector<ExpLipschitzPoint> grid;
  for (std::size_t a = 0; a < count; ++a) {
    const double nu = static_cast<double>(a) * step;
    for (std::size_t b = 0; b <= a; ++b) {
      const double nu_prime = static_cast<double>(b) * step;
      const double bound = std::sqrt(nu * nu_prime);
      for (std::size_t k = 0; k <= cov_steps; ++k) {
        const double t = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(cov_steps);
        grid.push_back({nu, nu_prime, std::clamp(t * bound, -bound, bound)});
      }
    }
  }
  return grid;
}

}  // namespace gaussmc
