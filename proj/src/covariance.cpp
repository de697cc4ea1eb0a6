#include "gaussmc/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "gaussmc/errors.hpp"

namespace gaussmc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_locations(const std::vector<Point2>& locations, double range) {
  if (locations.empty()) throw ArgumentError("kernel model needs at least one location");
  if (!(range > 0.0) || !std::isfinite(range)) throw ArgumentError("kernel range must be positive and finite");
  for (const auto& p : locations) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ArgumentError("kernel locations must be finite");
  }
}

}  // namespace

double distance(const Point2& a, const Point2& b) noexcept {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  const double big = std::max(dx, dy);
  if (big == 0.0) return 0.0;
  const double small = std::min(dx, dy) / big;
  return big * std::sqrt(1.0 + small * small);
}

std::vector<Point2> grid_locations(std::size_t d) {
  auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  // Guard the floating ceil against off-by-one for perfect squares.
  while (side * side < d) ++side;
  while (side > 1 && (side - 1) * (side - 1) >= d) --side;
  const auto k = static_cast<double>(side);
  std::vector<Point2> points(d);
  for (std::size_t i = 0; i < d; ++i) {
    points[i] = {static_cast<double>(i / side) / k, static_cast<double>(i % side) / k};
  }
  return points;
}

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Dense:
      return "dense";
    case ModelKind::PoweredExponential:
      return "powexp";
    case ModelKind::ScaledExponential:
      return "scaledexp";
    case ModelKind::Identity:
      return "identity";
  }
  return "unknown";
}

CovarianceModel CovarianceModel::identity(std::size_t d) {
  if (d == 0) throw ArgumentError("identity model: d must be positive");
  return CovarianceModel(d, Identity{});
}

CovarianceModel CovarianceModel::dense(std::vector<double> values, std::size_t d, double sym_tol) {
  if (d == 0) throw ArgumentError("dense model: d must be positive");
  if (values.size() != d * d) {
    throw ArgumentError("dense model: expected " + std::to_string(d * d) + " values, got " +
                        std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ArgumentError("dense model: values must be finite");
  }
  bool repaired = false;
  for (std::size_t i = 0; i < d; ++i) {
    double& diag = values[i * d + i];
    if (std::abs(diag - 1.0) > sym_tol) {
      throw ArgumentError("dense model: diagonal entry " + std::to_string(i) + " is " + std::to_string(diag) +
                          ", expected 1");
    }
    diag = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      double& upper = values[i * d + j];
      double& lower = values[j * d + i];
      if (upper == lower) continue;
      if (std::abs(upper - lower) > sym_tol) repaired = true;
      // Averaging within tolerance too keeps row i bitwise equal to column i.
      const double mean = 0.5 * (upper + lower);
      upper = mean;
      lower = mean;
    }
  }
  for (double v : values) {
    if (std::abs(v) > 1.0 + sym_tol) throw ArgumentError("dense model: correlation entries must lie in [-1, 1]");
  }
  return CovarianceModel(d, Dense{std::make_shared<const std::vector<double>>(std::move(values))}, repaired);
}

CovarianceModel CovarianceModel::powered_exponential(std::vector<Point2> locations, double range, double theta) {
  check_locations(locations, range);
  if (!(theta > 0.0 && theta <= 2.0)) throw ArgumentError("powered exponential: theta must lie in (0, 2]");
  const std::size_t d = locations.size();
  return CovarianceModel(d, PowExp{std::make_shared<const std::vector<Point2>>(std::move(locations)), range, theta});
}

CovarianceModel CovarianceModel::scaled_exponential(std::vector<Point2> locations, double range, double ratio) {
  check_locations(locations, range);
  if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("scaled exponential: ratio must lie in (0, 1)");
  const std::size_t d = locations.size();
  return CovarianceModel(d,
                         ScaledExp{std::make_shared<const std::vector<Point2>>(std::move(locations)), range, ratio});
}

ModelKind CovarianceModel::kind() const noexcept {
  return std::visit(Overloaded{[](const Identity&) { return ModelKind::Identity; },
                               [](const Dense&) { return ModelKind::Dense; },
                               [](const PowExp&) { return ModelKind::PoweredExponential; },
                               [](const ScaledExp&) { return ModelKind::ScaledExponential; }},
                    variant_);
}

void CovarianceModel::check_index(std::size_t i) const {
  if (i >= dim_) {
    throw ArgumentError("index " + std::to_string(i) + " out of range for d=" + std::to_string(dim_));
  }
}

double CovarianceModel::entry(std::size_t i, std::size_t j) const {
  check_index(i);
  check_index(j);
  if (i == j) return 1.0;
  return std::visit(Overloaded{[](const Identity&) { return 0.0; },
                               [&](const Dense& m) { return (*m.values)[i * dim_ + j]; },
                               [&](const PowExp& m) {
                                 const auto& s = *m.locations;
                                 return std::exp(-std::pow(distance(s[i], s[j]) / m.range, m.theta));
                               },
                               [&](const ScaledExp& m) {
                                 const auto& s = *m.locations;
                                 return m.ratio * std::exp(-distance(s[i], s[j]) / m.range);
                               }},
                    variant_);
}

void CovarianceModel::column(std::size_t i, std::span<double> out) const {
  check_index(i);
  if (out.size() != dim_) throw ArgumentError("column: output buffer has wrong length");
  std::visit(Overloaded{[&](const Identity&) { std::fill(out.begin(), out.end(), 0.0); },
                        [&](const Dense& m) {
                          // Symmetric storage: row i is column i.
                          const double* row = m.values->data() + i * dim_;
                          std::copy(row, row + dim_, out.begin());
                        },
                        [&](const PowExp& m) {
                          const auto& s = *m.locations;
                          const Point2 origin = s[i];
                          const double inv_range = 1.0 / m.range;
                          if (m.theta == 1.0) {
                            for (std::size_t j = 0; j < dim_; ++j) out[j] = std::exp(-distance(origin, s[j]) * inv_range);
                          } else {
                            for (std::size_t j = 0; j < dim_; ++j) {
                              out[j] = std::exp(-std::pow(distance(origin, s[j]) * inv_range, m.theta));
                            }
                          }
                        },
                        [&](const ScaledExp& m) {
                          const auto& s = *m.locations;
                          const Point2 origin = s[i];
                          const double inv_range = 1.0 / m.range;
                          for (std::size_t j = 0; j < dim_; ++j) {
                            out[j] = m.ratio * std::exp(-distance(origin, s[j]) * inv_range);
                          }
                        }},
             variant_);
  out[i] = 1.0;
}

std::vector<double> CovarianceModel::column(std::size_t i) const {
  std::vector<double> out(dim_);
  column(i, out);
  return out;
}

Eigen::MatrixXd CovarianceModel::materialize(std::size_t cap) const {
  if (dim_ > cap) throw CapacityError("materialize: dimension above cap", dim_, cap);
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd m(n, n);
  std::vector<double> col(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    column(i, col);
    m.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
  }
  return m;
}

std::span<const Point2> CovarianceModel::locations() const noexcept {
  if (const auto* p = std::get_if<PowExp>(&variant_)) return *p->locations;
  if (const auto* s = std::get_if<ScaledExp>(&variant_)) return *s->locations;
  return {};
}

std::span<const double> CovarianceModel::dense_values() const noexcept {
  if (const auto* m = std::get_if<Dense>(&variant_)) return *m->values;
  return {};
}

double CovarianceModel::range() const noexcept {
  if (const auto* p = std::get_if<PowExp>(&variant_)) return p->range;
  if (const auto* s = std::get_if<ScaledExp>(&variant_)) return s->range;
  return std::numeric_limits<double>::quiet_NaN();
}

double CovarianceModel::theta() const noexcept {
  if (const auto* p = std::get_if<PowExp>(&variant_)) return p->theta;
  return std::numeric_limits<double>::quiet_NaN();
}

double CovarianceModel::ratio() const noexcept {
  if (const auto* s = std::get_if<ScaledExp>(&variant_)) return s->ratio;
  return std::numeric_limits<double>::quiet_NaN();
}

ValidationReport validate(const CovarianceModel& model, double tol, std::size_t cap) {
  const Eigen::MatrixXd v = model.materialize(cap);
  ValidationReport report;
  report.symmetric = ((v - v.transpose()).cwiseAbs().maxCoeff() <= tol);
  report.unit_diagonal = ((v.diagonal().array() - 1.0).abs().maxCoeff() <= tol);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(v, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("validate: eigensolver did not converge");
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  return report;
}

}  // namespace gaussmc
