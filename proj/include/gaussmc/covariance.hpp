#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace gaussmc {

inline constexpr double kSymTol = 1e-10;
inline constexpr std::size_t kValidateCap = 2048;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Euclidean distance, scaled so that squaring cannot overflow or underflow.
double distance(const Point2& a, const Point2& b) noexcept;

// Regular planar grid: point i is (floor(i/k)/k, (i mod k)/k) with k = ceil(sqrt(d)).
std::vector<Point2> grid_locations(std::size_t d);

enum class ModelKind { Dense, PoweredExponential, ScaledExponential, Identity };

std::string_view to_string(ModelKind kind) noexcept;

/// Correlation matrix V with unit diagonal and O(d) column access.
///
/// Kernel variants keep only the d locations and evaluate entries on demand,
/// so a model never holds d*d numbers unless it was built from a dense
/// matrix. Instances are immutable and cheap to copy (dense storage is
/// shared), and may be read concurrently.
class CovarianceModel {
 public:
  static CovarianceModel identity(std::size_t d);

  // Row-major d*d values. Asymmetry above sym_tol is repaired by averaging
  // with the transpose, which is reported by symmetrized(). Diagonal entries
  // must equal 1 within sym_tol and are then set to exactly 1.
  static CovarianceModel dense(std::vector<double> values, std::size_t d, double sym_tol = kSymTol);

  // exp(-(|s_i - s_j| / range)^theta), theta in (0, 2].
  static CovarianceModel powered_exponential(std::vector<Point2> locations, double range, double theta);

  // ratio * exp(-|s_i - s_j| / range) off the diagonal, 1 on it; ratio in (0, 1).
  static CovarianceModel scaled_exponential(std::vector<Point2> locations, double range, double ratio);

  std::size_t dim() const noexcept { return dim_; }
  ModelKind kind() const noexcept;
  bool symmetrized() const noexcept { return symmetrized_; }

  double entry(std::size_t i, std::size_t j) const;

  // Writes V e_i into out (size d) in O(d).
  void column(std::size_t i, std::span<double> out) const;
  std::vector<double> column(std::size_t i) const;

  // Full d*d matrix; throws CapacityError above cap.
  Eigen::MatrixXd materialize(std::size_t cap = kValidateCap) const;

  // Parameter accessors; empty/NaN where the variant has no such field.
  std::span<const Point2> locations() const noexcept;
  std::span<const double> dense_values() const noexcept;
  double range() const noexcept;
  double theta() const noexcept;
  double ratio() const noexcept;

 private:
  struct Identity {};
  struct Dense {
    std::shared_ptr<const std::vector<double>> values;
  };
  struct PowExp {
    std::shared_ptr<const std::vector<Point2>> locations;
    double range;
    double theta;
  };
  struct ScaledExp {
    std::shared_ptr<const std::vector<Point2>> locations;
    double range;
    double ratio;
  };
  using Variant = std::variant<Identity, Dense, PowExp, ScaledExp>;

  CovarianceModel(std::size_t d, Variant v, bool symmetrized = false)
      : dim_(d), variant_(std::move(v)), symmetrized_(symmetrized) {}

  void check_index(std::size_t i) const;

  std::size_t dim_;
  Variant variant_;
  bool symmetrized_;
};

struct ValidationReport {
  bool symmetric = false;
  bool unit_diagonal = false;
  double min_eigenvalue = 0.0;
};

// Materializes V and checks the correlation-matrix assumptions; the smallest
// eigenvalue comes from a symmetric eigensolver.
ValidationReport validate(const CovarianceModel& model, double tol = kSymTol, std::size_t cap = kValidateCap);

}  // namespace gaussmc
