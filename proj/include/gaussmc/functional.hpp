#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gaussmc {

// E((h(X) - h(X'))^2) <= kappa^2 (E|X - X'|^2)^gamma for centered Gaussian
// pairs whose covariances are dominated by V.
struct LipschitzInfo {
  double kappa = 0.0;
  double gamma = 1.0;
};

/// The function h whose mean under N(0, V) is being estimated.
class TestFunctional {
 public:
  struct Constant {
    double value;
  };
  struct Coordinate {
    std::size_t index;
  };
  struct Max {
    double scale;
  };
  // (sum_i w_i exp(-sigma_i^2 T / 2 + sigma_i sqrt(T) x_i) - K e^{-rT})^+
  struct BasketCall {
    std::vector<double> weights;
    std::vector<double> vols;
    double maturity;
    double strike;
    double rate;
  };
  // 1 if x_i <= a_i for every i, else 0.
  struct IndicatorBelow {
    std::vector<double> threshold;
  };
  struct EuclideanNorm {};

  using Variant = std::variant<Constant, Coordinate, Max, BasketCall, IndicatorBelow, EuclideanNorm>;

  static TestFunctional constant(double value);
  static TestFunctional coordinate(std::size_t index);
  static TestFunctional max(double scale = 1.0);
  static TestFunctional basket_call(std::vector<double> weights, std::vector<double> vols, double maturity,
                                    double strike, double rate);
  // Equal weights 1/d and a common volatility.
  static TestFunctional basket_call(std::size_t d, double vol, double maturity, double strike, double rate);
  static TestFunctional indicator_below(std::vector<double> threshold);
  static TestFunctional euclidean_norm();

  /// Parses "const:3", "coord:0", "max", "max:sqrt(8)", "norm",
  /// "indicator:0.5" (same threshold in every coordinate, needs d),
  /// "basket:K=1,T=1,sigma=0.2,r=0" (weights 1/d, needs d).
  static TestFunctional parse(std::string_view spec, std::size_t d);

  const Variant& variant() const noexcept { return variant_; }
  std::string name() const;

  // Dimension the functional requires, if it fixes one.
  std::optional<std::size_t> required_dim() const noexcept;

  const std::optional<LipschitzInfo>& lipschitz() const noexcept { return lipschitz_; }
  TestFunctional& with_lipschitz(LipschitzInfo info);

  double evaluate(std::span<const double> x) const;

 private:
  TestFunctional(Variant v, std::optional<LipschitzInfo> lip) : variant_(std::move(v)), lipschitz_(lip) {}

  Variant variant_;
  std::optional<LipschitzInfo> lipschitz_;
};

// sqrt(sum_i w_i^2 e^{2 sigma_i^2} (4 sigma_i^2 + 1)) for
// (sum_i w_i e^{sigma_i x_i} - K)^+. The vols are effective ones, i.e. the
// coefficient multiplying x_i in the exponent.
double basket_kappa(std::span<const double> weights, std::span<const double> vols);

// 3 (d / a_hat)^{1/3}, the constant for the orthant indicator with exponent
// gamma = 1/3, where a_hat = min_i |a_i|.
double orthant_indicator_kappa(std::size_t d, double a_hat);

}  // namespace gaussmc
