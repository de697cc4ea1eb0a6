#include "gaussmc/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gaussmc/errors.hpp"

namespace gaussmc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// A number, or sqrt(number).
double parse_number(std::string_view text) {
  text = trim(text);
  if (text.starts_with("sqrt(") && text.ends_with(")")) {
    const double inner = parse_number(text.substr(5, text.size() - 6));
    if (inner < 0.0) throw ArgumentError("functional spec: sqrt of negative number");
    return std::sqrt(inner);
  }
  std::string owned(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(owned, &used);
  } catch (const std::exception&) {
    throw ArgumentError("functional spec: cannot parse number '" + owned + "'");
  }
  if (used != owned.size()) throw ArgumentError("functional spec: cannot parse number '" + owned + "'");
  return value;
}

std::map<std::string, double, std::less<>> parse_params(std::string_view text) {
  std::map<std::string, double, std::less<>> params;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ArgumentError("functional spec: expected key=value, got '" + std::string(item) + "'");
    params.emplace(std::string(trim(item.substr(0, eq))), parse_number(item.substr(eq + 1)));
  }
  return params;
}

double get_param(const std::map<std::string, double, std::less<>>& params, std::string_view key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// log(sum_i exp(terms_i)) without overflow.
double log_sum_exp(std::span<const double> terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

}  // namespace

TestFunctional TestFunctional::constant(double value) { return {Constant{value}, LipschitzInfo{0.0, 1.0}}; }

TestFunctional TestFunctional::coordinate(std::size_t index) { return {Coordinate{index}, LipschitzInfo{1.0, 1.0}}; }

TestFunctional TestFunctional::max(double scale) {
  if (!std::isfinite(scale)) throw ArgumentError("max functional: scale must be finite");
  return {Max{scale}, LipschitzInfo{std::abs(scale), 1.0}};
}

TestFunctional TestFunctional::basket_call(std::vector<double> weights, std::vector<double> vols, double maturity,
                                           double strike, double rate) {
  if (weights.empty() || weights.size() != vols.size()) {
    throw ArgumentError("basket call: weights and vols must be non-empty and of equal length");
  }
  if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w >= 0.0); })) {
    throw ArgumentError("basket call: weights must be non-negative");
  }
  if (!(maturity >= 0.0)) throw ArgumentError("basket call: maturity must be non-negative");
  // Rewriting each term as (w_i e^{-sigma_i^2 T/2}) e^{(sigma_i sqrt T) x_i}
  // puts h in the form covered by basket_kappa.
  std::vector<double> eff_weights(weights.size());
  std::vector<double> eff_vols(vols.size());
  const double root_t = std::sqrt(maturity);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    eff_weights[i] = weights[i] * std::exp(-0.5 * vols[i] * vols[i] * maturity);
    eff_vols[i] = vols[i] * root_t;
  }
  const LipschitzInfo lip{basket_kappa(eff_weights, eff_vols), 1.0};
  return {BasketCall{std::move(weights), std::move(vols), maturity, strike, rate}, lip};
}

TestFunctional TestFunctional::basket_call(std::size_t d, double vol, double maturity, double strike, double rate) {
  if (d == 0) throw ArgumentError("basket call: d must be positive");
  return basket_call(std::vector<double>(d, 1.0 / static_cast<double>(d)), std::vector<double>(d, vol), maturity,
                     strike, rate);
}

TestFunctional TestFunctional::indicator_below(std::vector<double> threshold) {
  if (threshold.empty()) throw ArgumentError("indicator: threshold must be non-empty");
  double a_hat = std::numeric_limits<double>::infinity();
  for (double a : threshold) a_hat = std::min(a_hat, std::abs(a));
  std::optional<LipschitzInfo> lip;
  if (a_hat > 0.0) lip = LipschitzInfo{orthant_indicator_kappa(threshold.size(), a_hat), 1.0 / 3.0};
  return {IndicatorBelow{std::move(threshold)}, lip};
}

TestFunctional TestFunctional::euclidean_norm() { return {EuclideanNorm{}, LipschitzInfo{1.0, 1.0}}; }

TestFunctional TestFunctional::parse(std::string_view spec, std::size_t d) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const auto head = trim(spec.substr(0, colon));
  const auto tail = colon == std::string_view::npos ? std::string_view{} : trim(spec.substr(colon + 1));

  if (head == "const") return constant(parse_number(tail));
  if (head == "coord") {
    const double k = parse_number(tail);
    if (k < 0.0 || k != std::floor(k)) throw ArgumentError("functional spec: coord index must be a non-negative integer");
    return coordinate(static_cast<std::size_t>(k));
  }
  if (head == "max") return max(tail.empty() ? 1.0 : parse_number(tail));
  if (head == "norm") return euclidean_norm();
  if (head == "indicator") {
    if (d == 0) throw ArgumentError("functional spec: indicator needs the dimension");
    return indicator_below(std::vector<double>(d, tail.empty() ? 0.0 : parse_number(tail)));
  }
  if (head == "basket") {
    if (d == 0) throw ArgumentError("functional spec: basket needs the dimension");
    const auto params = parse_params(tail);
    for (const auto& [key, value] : params) {
      if (key != "K" && key != "T" && key != "sigma" && key != "r") {
        throw ArgumentError("functional spec: unknown basket parameter '" + key + "'");
      }
    }
    return basket_call(d, get_param(params, "sigma", 0.2), get_param(params, "T", 1.0), get_param(params, "K", 1.0),
                       get_param(params, "r", 0.0));
  }
  throw ArgumentError("functional spec: unknown functional '" + std::string(head) + "'");
}

std::string TestFunctional::name() const {
  return std::visit(Overloaded{[](const Constant&) { return std::string("const"); },
                               [](const Coordinate&) { return std::string("coord"); },
                               [](const Max&) { return std::string("max"); },
                               [](const BasketCall&) { return std::string("basket"); },
                               [](const IndicatorBelow&) { return std::string("indicator"); },
                               [](const EuclideanNorm&) { return std::string("norm"); }},
                    variant_);
}

std::optional<std::size_t> TestFunctional::required_dim() const noexcept {
  if (const auto* b = std::get_if<BasketCall>(&variant_)) return b->weights.size();
  if (const auto* a = std::get_if<IndicatorBelow>(&variant_)) return a->threshold.size();
  return std::nullopt;
}

TestFunctional& TestFunctional::with_lipschitz(LipschitzInfo info) {
  if (!(info.kappa >= 0.0) || !(info.gamma > 0.0 && info.gamma <= 1.0)) {
    throw ArgumentError("lipschitz metadata: need kappa >= 0 and gamma in (0, 1]");
  }
  lipschitz_ = info;
  return *this;
}

double TestFunctional::evaluate(std::span<const double> x) const {
  if (const auto need = required_dim(); need && *need != x.size()) {
    throw ArgumentError("functional " + name() + ": expected dimension " + std::to_string(*need) + ", got " +
                        std::to_string(x.size()));
  }
  return std::visit(
      Overloaded{[](const Constant& c) { return c.value; },
                 [&](const Coordinate& c) {
                   if (c.index >= x.size()) throw ArgumentError("coord functional: index out of range");
                   return x[c.index];
                 },
                 [&](const Max& m) {
                   if (x.empty()) throw ArgumentError("max functional: empty vector");
                   return m.scale * *std::max_element(x.begin(), x.end());
                 },
                 [&](const BasketCall& b) {
                   const double root_t = std::sqrt(b.maturity);
                   std::vector<double> logs;
                   logs.reserve(x.size());
                   for (std::size_t i = 0; i < x.size(); ++i) {
                     if (b.weights[i] == 0.0) continue;
                     const double s = b.vols[i];
                     logs.push_back(std::log(b.weights[i]) - 0.5 * s * s * b.maturity + s * root_t * x[i]);
                   }
                   const double basket = logs.empty() ? 0.0 : std::exp(log_sum_exp(logs));
                   return std::max(basket - b.strike * std::exp(-b.rate * b.maturity), 0.0);
                 },
                 [&](const IndicatorBelow& a) {
                   for (std::size_t i = 0; i < x.size(); ++i) {
                     if (!(x[i] <= a.threshold[i])) return 0.0;
                   }
                   return 1.0;
                 },
                 [&](const EuclideanNorm&) {
                   double scale = 0.0;
                   for (double v : x) scale = std::max(scale, std::abs(v));
                   if (scale == 0.0) return 0.0;
                   double acc = 0.0;
                   for (double v : x) {
                     const double t = v / scale;
                     acc += t * t;
                   }
                   return scale * std::sqrt(acc);
                 }},
      variant_);
}

double basket_kappa(std::span<const double> weights, std::span<const double> vols) {
  if (weights.size() != vols.size()) throw ArgumentError("basket_kappa: weights and vols differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw ArgumentError("basket_kappa: weights must be non-negative");
    const double s2 = vols[i] * vols[i];
    acc += weights[i] * weights[i] * std::exp(2.0 * s2) * (4.0 * s2 + 1.0);
  }
  return std::sqrt(acc);
}

double orthant_indicator_kappa(std::size_t d, double a_hat) {
  if (!(a_hat > 0.0)) throw ArgumentError("orthant_indicator_kappa: a_hat must be positive");
  return 3.0 * std::cbrt(static_cast<double>(d) / a_hat);
}

}  // namespace gaussmc
