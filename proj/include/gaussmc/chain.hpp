#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "gaussmc/covariance.hpp"
#include "gaussmc/rng.hpp"

namespace gaussmc {

struct ChainState {
  std::vector<double> x;
  std::uint64_t n = 0;

  static ChainState zero(std::size_t d) { return ChainState{std::vector<double>(d, 0.0), 0}; }
};

// One applied step: refresh coordinate i with variate g, producing state n.
struct StepRecord {
  std::uint64_t n = 0;
  std::size_t i = 0;
  double g = 0.0;
};

/// Source of the coordinate sequence i_0, i_1, ...
class IndexSchedule {
 public:
  // i.i.d. uniform over {0, ..., d-1}.
  static IndexSchedule uniform(std::size_t d, RngStream stream);
  // order[n mod d]; order must be a permutation of {0, ..., d-1}.
  static IndexSchedule cycle(std::vector<std::size_t> order);

  std::size_t dim() const noexcept { return dim_; }
  bool is_random() const noexcept { return std::holds_alternative<RngStream>(source_); }

  std::size_t next(std::uint64_t n);

 private:
  IndexSchedule(std::size_t d, std::variant<RngStream, std::vector<std::size_t>> source)
      : dim_(d), source_(std::move(source)) {}

  std::size_t dim_;
  std::variant<RngStream, std::vector<std::size_t>> source_;
};

/// Applies X <- X + (g - X[i]) V e_i in place, reusing one column buffer.
///
/// Afterwards x[i] == g exactly: the column has a unit entry at i and the
/// stepper stores g there directly rather than relying on x[i] + (g - x[i]).
class Stepper {
 public:
  explicit Stepper(const CovarianceModel& model);

  const CovarianceModel& model() const noexcept { return *model_; }

  void apply(std::span<double> x, std::size_t i, double g);
  void apply(ChainState& state, std::size_t i, double g);

  // Same refresh on two chains with one column evaluation.
  void apply_pair(std::span<double> a, std::span<double> b, std::size_t i, double g);

 private:
  const CovarianceModel* model_;
  std::vector<double> column_;
};

ChainState step(ChainState state, const CovarianceModel& model, std::size_t i, double g);

/// Runs n steps from x0 and returns the final state. The visitor is called
/// after every step as visitor(const ChainState&, const StepRecord&); the
/// trajectory itself is never stored.
template <class Visitor>
ChainState run(const CovarianceModel& model, IndexSchedule& schedule, RngStream& g_stream, std::uint64_t n,
               std::vector<double> x0, Visitor&& visitor);

inline ChainState run(const CovarianceModel& model, IndexSchedule& schedule, RngStream& g_stream, std::uint64_t n,
                      std::vector<double> x0) {
  return run(model, schedule, g_stream, n, std::move(x0), [](const ChainState&, const StepRecord&) {});
}

/// Drives a chain from x0 = 0 and a second chain from x0_exact with the same
/// (i_n, g_n). visitor(const ChainState& a, const ChainState& b, const StepRecord&).
template <class Visitor>
std::pair<ChainState, ChainState> run_coupled(const CovarianceModel& model, IndexSchedule& schedule,
                                              RngStream& g_stream, std::uint64_t n, std::vector<double> x0_exact,
                                              Visitor&& visitor);

inline std::pair<ChainState, ChainState> run_coupled(const CovarianceModel& model, IndexSchedule& schedule,
                                                     RngStream& g_stream, std::uint64_t n,
                                                     std::vector<double> x0_exact) {
  return run_coupled(model, schedule, g_stream, n, std::move(x0_exact),
                     [](const ChainState&, const ChainState&, const StepRecord&) {});
}

// Re-applies logged steps to x0.
ChainState replay(const CovarianceModel& model, std::span<const StepRecord> records, std::vector<double> x0);

// Step log as CSV lines "n,i,g"; g is written with 17 significant digits so
// replay is exact.
void write_step_log_header(std::ostream& out);
void write_step_record(std::ostream& out, const StepRecord& record);
std::vector<StepRecord> read_step_log(std::istream& in);

namespace detail {
void check_start(const CovarianceModel& model, const IndexSchedule& schedule, std::span<const double> x0);
}

template <class Visitor>
ChainState run(const CovarianceModel& model, IndexSchedule& schedule, RngStream& g_stream, std::uint64_t n,
               std::vector<double> x0, Visitor&& visitor) {
  detail::check_start(model, schedule, x0);
  ChainState state{std::move(x0), 0};
  Stepper stepper(model);
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::size_t i = schedule.next(k);
    const double g = g_stream.next_gaussian();
    stepper.apply(state, i, g);
    visitor(std::as_const(state), StepRecord{state.n, i, g});
  }
  return state;
}

template <class Visitor>
std::pair<ChainState, ChainState> run_coupled(const CovarianceModel& model, IndexSchedule& schedule,
                                              RngStream& g_stream, std::uint64_t n, std::vector<double> x0_exact,
                                              Visitor&& visitor) {
  detail::check_start(model, schedule, x0_exact);
  ChainState a = ChainState::zero(model.dim());
  ChainState b{std::move(x0_exact), 0};
  Stepper stepper(model);
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::size_t i = schedule.next(k);
    const double g = g_stream.next_gaussian();
    stepper.apply_pair(a.x, b.x, i, g);
    ++a.n;
    ++b.n;
    visitor(std::as_const(a), std::as_const(b), StepRecord{a.n, i, g});
  }
  return {std::move(a), std::move(b)};
}

}  // namespace gaussmc
