#include "gaussmc/chain.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "gaussmc/errors.hpp"

namespace gaussmc {

IndexSchedule IndexSchedule::uniform(std::size_t d, RngStream stream) {
  if (d == 0) throw ArgumentError("index schedule: d must be positive");
  return IndexSchedule(d, std::move(stream));
}

IndexSchedule IndexSchedule::cycle(std::vector<std::size_t> order) {
  const std::size_t d = order.size();
  if (d == 0) throw ArgumentError("index schedule: empty cycle");
  std::vector<bool> seen(d, false);
  for (std::size_t i : order) {
    if (i >= d || seen[i]) throw ArgumentError("index schedule: cycle order must be a permutation of 0..d-1");
    seen[i] = true;
  }
  return IndexSchedule(d, std::move(order));
}

std::size_t IndexSchedule::next(std::uint64_t n) {
  if (auto* stream = std::get_if<RngStream>(&source_)) return stream->next_index(dim_);
  const auto& order = std::get<std::vector<std::size_t>>(source_);
  return order[static_cast<std::size_t>(n % order.size())];
}

Stepper::Stepper(const CovarianceModel& model) : model_(&model), column_(model.dim()) {}

void Stepper::apply(std::span<double> x, std::size_t i, double g) {
  const std::size_t d = column_.size();
  if (x.size() != d) throw ArgumentError("step: state has wrong length");
  if (i >= d) throw ArgumentError("step: index " + std::to_string(i) + " out of range");
  if (!std::isfinite(g) || !std::isfinite(x[i])) throw NumericError("step: non-finite input");
  model_->column(i, column_);
  const double delta = g - x[i];
  // probe stays 0 unless some coordinate is (or became) inf/NaN
  double probe = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    x[j] += delta * column_[j];
    probe += x[j] * 0.0;
  }
  x[i] = g;
  if (probe != 0.0) throw NumericError("step: state is not finite");
}

void Stepper::apply(ChainState& state, std::size_t i, double g) {
  apply(std::span<double>(state.x), i, g);
  ++state.n;
}

void Stepper::apply_pair(std::span<double> a, std::span<double> b, std::size_t i, double g) {
  const std::size_t d = column_.size();
  if (a.size() != d || b.size() != d) throw ArgumentError("step: state has wrong length");
  if (i >= d) throw ArgumentError("step: index " + std::to_string(i) + " out of range");
  if (!std::isfinite(g) || !std::isfinite(a[i]) || !std::isfinite(b[i])) throw NumericError("step: non-finite input");
  model_->column(i, column_);
  const double da = g - a[i];
  const double db = g - b[i];
  double probe = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    a[j] += da * column_[j];
    b[j] += db * column_[j];
    probe += a[j] * 0.0 + b[j] * 0.0;
  }
  a[i] = g;
  b[i] = g;
  if (probe != 0.0) throw NumericError("step: state is not finite");
}

ChainState step(ChainState state, const CovarianceModel& model, std::size_t i, double g) {
  Stepper stepper(model);
  stepper.apply(state, i, g);
  return state;
}

ChainState replay(const CovarianceModel& model, std::span<const StepRecord> records, std::vector<double> x0) {
  if (x0.size() != model.dim()) throw ArgumentError("replay: x0 has wrong length");
  ChainState state{std::move(x0), 0};
  Stepper stepper(model);
  for (const auto& r : records) stepper.apply(state, r.i, r.g);
  return state;
}

void write_step_log_header(std::ostream& out) { out << "n,i,g\n"; }

void write_step_record(std::ostream& out, const StepRecord& record) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", record.g);
  out << record.n << ',' << record.i << ',' << std::string_view(buf, static_cast<std::size_t>(len)) << '\n';
}

std::vector<StepRecord> read_step_log(std::istream& in) {
  std::vector<StepRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "n,i,g") continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw ArgumentError("step log: malformed line " + std::to_string(line_no));
    StepRecord r;
    const char* begin = line.data();
    auto ok = std::from_chars(begin, begin + c1, r.n).ec == std::errc{};
    ok = ok && std::from_chars(begin + c1 + 1, begin + c2, r.i).ec == std::errc{};
    try {
      r.g = std::stod(line.substr(c2 + 1));
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) throw ArgumentError("step log: malformed line " + std::to_string(line_no));
    records.push_back(r);
  }
  return records;
}

namespace detail {

void check_start(const CovarianceModel& model, const IndexSchedule& schedule, std::span<const double> x0) {
  if (x0.size() != model.dim()) throw ArgumentError("run: x0 has wrong length");
  if (schedule.dim() != model.dim()) throw ArgumentError("run: schedule dimension does not match model");
  for (double v : x0) {
    if (!std::isfinite(v)) throw NumericError("run: x0 is not finite");
  }
}

}  // namespace detail

}  // namespace gaussmc
