#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "gaussmc/baseline.hpp"
#include "gaussmc/chain.hpp"
#include "gaussmc/covariance.hpp"
#include "gaussmc/diagnostics.hpp"
#include "gaussmc/errors.hpp"
#include "gaussmc/estimators.hpp"
#include "gaussmc/functional.hpp"
#include "gaussmc/model_io.hpp"

namespace py = pybind11;
using namespace gaussmc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point2> to_points(const Array& locations) {
  if (locations.ndim() != 2 || locations.shape(1) != 2) throw ArgumentError("locations must have shape (d, 2)");
  const auto view = locations.unchecked<2>();
  std::vector<Point2> points(static_cast<std::size_t>(view.shape(0)));
  for (py::ssize_t i = 0; i < view.shape(0); ++i) points[static_cast<std::size_t>(i)] = {view(i, 0), view(i, 1)};
  return points;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw ArgumentError("expected a 1-d array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

IndexSchedule make_schedule(const CovarianceModel& model, std::uint64_t seed, std::uint64_t replication,
                            const std::optional<std::vector<std::size_t>>& order) {
  if (order) return IndexSchedule::cycle(*order);
  return IndexSchedule::uniform(model.dim(), RngStream(seed, replication, kIndexSubstream));
}

std::vector<double> start_vector(const CovarianceModel& model, const std::optional<Array>& x0) {
  if (!x0) return std::vector<double>(model.dim(), 0.0);
  return to_vector(*x0);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "O(d)-storage Markov chain sampler for Gaussian vectors with a given correlation matrix";

  static py::exception<Error> base_error(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<NotPsdError>(m, "NotPsdError", PyExc_ArithmeticError);
  py::register_exception<FactorizationError>(m, "FactorizationError", PyExc_ArithmeticError);

  // covariance
  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def_static("identity", &CovarianceModel::identity, py::arg("d"))
      .def_static(
          "dense",
          [](const Array& values, double sym_tol) {
            if (values.ndim() != 2 || values.shape(0) != values.shape(1)) throw ArgumentError("dense: need a square matrix");
            const auto d = static_cast<std::size_t>(values.shape(0));
            return CovarianceModel::dense(std::vector<double>(values.data(), values.data() + values.size()), d, sym_tol);
          },
          py::arg("values"), py::arg("sym_tol") = kSymTol)
      .def_static(
          "powered_exponential",
          [](const Array& locations, double r, double theta) {
            return CovarianceModel::powered_exponential(to_points(locations), r, theta);
          },
          py::arg("locations"), py::arg("r"), py::arg("theta"))
      .def_static(
          "scaled_exponential",
          [](const Array& locations, double r, double ratio) {
            return CovarianceModel::scaled_exponential(to_points(locations), r, ratio);
          },
          py::arg("locations"), py::arg("r"), py::arg("ratio"))
      .def_static(
          "from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); },
          py::arg("descriptor"))
      .def("to_json", [](const CovarianceModel& model) { return model_to_json(model).dump(); })
      .def_property_readonly("dim", &CovarianceModel::dim)
      .def_property_readonly("kind", [](const CovarianceModel& model) { return std::string(to_string(model.kind())); })
      .def_property_readonly("symmetrized", &CovarianceModel::symmetrized)
      .def("entry", &CovarianceModel::entry, py::arg("i"), py::arg("j"))
      .def(
          "column", [](const CovarianceModel& model, std::size_t i) { return to_array(model.column(i)); },
          py::arg("i"))
      .def("materialize", &CovarianceModel::materialize, py::arg("cap") = kValidateCap);

  m.def(
      "grid_locations",
      [](std::size_t d) {
        const auto points = grid_locations(d);
        Array out({static_cast<py::ssize_t>(d), py::ssize_t{2}});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < d; ++i) {
          view(static_cast<py::ssize_t>(i), 0) = points[i].x;
          view(static_cast<py::ssize_t>(i), 1) = points[i].y;
        }
        return out;
      },
      py::arg("d"));

  m.def(
      "validate",
      [](const CovarianceModel& model, double tol) {
        const auto r = validate(model, tol);
        py::dict out;
        out["symmetric"] = r.symmetric;
        out["unit_diagonal"] = r.unit_diagonal;
        out["min_eigenvalue"] = r.min_eigenvalue;
        return out;
      },
      py::arg("model"), py::arg("tol") = kSymTol);

  // rng
  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0,
           py::arg("substream") = 0)
      .def("next_gaussian", &RngStream::next_gaussian)
      .def("next_index", &RngStream::next_index, py::arg("d"))
      .def(
          "gaussians",
          [](RngStream& s, std::size_t count) {
            std::vector<double> v(count);
            for (double& x : v) x = s.next_gaussian();
            return to_array(v);
          },
          py::arg("count"));

  // chain
  m.def(
      "step",
      [](const Array& x, const CovarianceModel& model, std::size_t i, double g) {
        return to_array(step(ChainState{to_vector(x), 0}, model, i, g).x);
      },
      py::arg("x"), py::arg("model"), py::arg("i"), py::arg("g"));

  m.def(
      "run",
      [](const CovarianceModel& model, std::uint64_t n, std::uint64_t seed, std::optional<Array> x0,
         std::uint64_t replication, std::optional<std::vector<std::size_t>> order) {
        auto schedule = make_schedule(model, seed, replication, order);
        RngStream g_stream(seed, replication, kGaussianSubstream);
        auto start = start_vector(model, x0);
        ChainState final_state;
        {
          py::gil_scoped_release release;
          final_state = run(model, schedule, g_stream, n, std::move(start));
        }
        return to_array(final_state.x);
      },
      py::arg("model"), py::arg("n"), py::arg("seed"), py::arg("x0") = std::nullopt, py::arg("replication") = 0,
      py::arg("order") = std::nullopt, "Final state X_n of a chain driven by the replication streams of seed.");

  m.def(
      "run_coupled",
      [](const CovarianceModel& model, std::uint64_t n, std::uint64_t seed, const Array& x0_exact,
         std::uint64_t replication) {
        auto schedule = IndexSchedule::uniform(model.dim(), RngStream(seed, replication, kIndexSubstream));
        RngStream g_stream(seed, replication, kGaussianSubstream);
        auto result = run_coupled(model, schedule, g_stream, n, to_vector(x0_exact));
        return py::make_tuple(to_array(result.first.x), to_array(result.second.x));
      },
      py::arg("model"), py::arg("n"), py::arg("seed"), py::arg("x0_exact"), py::arg("replication") = 0);

  // baseline
  py::class_<CholeskyFactor>(m, "CholeskyFactor")
      .def_static(
          "from_model",
          [](const CovarianceModel& model, double pivot_tol) { return CholeskyFactor::factor(model, pivot_tol); },
          py::arg("model"), py::arg("pivot_tol") = kPivotTol)
      .def_static(
          "from_matrix",
          [](const Eigen::MatrixXd& v, double pivot_tol) { return CholeskyFactor::factor(v, pivot_tol); },
          py::arg("matrix"), py::arg("pivot_tol") = kPivotTol)
      .def_property_readonly("dim", &CholeskyFactor::dim)
      .def_property_readonly("lower", &CholeskyFactor::lower);

  m.def(
      "sample_exact", [](const CholeskyFactor& f, RngStream& s) { return to_array(sample_exact(f, s)); },
      py::arg("factor"), py::arg("stream"));

  m.def(
      "mc_estimate",
      [](const CholeskyFactor& f, const TestFunctional& h, std::size_t n_prime, RngStream& stream) {
        const auto e = mc_estimate(f, h, n_prime, stream);
        py::dict out;
        out["mean"] = e.mean;
        out["stdev"] = e.stdev;
        out["var_of_mean"] = e.var_of_mean;
        out["samples"] = e.samples;
        return out;
      },
      py::arg("factor"), py::arg("h"), py::arg("n_prime"), py::arg("stream"));

  // estimators
  py::class_<TestFunctional>(m, "TestFunctional")
      .def_static("parse", &TestFunctional::parse, py::arg("spec"), py::arg("d") = 0)
      .def_static("constant", &TestFunctional::constant, py::arg("value"))
      .def_static("coordinate", &TestFunctional::coordinate, py::arg("index"))
      .def_static("max", &TestFunctional::max, py::arg("scale") = 1.0)
      .def_static("euclidean_norm", &TestFunctional::euclidean_norm)
      .def_static("indicator_below", &TestFunctional::indicator_below, py::arg("threshold"))
      .def_static(
          "basket_call",
          [](std::vector<double> w, std::vector<double> vols, double maturity, double strike, double rate) {
            return TestFunctional::basket_call(std::move(w), std::move(vols), maturity, strike, rate);
          },
          py::arg("weights"), py::arg("vols"), py::arg("maturity"), py::arg("strike"), py::arg("rate"))
      .def_property_readonly("name", &TestFunctional::name)
      .def_property_readonly("lipschitz",
                             [](const TestFunctional& h) -> std::optional<std::pair<double, double>> {
                               if (!h.lipschitz()) return std::nullopt;
                               return std::make_pair(h.lipschitz()->kappa, h.lipschitz()->gamma);
                             })
      .def(
          "evaluate", [](const TestFunctional& h, const Array& x) { return h.evaluate(to_vector(x)); }, py::arg("x"))
      .def("__call__", [](const TestFunctional& h, const Array& x) { return h.evaluate(to_vector(x)); });

  m.def(
      "mcmc_estimate",
      [](const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b, std::uint64_t seed,
         std::uint64_t replication) {
        py::gil_scoped_release release;
        return mcmc_estimate(model, h, n, b, seed, replication).estimate;
      },
      py::arg("model"), py::arg("h"), py::arg("n"), py::arg("b"), py::arg("seed"), py::arg("replication") = 0);

  m.def(
      "estimate_mse",
      [](const CovarianceModel& model, const TestFunctional& h, std::uint64_t n, std::uint64_t b,
         std::size_t replications, std::uint64_t seed, unsigned threads) {
        MseReport r;
        {
          py::gil_scoped_release release;
          r = estimate_mse(model, h, n, b, replications, seed, {threads, kPivotTol});
        }
        py::dict out;
        out["n"] = r.n;
        out["b"] = r.b;
        out["replications"] = r.replications;
        out["variance_term"] = r.variance_term;
        out["bias_term"] = r.bias_term;
        out["bias_std_error"] = r.bias_std_error;
        out["mse"] = r.mse;
        out["mcmc_mean"] = r.mcmc_mean;
        out["exact_chain_mean"] = r.exact_chain_mean;
        out["mcmc_values"] = to_array(r.mcmc_values);
        out["exact_values"] = to_array(r.exact_values);
        return out;
      },
      py::arg("model"), py::arg("h"), py::arg("n"), py::arg("b"), py::arg("replications") = 100, py::arg("seed") = 1,
      py::arg("threads") = 1);

  m.def("basket_kappa", [](const std::vector<double>& w, const std::vector<double>& s) { return basket_kappa(w, s); },
        py::arg("weights"), py::arg("vols"));
  m.def("mse_bound", &mse_bound, py::arg("kappa"), py::arg("d"), py::arg("n"));
  m.def("wasserstein_bound", &wasserstein_bound, py::arg("d"), py::arg("n"));
  m.def("kappa_prime", &kappa_prime, py::arg("kappa"), py::arg("lam"), py::arg("gamma"), py::arg("d"));
  m.def("burnin_bias_bound", &burnin_bias_bound, py::arg("kappa"), py::arg("lam"), py::arg("gamma"), py::arg("n"),
        py::arg("d"));

  // diagnostics
  m.def("matrix_sqrt", [](const Eigen::MatrixXd& v) { return matrix_sqrt(v).s; }, py::arg("v"));
  m.def(
      "expected_m_norms", [](const Eigen::MatrixXd& v, std::uint64_t n_max) { return expected_m_norms(v, n_max).values; },
      py::arg("v"), py::arg("n_max"));
  m.def("gaussian_w2", &gaussian_w2, py::arg("a"), py::arg("b"));
  m.def(
      "empirical_covariance",
      [](const Array& samples) {
        if (samples.ndim() != 2) throw ArgumentError("samples must have shape (count, d)");
        const auto rows = samples.shape(0);
        const auto d = static_cast<std::size_t>(samples.shape(1));
        EmpiricalCovariance acc(d);
        for (py::ssize_t r = 0; r < rows; ++r) acc.add(std::span<const double>(samples.data(r, 0), d));
        return acc.covariance();
      },
      py::arg("samples"));
  m.def(
      "certify_exp_lipschitz",
      [](double nu_max, double step, std::size_t cov_steps) {
        const auto grid = exp_lipschitz_grid(nu_max, step, cov_steps);
        const auto r = certify_exp_lipschitz(grid);
        py::dict out;
        out["min_slack"] = r.min_slack;
        out["points"] = r.points;
        out["worst"] = py::make_tuple(r.worst.nu, r.worst.nu_prime, r.worst.cov);
        return out;
      },
      py::arg("nu_max") = 4.0, py::arg("step") = 0.05, py::arg("cov_steps") = 20);
}
