#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "bgmm/config_json.hpp"
#include "bgmm/errors.hpp"
#include "bgmm/harness.hpp"

namespace py = pybind11;
using namespace bgmm;

namespace {

WeightingSpec make_spec(const std::string& estimator, int n_star, int n_permutations,
                        double eigen_floor) {
  WeightingSpec spec;
  spec.kind = weighting_kind_from_name(estimator);
  spec.n_star = n_star;
  spec.n_permutations = n_permutations;
  spec.eigen_floor = eigen_floor;
  return spec;
}

AdaptationStrategy make_strategy(const std::string& name, double alpha0,
                                 std::optional<double> alpha1,
                                 std::optional<double> true_gamma) {
  if (name == "oracle") {
    if (!true_gamma) throw InputError("oracle strategy needs true_gamma");
    OracleStrategy s;
    s.theta_true = Eigen::VectorXd::Constant(1, *true_gamma);
    return s;
  }
  if (name == "concurrent") return ConcurrentStrategy{};
  if (name == "stochastic") return StochasticStrategy{};
  if (name == "continuous") return ContinuousStrategy{};
  if (name == "random") {
    RandomStrategy s;
    s.alpha0 = alpha0;
    s.alpha1 = alpha1;
    return s;
  }
  throw InputError("unknown strategy `" + name + "`");
}

}  // namespace

PYBIND11_MODULE(_bgmm, m) {
  m.doc() = "Quasi-Bayesian GMM with adaptively tuned weighting matrices";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Eigen::VectorXd y, Eigen::VectorXd x, Eigen::MatrixXd z) {
             Dataset d{std::move(y), std::move(x), std::move(z)};
             d.validate();
             return d;
           }),
           py::arg("y"), py::arg("x"), py::arg("z"))
      .def_readonly("y", &Dataset::y)
      .def_readonly("x", &Dataset::x)
      .def_readonly("z", &Dataset::z)
      .def_property_readonly("n_rows", &Dataset::n_rows)
      .def_property_readonly("n_instruments", &Dataset::n_instruments);

  m.def("load_dataset_csv", &load_dataset_csv, py::arg("path"));
  m.def("save_dataset_csv", &save_dataset_csv, py::arg("data"), py::arg("path"));

  m.def(
      "moment_matrix",
      [](const Dataset& data, double gamma) {
        LinearIVModel model(static_cast<int>(data.n_instruments()));
        return model.moment_matrix(data, Eigen::VectorXd::Constant(1, gamma));
      },
      py::arg("data"), py::arg("gamma"),
      "N x K linear IV moment matrix (y - gamma x) z.");
  m.def("moment_mean", &moment_mean, py::arg("moments"));
  m.def("tsls_estimate", &tsls_estimate, py::arg("data"));

  py::class_<WeightingMatrix>(m, "WeightingMatrix")
      .def_readonly("mat", &WeightingMatrix::mat)
      .def_property_readonly("log_det", [](const WeightingMatrix& w) {
        return w.log_det ? py::cast(*w.log_det) : py::none();
      });

  m.def("standard_precision", &standard_precision, py::arg("moments"));
  m.def("pseudo_precision", &pseudo_precision, py::arg("moments"));
  m.def("subsample_covariances", &subsample_covariances, py::arg("moments"), py::arg("n_star"));
  m.def("ner_single_split", &ner_single_split, py::arg("moments"), py::arg("n_star"),
        py::arg("eigen_floor") = 1e-10);
  m.def(
      "ner_precision",
      [](const Eigen::MatrixXd& moments, int n_star, int n_permutations, double eigen_floor,
         std::uint64_t seed) {
        const WeightingSpec spec = make_spec("ner", n_star, n_permutations, eigen_floor);
        Rng rng(seed);
        return ner_precision(moments, spec, rng);
      },
      py::arg("moments"), py::arg("n_star") = 0, py::arg("n_permutations") = 50,
      py::arg("eigen_floor") = 1e-10, py::arg("seed") = 0);
  m.def(
      "split_criterion",
      [](const Eigen::MatrixXd& moments, int n_star, int n_permutations, std::uint64_t seed) {
        Rng rng(seed);
        return split_criterion(moments, n_star, n_permutations, rng);
      },
      py::arg("moments"), py::arg("n_star"), py::arg("n_permutations") = 1, py::arg("seed") = 0);
  m.def("candidate_grid", &candidate_grid, py::arg("n_rows"));

  py::class_<DgpConfig>(m, "DgpConfig")
      .def(py::init([](int n, int k, int s, double gamma, double phi, double varsigma_x,
                       double varsigma_y, std::uint64_t seed) {
             DgpConfig cfg{n, k, s, gamma, phi, varsigma_x, varsigma_y, seed};
             cfg.validate();
             return cfg;
           }),
           py::arg("n") = 200, py::arg("k") = 50, py::arg("s") = 3, py::arg("gamma") = 0.5,
           py::arg("phi") = 0.2, py::arg("varsigma_x") = 2.0, py::arg("varsigma_y") = 2.0,
           py::arg("seed") = 0)
      .def_readwrite("n", &DgpConfig::n)
      .def_readwrite("k", &DgpConfig::k)
      .def_readwrite("s", &DgpConfig::s)
      .def_readwrite("gamma", &DgpConfig::gamma)
      .def_readwrite("phi", &DgpConfig::phi)
      .def_readwrite("seed", &DgpConfig::seed);

  py::class_<DgpDraw>(m, "DgpDraw")
      .def_readonly("data", &DgpDraw::data)
      .def_readonly("sigma2_x", &DgpDraw::sigma2_x)
      .def_readonly("sigma2_y", &DgpDraw::sigma2_y)
      .def_readonly("gamma_true", &DgpDraw::gamma_true);

  m.def("generate_dataset", py::overload_cast<const DgpConfig&>(&generate_dataset),
        py::arg("config"));

  py::class_<ChainOutput>(m, "ChainOutput")
      .def_readonly("draws", &ChainOutput::draws)
      .def_readonly("recursive_means", &ChainOutput::recursive_means)
      .def_readonly("adaptation_times", &ChainOutput::adaptation_times)
      .def_readonly("accept_rate", &ChainOutput::accept_rate)
      .def_readonly("wall_time", &ChainOutput::wall_time)
      .def_readonly("failed", &ChainOutput::failed)
      .def_readonly("failure_reason", &ChainOutput::failure_reason);

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("post_mean", &EstimateReport::post_mean)
      .def_readonly("post_sd", &EstimateReport::post_sd)
      .def_readonly("iqr", &EstimateReport::iqr)
      .def_readonly("failed", &EstimateReport::failed)
      .def_property_readonly(
          "failure_reason",
          [](const EstimateReport& r) { return std::string(failure_reason_name(r.reason)); })
      .def_readonly("accept_rate", &EstimateReport::accept_rate)
      .def_readonly("n_adaptations", &EstimateReport::n_adaptations)
      .def_readonly("wall_time", &EstimateReport::wall_time)
      .def_readonly("chain", &EstimateReport::chain);

  m.def(
      "estimate",
      [](const Dataset& data, const std::string& estimator, const std::string& strategy,
         int n_star, int n_permutations, double eigen_floor, long draws, long warmup,
         std::uint64_t seed, double alpha0, std::optional<double> alpha1,
         std::optional<double> true_gamma) {
        EstimateRequest request;
        request.weighting = make_spec(estimator, n_star, n_permutations, eigen_floor);
        request.strategy = make_strategy(strategy, alpha0, alpha1, true_gamma);
        request.j_total = draws;
        request.j_warmup = warmup;
        request.seed = seed;
        return estimate_dataset(data, request);
      },
      py::arg("data"), py::arg("estimator") = "ner", py::arg("strategy") = "random",
      py::arg("n_star") = 0, py::arg("n_permutations") = 50, py::arg("eigen_floor") = 1e-10,
      py::arg("draws") = 30000, py::arg("warmup") = 10000, py::arg("seed") = 0,
      py::arg("alpha0") = -1.0, py::arg("alpha1") = py::none(),
      py::arg("true_gamma") = py::none(),
      py::call_guard<py::gil_scoped_release>(),
      "Run one MCMC estimation of the linear IV coefficient.");

  py::class_<ProfileRow>(m, "ProfileRow")
      .def_readonly("n_star", &ProfileRow::n_star)
      .def_readonly("median", &ProfileRow::median)
      .def_readonly("p05", &ProfileRow::p05)
      .def_readonly("p95", &ProfileRow::p95);

  m.def(
      "criterion_profile",
      [](const DgpConfig& cfg, const std::vector<int>& grid, int n_permutations,
         std::uint64_t seed) {
        Rng rng(seed);
        return criterion_profile(cfg, grid, n_permutations, rng);
      },
      py::arg("config"), py::arg("grid"), py::arg("n_permutations") = 100, py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def("fine_profile_grid", &fine_profile_grid, py::arg("n_rows"));

  m.def("adaptation_probability", &adaptation_probability, py::arg("j"), py::arg("alpha0"),
        py::arg("alpha1"));
  m.def("interquantile_range", &interquantile_range, py::arg("draws"), py::arg("lo") = 0.25,
        py::arg("hi") = 0.75);

  m.attr("__version__") = "0.1.0";
}
