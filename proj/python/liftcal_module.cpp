#include <optional>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liftcal/distributions.hpp"
#include "liftcal/error.hpp"
#include "liftcal/intervals.hpp"
#include "liftcal/lcd.hpp"
#include "liftcal/lifted_fit.hpp"
#include "liftcal/mcmc.hpp"
#include "liftcal/outliers.hpp"
#include "liftcal/synth.hpp"

namespace py = pybind11;
using namespace liftcal;

namespace {

CalibrationSet make_calib(std::vector<double> y, std::vector<double> f) {
  return CalibrationSet(std::move(y), std::move(f));
}

Link to_link(const std::string& s) {
  if (s == "identity") return Link::Identity;
  if (s == "logit") return Link::Logit;
  if (s == "log") return Link::Log;
  throw InvalidParameterError("unknown link '" + s + "'");
}

NullKind to_null(const std::string& s, Link link) {
  if (s == "default") return default_null(link);
  if (s == "uniform") return NullKind::UniformBinary;
  if (s == "intercept") return NullKind::InterceptMle;
  throw InvalidParameterError("unknown null model '" + s + "'");
}

NoiseKind to_family(const std::string& s) {
  if (s == "gaussian") return NoiseKind::Gaussian;
  if (s == "gumbel") return NoiseKind::Gumbel;
  throw InvalidParameterError("unknown noise family '" + s + "'");
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> a({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), a.mutable_data());
  return a;
}

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Calibration of arbitrary predictive models from (response, prediction) pairs.";

  static py::exception<Error> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<Error> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Input) {
        py::set_error(input_error, e.what());
      } else {
        py::set_error(numerical_error, e.what());
      }
    }
  });

  m.def("t_quantile", &t_quantile, py::arg("p"), py::arg("df"));
  m.def("t_cdf", &t_cdf, py::arg("x"), py::arg("df"));

  py::class_<LiftedFit>(m, "LiftedFit")
      .def_readonly("beta0", &LiftedFit::beta0_hat)
      .def_readonly("beta1", &LiftedFit::beta1_hat)
      .def_readonly("r_star", &LiftedFit::r_star)
      .def_readonly("s_y", &LiftedFit::s_y)
      .def_readonly("s_fhat", &LiftedFit::s_fhat)
      .def_readonly("mean_y", &LiftedFit::mean_y)
      .def_readonly("mu_hat", &LiftedFit::mu_hat)
      .def_readonly("sigma_u", &LiftedFit::sigma_u_hat)
      .def_readonly("n_calb", &LiftedFit::n_calb)
      .def("__repr__", [](const LiftedFit& f) {
        return "LiftedFit(beta0=" + std::to_string(f.beta0_hat) +
               ", beta1=" + std::to_string(f.beta1_hat) + ", n=" + std::to_string(f.n_calb) + ")";
      });

  py::class_<ConsistencyTest>(m, "ConsistencyTest")
      .def_readonly("statistic", &ConsistencyTest::statistic)
      .def_readonly("threshold", &ConsistencyTest::threshold)
      .def_readonly("alpha", &ConsistencyTest::alpha)
      .def_readonly("reject", &ConsistencyTest::reject);

  m.def(
      "fit_lifted_linear",
      [](std::vector<double> y, std::vector<double> f) {
        return fit_lifted_linear(make_calib(std::move(y), std::move(f)));
      },
      py::arg("y"), py::arg("f_hat"));
  m.def(
      "consistency_test",
      [](const LiftedFit& fit, double alpha, std::uint64_t seed, std::size_t draws) {
        py::gil_scoped_release release;
        return consistency_test(fit, alpha, Seed{seed}, draws);
      },
      py::arg("fit"), py::arg("alpha") = 0.05, py::arg("seed") = 0,
      py::arg("draws") = kDefaultLinfDraws);

  py::enum_<IntervalMethod>(m, "IntervalMethod")
      .value("StudentT", IntervalMethod::StudentT)
      .value("Mcmc", IntervalMethod::Mcmc);
  py::class_<Interval>(m, "Interval")
      .def_readonly("center", &Interval::center)
      .def_readonly("lower", &Interval::lower)
      .def_readonly("upper", &Interval::upper)
      .def_readonly("level", &Interval::level)
      .def_readonly("method", &Interval::method)
      .def_property_readonly("width", &Interval::width)
      .def("__repr__", [](const Interval& iv) {
        return "Interval(" + std::to_string(iv.lower) + ", " + std::to_string(iv.upper) + ")";
      });

  m.def("prediction_interval", &prediction_interval, py::arg("fit"), py::arg("f0"),
        py::arg("alpha") = 0.05);
  m.def(
      "prediction_intervals",
      [](const LiftedFit& fit, std::vector<double> f0, double alpha) {
        return prediction_intervals(fit, f0, alpha);
      },
      py::arg("fit"), py::arg("f0"), py::arg("alpha") = 0.05);
  m.def("eta_hat", &eta_hat, py::arg("fit"), py::arg("f0"));
  m.def(
      "empirical_coverage",
      [](const std::vector<Interval>& iv, std::vector<double> y) { return empirical_coverage(iv, y); },
      py::arg("intervals"), py::arg("y"));
  m.def(
      "reliability_curve",
      [](const LiftedFit& fit, std::vector<double> y, std::vector<double> f, std::vector<double> levels) {
        const auto c = reliability_curve(fit, make_calib(std::move(y), std::move(f)), levels);
        return py::make_tuple(c.levels, c.empirical);
      },
      py::arg("fit"), py::arg("y"), py::arg("f_hat"), py::arg("levels"));

  py::class_<LcdReport>(m, "LcdReport")
      .def_readonly("model_id", &LcdReport::model_id)
      .def_readonly("lcd", &LcdReport::lcd)
      .def_readonly("model_loss", &LcdReport::model_loss)
      .def_readonly("null_loss", &LcdReport::null_loss)
      .def_readonly("error", &LcdReport::error)
      .def_property_readonly("beta0", [](const LcdReport& r) { return r.lift.beta0; })
      .def_property_readonly("beta1", [](const LcdReport& r) { return r.lift.beta1; })
      .def_property_readonly("converged", [](const LcdReport& r) { return r.lift.converged; });

  m.def(
      "lcd",
      [](std::vector<double> y, std::vector<double> f, const std::string& link,
         const std::string& null_model, std::string model_id) {
        const Link l = to_link(link);
        return lcd(make_calib(std::move(y), std::move(f)), l, to_null(null_model, l),
                   std::move(model_id));
      },
      py::arg("y"), py::arg("f_hat"), py::arg("link") = "identity",
      py::arg("null_model") = "default", py::arg("model_id") = "");
  m.def(
      "rank_models",
      [](std::vector<double> y, const std::vector<std::pair<std::string, std::vector<double>>>& models,
         const std::string& link, const std::string& null_model) {
        std::vector<ModelPredictions> mp;
        for (const auto& [label, pred] : models) mp.push_back({label, pred});
        const Link l = to_link(link);
        return rank_models(y, mp, l, to_null(null_model, l));
      },
      py::arg("y"), py::arg("models"), py::arg("link") = "identity",
      py::arg("null_model") = "default");
  m.def(
      "mic_probabilities",
      [](const std::vector<double>& losses, const std::vector<double>& complexities) {
        if (losses.size() != complexities.size()) throw ShapeError("losses and complexities differ in length");
        std::vector<MicScore> s;
        for (std::size_t k = 0; k < losses.size(); ++k) s.push_back(mic(losses[k], complexities[k]));
        return mic_probabilities(s);
      },
      py::arg("losses"), py::arg("complexities"));
  m.def(
      "committee_predict",
      [](const std::vector<std::vector<double>>& predictions, std::vector<double> weights) {
        return committee_predict(predictions, weights);
      },
      py::arg("predictions"), py::arg("weights"));

  py::class_<OutlierSolution>(m, "OutlierSolution")
      .def_readonly("beta0", &OutlierSolution::beta0)
      .def_readonly("beta1", &OutlierSolution::beta1)
      .def_readonly("gamma", &OutlierSolution::gamma)
      .def_readonly("lambda_", &OutlierSolution::lambda)
      .def_readonly("iterations", &OutlierSolution::iterations)
      .def_readonly("objective", &OutlierSolution::objective)
      .def_readonly("outlier_indices", &OutlierSolution::outlier_indices);
  m.def(
      "detect_outliers",
      [](std::vector<double> y, std::vector<double> f, double lambda) {
        return detect_outliers(make_calib(std::move(y), std::move(f)), lambda);
      },
      py::arg("y"), py::arg("f_hat"), py::arg("lambda_"));
  m.def(
      "select_lambda",
      [](std::vector<double> y, std::vector<double> f, std::size_t grid_size,
         std::optional<std::pair<std::vector<double>, std::vector<double>>> reference) {
        const auto calib = make_calib(std::move(y), std::move(f));
        const auto ref = reference ? make_calib(std::move(reference->first),
                                                std::move(reference->second))
                                   : calib;
        py::gil_scoped_release release;
        auto sel = select_lambda(calib, ref, grid_size);
        return std::make_pair(sel.lambda, std::move(sel.solution));
      },
      py::arg("y"), py::arg("f_hat"), py::arg("grid_size") = 50, py::arg("reference") = py::none());
  m.def(
      "haar_dwt", [](std::vector<double> x) { return haar_dwt(x).coefficients; }, py::arg("x"));

  py::class_<PosteriorChain>(m, "PosteriorChain")
      .def_property_readonly("size", [](const PosteriorChain& c) { return c.samples.size(); })
      .def_readonly("acceptance_rate", &PosteriorChain::acceptance_rate)
      .def_property_readonly("samples", [](const PosteriorChain& c) {
        py::array_t<double> a({c.samples.size(), std::size_t{3}});
        auto r = a.mutable_unchecked<2>();
        for (std::size_t i = 0; i < c.samples.size(); ++i) {
          r(i, 0) = c.samples[i].beta0;
          r(i, 1) = c.samples[i].beta1;
          r(i, 2) = c.samples[i].log_scale;
        }
        return a;
      });
  m.def(
      "sample_posterior",
      [](std::vector<double> y, std::vector<double> f, const std::string& family,
         std::size_t m_samples, std::size_t burn_in, std::uint64_t seed, std::size_t n_chains) {
        const auto calib = make_calib(std::move(y), std::move(f));
        McmcConfig cfg;
        cfg.m_samples = m_samples;
        cfg.burn_in = burn_in;
        cfg.seed = Seed{seed};
        cfg.n_chains = n_chains;
        const NoiseKind kind = to_family(family);
        py::gil_scoped_release release;
        return sample_posterior(calib, kind, cfg);
      },
      py::arg("y"), py::arg("f_hat"), py::arg("family") = "gaussian",
      py::arg("m_samples") = 20000, py::arg("burn_in") = 5000, py::arg("seed") = 0,
      py::arg("n_chains") = 4);
  m.def(
      "predictive_interval_mcmc",
      [](const PosteriorChain& chain, double f0, double alpha, std::uint64_t seed) {
        return predictive_interval_mcmc(chain, f0, alpha, Seed{seed});
      },
      py::arg("chain"), py::arg("f0"), py::arg("alpha") = 0.05, py::arg("seed") = 0);

  m.def(
      "gen_dataset",
      [](std::size_t n, double sigma_eps, std::uint64_t seed) {
        SynthConfig cfg;
        cfg.n = n;
        cfg.sigma_eps = sigma_eps;
        cfg.seed = Seed{seed};
        const auto d = gen_dataset(cfg);
        return py::make_tuple(to_array(d.predictors), d.responses, d.truth);
      },
      py::arg("n") = 1000, py::arg("sigma_eps") = 0.1, py::arg("seed") = 0);
  m.def(
      "baseline_predict",
      [](const std::string& kind, py::array_t<double, py::array::c_style | py::array::forcecast> train_x,
         std::vector<double> train_y,
         py::array_t<double, py::array::c_style | py::array::forcecast> test_x, std::size_t k) {
        Baseline b;
        if (kind == "mean") {
          b.kind = BaselineKind::Mean;
        } else if (kind == "ols") {
          b.kind = BaselineKind::LinearOls;
        } else if (kind == "knn") {
          b.kind = BaselineKind::Knn;
          b.k = k;
        } else {
          throw InvalidParameterError("unknown baseline '" + kind + "'");
        }
        return baseline_predict(b, to_matrix(train_x), train_y, to_matrix(test_x)).predictions;
      },
      py::arg("kind"), py::arg("train_x"), py::arg("train_y"), py::arg("test_x"), py::arg("k") = 5);
}
