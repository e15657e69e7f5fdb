#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "linf/errors.hpp"
#include "linf/evt.hpp"
#include "linf/experiment.hpp"
#include "linf/gamp.hpp"
#include "linf/lp_estimators.hpp"
#include "linf/scalar_posterior.hpp"
#include "linf/signal_model.hpp"

namespace py = pybind11;
using namespace linf;

namespace {

// std::variant would be auto-converted by the stl casters; opaque holders
// keep priors/channels/posteriors as real Python objects instead.
struct Prior {
  PriorSpec spec;
};
struct Channel {
  ChannelSpec spec;
};
struct Posterior {
  ScalarPosterior value;
};

Prior make_mixture(std::vector<double> weights, std::vector<double> variances) {
  Prior prior{MixtureGaussianPrior{std::move(weights), std::move(variances)}};
  validate(prior.spec);
  return prior;
}

Prior make_sparse_gaussian(double sparsity, double variance) {
  Prior prior{SparseGaussianPrior{sparsity, variance}};
  validate(prior.spec);
  return prior;
}

Prior make_sparse_weibull(double sparsity, double scale, double shape) {
  Prior prior{SparseWeibullPrior{sparsity, scale, shape}};
  validate(prior.spec);
  return prior;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian signal estimation under the l-infinity error metric";

  py::class_<Prior>(m, "PriorSpec")
      .def("__repr__", [](const Prior& p) { return "<PriorSpec " + prior_name(p.spec) + ">"; })
      .def_property_readonly("name", [](const Prior& p) { return prior_name(p.spec); })
      .def_property_readonly("mean", [](const Prior& p) { return prior_mean(p.spec); })
      .def_property_readonly("second_moment",
                             [](const Prior& p) { return prior_second_moment(p.spec); })
      .def_property_readonly("variance", [](const Prior& p) { return prior_variance(p.spec); });
  m.def("mixture_gaussian", &make_mixture, py::arg("weights"), py::arg("variances"));
  m.def("sparse_gaussian", &make_sparse_gaussian, py::arg("sparsity"), py::arg("variance"));
  m.def("sparse_weibull", &make_sparse_weibull, py::arg("sparsity"), py::arg("scale"),
        py::arg("shape"));

  py::class_<Channel>(m, "ChannelSpec")
      .def("__repr__",
           [](const Channel& c) { return "<ChannelSpec " + channel_name(c.spec) + ">"; });
  m.def("gaussian_channel", [](double variance) {
    Channel ch{GaussianChannel{variance}};
    validate(ch.spec);
    return ch;
  }, py::arg("variance"));
  m.def("poisson_channel", [](double alpha) {
    Channel ch{PoissonChannel{alpha}};
    validate(ch.spec);
    return ch;
  }, py::arg("alpha"));

  m.def("sample_signal",
        [](const Prior& prior, Eigen::Index n, std::uint64_t seed) {
          return sample_signal(prior.spec, n, seed);
        },
        py::arg("prior"), py::arg("n"), py::arg("seed"));
  m.def("sample_matrix", &sample_matrix, py::arg("m"), py::arg("n"), py::arg("seed"));
  m.def("apply_channel",
        [](const Channel& channel, const Eigen::VectorXd& w, std::uint64_t seed) {
          return apply_channel(channel.spec, w, seed);
        },
        py::arg("channel"), py::arg("w"), py::arg("seed"));
  m.def("snr_to_noise_variance",
        [](const Prior& prior, double snr_db) { return snr_to_noise_variance(prior.spec, snr_db); },
        py::arg("prior"), py::arg("snr_db"));

  py::class_<Moments>(m, "Moments")
      .def_readonly("mean", &Moments::mean)
      .def_readonly("variance", &Moments::variance)
      .def("__repr__", [](const Moments& mom) {
        return "<Moments mean=" + std::to_string(mom.mean) +
               " variance=" + std::to_string(mom.variance) + ">";
      });

  py::class_<Posterior>(m, "ScalarPosterior")
      .def_property_readonly("moments",
                             [](const Posterior& p) { return posterior_moments(p.value); })
      .def_property_readonly("spike_weight", [](const Posterior& p) {
        if (const auto* cf = std::get_if<ClosedFormPosterior>(&p.value)) return cf->spike_weight;
        return std::get<GridPosterior>(p.value).spike_weight;
      });
  m.def("posterior_gaussian_mixture",
        [](const Prior& prior, double q, double mu_v) {
          return Posterior{posterior_gaussian_mixture(prior.spec, q, mu_v)};
        },
        py::arg("prior"), py::arg("q"), py::arg("mu_v"));
  m.def("posterior_grid",
        [](const Prior& prior, double q, double mu_v, int resolution) {
          GridPolicy policy;
          policy.resolution = resolution;
          return Posterior{posterior_grid(prior.spec, q, mu_v, policy)};
        },
        py::arg("prior"), py::arg("q"), py::arg("mu_v"), py::arg("resolution") = 4096);

  m.def("wiener_sparse", &wiener_sparse, py::arg("r"), py::arg("mu_x"), py::arg("mu_z"));
  m.def("wiener_mixture",
        [](const Eigen::VectorXd& r, const Prior& prior, double mu_z) {
          const auto* mix = std::get_if<MixtureGaussianPrior>(&prior.spec);
          if (mix == nullptr) throw ParameterError("wiener_mixture needs a mixture prior");
          return wiener_mixture(r, *mix, mu_z);
        },
        py::arg("r"), py::arg("prior"), py::arg("mu_z"));
  m.def("lp_scalar_estimate",
        [](const Posterior& post, double p) { return lp_scalar_estimate(post.value, p); },
        py::arg("posterior"), py::arg("p"));
  m.def("lp_vector_estimate",
        [](const Eigen::VectorXd& q, double mu_v, const Prior& prior, double p) {
          return lp_vector_estimate(EffectiveChannel{q, mu_v}, prior.spec, p);
        },
        py::arg("q"), py::arg("mu_v"), py::arg("prior"), py::arg("p"));
  m.def("posterior_mean_estimate",
        [](const Eigen::VectorXd& q, double mu_v, const Prior& prior) {
          return posterior_mean_estimate(EffectiveChannel{q, mu_v}, prior.spec);
        },
        py::arg("q"), py::arg("mu_v"), py::arg("prior"));
  m.def("lp_norm", &lp_norm, py::arg("diff"), py::arg("p"));
  m.def("error_report",
        [](const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth, std::vector<double> ps) {
          const ErrorReport rep = error_report(estimate, truth, ps);
          py::dict out;
          out["linf"] = rep.linf;
          py::dict lp;
          for (const auto& [p, v] : rep.lp) lp[py::float_(p)] = v;
          out["lp"] = lp;
          out["abs_errors"] = rep.abs_errors;
          return out;
        },
        py::arg("estimate"), py::arg("truth"), py::arg("ps"));

  py::class_<GampConfig>(m, "GampConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &GampConfig::max_iterations)
      .def_readwrite("damping", &GampConfig::damping)
      .def_readwrite("tolerance", &GampConfig::tolerance)
      .def_readwrite("variance_floor", &GampConfig::variance_floor)
      .def_readwrite("weibull_grid_resolution", &GampConfig::weibull_grid_resolution)
      .def_readwrite("mean_removal", &GampConfig::mean_removal);

  py::class_<GampResult>(m, "GampResult")
      .def_property_readonly("q",
                             [](const GampResult& r) { return r.channel.pseudo_observations; })
      .def_property_readonly("mu_v", [](const GampResult& r) { return r.channel.noise_variance; })
      .def_readonly("posterior_mean", &GampResult::posterior_mean)
      .def_readonly("posterior_variance", &GampResult::posterior_variance)
      .def_readonly("converged", &GampResult::converged)
      .def_property_readonly("iterations", [](const GampResult& r) { return r.trace.size(); });
  m.def("gamp_run",
        [](const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const Prior& prior,
           const Channel& channel, const GampConfig& config) {
          return gamp_run(phi, y, prior.spec, channel.spec, config);
        },
        py::arg("phi"), py::arg("y"), py::arg("prior"), py::arg("channel"),
        py::arg("config") = GampConfig());
  m.def("output_denoiser_gaussian", &output_denoiser_gaussian, py::arg("p_hat"), py::arg("mu_p"),
        py::arg("y"), py::arg("mu_z"));
  m.def("output_denoiser_poisson", &output_denoiser_poisson, py::arg("p_hat"), py::arg("mu_p"),
        py::arg("y"), py::arg("alpha"), py::arg("variance_floor") = 1e-12);

  m.def("sigma_pattern",
        [](double mu_x, double mu_z) {
          const ErrorPatternStats s = sigma_pattern(mu_x, mu_z);
          return py::make_tuple(s.gain, s.sigma_support, s.sigma_zero);
        },
        py::arg("mu_x"), py::arg("mu_z"));
  m.def("berman_ratio",
        [](Eigen::Index n, int trials, std::uint64_t seed) {
          const BermanResult r = berman_ratio(n, trials, seed);
          return py::make_tuple(r.mean_ratio, r.stddev_ratio);
        },
        py::arg("n"), py::arg("trials"), py::arg("seed"));
  m.def("support_dominance",
        [](const Prior& prior, double mu_z, Eigen::Index n, int trials, std::uint64_t seed) {
          const DominanceResult r = support_dominance(prior.spec, mu_z, n, trials, seed);
          py::dict out;
          out["fraction"] = r.fraction;
          out["evaluated"] = r.evaluated;
          out["skipped"] = r.skipped;
          out["norm_max_support"] = r.mean_norm_support;
          out["norm_max_zero"] = r.mean_norm_zero;
          return out;
        },
        py::arg("prior"), py::arg("mu_z"), py::arg("n"), py::arg("trials"), py::arg("seed"));

  m.def("run_experiment_json",
        [](const std::string& config_json, const std::string& output_dir, int threads) {
          ExperimentConfig cfg = parse_config_json(config_json);
          if (!output_dir.empty()) cfg.output_dir = output_dir;
          const RunOutputs out = run_experiment(cfg, threads);
          py::dict result;
          result["csv_path"] = out.csv_path.string();
          result["summary_path"] = out.summary_path.string();
          result["n_records"] = out.records.size();
          return result;
        },
        py::arg("config_json"), py::arg("output_dir") = std::string(), py::arg("threads") = 1);

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<DegeneratePosteriorError>(m, "DegeneratePosteriorError",
                                                   PyExc_ArithmeticError);

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
