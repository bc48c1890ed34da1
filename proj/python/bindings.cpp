#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "renydiv/asymptotics.hpp"
#include "renydiv/cli_io.hpp"
#include "renydiv/core_measures.hpp"
#include "renydiv/errors.hpp"
#include "renydiv/montecarlo.hpp"
#include "renydiv/pipeline.hpp"
#include "renydiv/powerlaw.hpp"
#include "renydiv/projections.hpp"

namespace py = pybind11;
using namespace renydiv;

namespace {

using Counts = std::vector<std::uint64_t>;
using Probs = std::vector<double>;

JointCountTable joint_table(const std::vector<Counts>& rows) {
  JointCountTable t(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw ShapeError("joint count table must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[i][j] > 0) t.add(i, j, rows[i][j]);
    }
  }
  return t;
}

JointDistribution joint_law(const std::vector<Probs>& rows) {
  Probs cells;
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw ShapeError("joint distribution must be square");
    cells.insert(cells.end(), r.begin(), r.end());
  }
  return JointDistribution(rows.size(), cells);
}

py::dict moments(const ProjectionMoments& m) {
  py::dict d;
  d["mean"] = m.mean;
  d["variance"] = m.variance;
  d["cv"] = m.cv;
  return d;
}

}  // namespace

PYBIND11_MODULE(_renydiv, mod) {
  mod.doc() = "Renyi entropy and divergence inference for count data";

  py::class_<EstimateWithCI>(mod, "EstimateWithCI")
      .def_readonly("estimate", &EstimateWithCI::estimate)
      .def_readonly("level", &EstimateWithCI::level)
      .def_readonly("lower", &EstimateWithCI::lower)
      .def_readonly("upper", &EstimateWithCI::upper)
      .def_readonly("std_error", &EstimateWithCI::std_error)
      .def_readonly("n", &EstimateWithCI::n)
      .def_readonly("m", &EstimateWithCI::m)
      .def_property_readonly("method", [](const EstimateWithCI& e) { return std::string(to_string(e.method)); })
      .def("__repr__", [](const EstimateWithCI& e) {
        std::ostringstream o;
        o << "EstimateWithCI(estimate=" << e.estimate << ", lower=" << e.lower << ", upper=" << e.upper << ")";
        return o.str();
      });

  py::class_<TestReport>(mod, "TestReport")
      .def_readonly("statistic", &TestReport::statistic)
      .def_readonly("raw_statistic", &TestReport::raw_statistic)
      .def_readonly("null_mean", &TestReport::null_mean)
      .def_readonly("null_sd", &TestReport::null_sd)
      .def_readonly("p_value", &TestReport::p_value)
      .def_readonly("m", &TestReport::m)
      .def_readonly("n", &TestReport::n)
      .def_property_readonly("sidedness", [](const TestReport& t) { return std::string(to_string(t.sidedness)); })
      .def_property_readonly("method", [](const TestReport& t) { return std::string(to_string(t.method)); });

  py::class_<FitResult>(mod, "FitResult")
      .def_readonly("beta_hat", &FitResult::beta_hat)
      .def_readonly("std_error", &FitResult::std_error)
      .def_readonly("residual_sse", &FitResult::residual_sse)
      .def_readonly("intercept", &FitResult::intercept)
      .def_readonly("ranks_used", &FitResult::ranks_used);

  py::class_<NoiseComponent>(mod, "NoiseComponent")
      .def_readonly("categories", &NoiseComponent::categories)
      .def_readonly("min_count", &NoiseComponent::min_count)
      .def_readonly("max_count", &NoiseComponent::max_count)
      .def_readonly("total", &NoiseComponent::total)
      .def_readonly("level", &NoiseComponent::level);

  py::class_<MixtureDecomposition>(mod, "MixtureDecomposition")
      .def_readonly("cutoff_k_m", &MixtureDecomposition::cutoff_k_m)
      .def_readonly("noise_components", &MixtureDecomposition::noise_components)
      .def_readonly("signal_categories", &MixtureDecomposition::signal_categories)
      .def_readonly("noise_fraction", &MixtureDecomposition::noise_fraction)
      .def_readonly("signal_fraction", &MixtureDecomposition::signal_fraction)
      .def_readonly("m_signal", &MixtureDecomposition::m_signal)
      .def_readonly("n", &MixtureDecomposition::n);

  py::class_<PipelineReport>(mod, "PipelineReport")
      .def_readonly("alpha", &PipelineReport::alpha)
      .def_readonly("decomposition", &PipelineReport::decomposition)
      .def_readonly("shared_cutoff", &PipelineReport::shared_cutoff)
      .def_readonly("signal_support", &PipelineReport::signal_support)
      .def_readonly("signal_n", &PipelineReport::signal_n)
      .def_readonly("equality", &PipelineReport::equality)
      .def_readonly("divergence", &PipelineReport::divergence)
      .def_readonly("entropies", &PipelineReport::entropies)
      .def_readonly("hill_numbers", &PipelineReport::hill_numbers)
      .def_readonly("powerlaw_fits", &PipelineReport::powerlaw_fits)
      .def_property_readonly("equality_rejected", &PipelineReport::equality_rejected);

  py::class_<SimRun>(mod, "SimRun")
      .def_readonly("samples", &SimRun::samples)
      .def_readonly("ks_distance", &SimRun::ks_distance)
      .def_readonly("qq_pairs", &SimRun::qq_pairs)
      .def_property_readonly("config", [](const SimRun& r) { return format_sim_config(r.config_echo); });

  py::class_<BiasResult>(mod, "BiasResult")
      .def_readonly("relative_bias", &BiasResult::relative_bias)
      .def_readonly("mcse", &BiasResult::mcse);

  mod.def("power_sum", [](const Probs& p, double a) { return power_sum(ProbVector(p), Alpha(a)); },
          py::arg("p"), py::arg("alpha"));
  mod.def("cross_power_sum",
          [](const Probs& p, const Probs& q, double a) { return cross_power_sum(ProbVector(p), ProbVector(q), Alpha(a)).value; },
          py::arg("p"), py::arg("q"), py::arg("alpha"));
  mod.def("renyi_entropy", [](const Probs& p, double a) { return renyi_entropy(ProbVector(p), Alpha(a)); },
          py::arg("p"), py::arg("alpha"));
  mod.def("renyi_divergence",
          [](const Probs& p, const Probs& q, double a) { return renyi_divergence(ProbVector(p), ProbVector(q), Alpha(a)); },
          py::arg("p"), py::arg("q"), py::arg("alpha"));
  mod.def("tsallis_entropy", [](const Probs& p, double a) { return tsallis_entropy(ProbVector(p), Alpha(a)); },
          py::arg("p"), py::arg("alpha"));
  mod.def("hill_number", [](const Probs& p, double a) { return hill_number(ProbVector(p), Alpha(a)); },
          py::arg("p"), py::arg("alpha"));

  mod.def("projection_w_moments",
          [](const Probs& p, double a) { return moments(projection_w_moments(ProbVector(p), Alpha(a))); },
          py::arg("p"), py::arg("alpha"));
  mod.def("projection_v_moments",
          [](const std::vector<Probs>& joint, double a) { return moments(projection_v_moments(joint_law(joint), Alpha(a))); },
          py::arg("joint"), py::arg("alpha"));

  mod.def("pearson_chi_square", [](const Counts& c, const Probs& p) { return pearson_chi_square(CountVector(c), ProbVector(p)); },
          py::arg("counts"), py::arg("p"));

  mod.def("entropy_ci", [](const Counts& c, double a, double level) { return entropy_ci(CountVector(c), Alpha(a), level); },
          py::arg("counts"), py::arg("alpha") = 0.5, py::arg("level") = 0.95);
  mod.def("hill_ci", [](const Counts& c, double a, double level) { return hill_ci(CountVector(c), Alpha(a), level); },
          py::arg("counts"), py::arg("alpha") = 0.5, py::arg("level") = 0.95);
  mod.def("divergence_ci",
          [](const Counts& x, const Counts& y, double a, double level) {
            return divergence_ci(CountVector(x), CountVector(y), Alpha(a), level);
          },
          py::arg("x"), py::arg("y"), py::arg("alpha") = 0.5, py::arg("level") = 0.95);
  mod.def("divergence_ci_paired",
          [](const std::vector<Counts>& joint, double a, double level) { return divergence_ci(joint_table(joint), Alpha(a), level); },
          py::arg("joint"), py::arg("alpha") = 0.5, py::arg("level") = 0.95);

  mod.def("uniformity_test",
          [](const Counts& c, double a, const std::string& method) {
            if (method != "entropy" && method != "pearson") throw UsageError("method must be 'entropy' or 'pearson'");
            return uniformity_test(CountVector(c), Alpha(a),
                                   method == "pearson" ? UniformityMethod::pearson : UniformityMethod::entropy);
          },
          py::arg("counts"), py::arg("alpha") = 0.5, py::arg("method") = "entropy");
  mod.def("equality_test",
          [](const Counts& x, const Counts& y, double a) { return equality_test(CountVector(x), CountVector(y), Alpha(a)); },
          py::arg("x"), py::arg("y"), py::arg("alpha") = 0.5);
  mod.def("equality_test_paired",
          [](const std::vector<Counts>& joint, double a) { return equality_test(joint_table(joint), Alpha(a)); },
          py::arg("joint"), py::arg("alpha") = 0.5);
  mod.def("homogeneity_test",
          [](const std::vector<std::pair<Counts, Counts>>& pairs, double a) {
            std::vector<std::pair<CountVector, CountVector>> cv;
            for (const auto& [x, y] : pairs) cv.emplace_back(CountVector(x), CountVector(y));
            return homogeneity_test(cv, Alpha(a));
          },
          py::arg("pairs"), py::arg("alpha") = 0.5);

  mod.def("filter_noise",
          [](const Counts& c, double level, std::size_t max_components) {
            return filter_noise(CountVector(c), level, max_components);
          },
          py::arg("counts"), py::arg("level") = kDefaultNoiseLevel, py::arg("max_components") = kDefaultMaxComponents);
  mod.def("diversity_pipeline",
          [](const Counts& x, const Counts& y, double a, double noise_level, std::size_t max_components,
             double ci_level, double test_level) {
            PipelineConfig pc{noise_level, max_components, ci_level, test_level};
            return diversity_pipeline(CountVector(x), CountVector(y), Alpha(a), pc);
          },
          py::arg("x"), py::arg("y"), py::arg("alpha") = 0.5, py::arg("noise_level") = kDefaultNoiseLevel,
          py::arg("max_components") = kDefaultMaxComponents, py::arg("ci_level") = 0.95, py::arg("test_level") = 0.05);

  mod.def("powerlaw_pmf", [](double beta, std::size_t m) { return powerlaw_pmf(beta, m).values(); },
          py::arg("beta"), py::arg("m"));
  mod.def("fit_powerlaw", [](const Counts& c) { return fit_powerlaw_ls(CountVector(c)); }, py::arg("counts"));

  auto config = [](const std::string& text) {
    std::istringstream in(text);
    return parse_sim_config(in);
  };
  mod.def("simulate",
          [config](const std::string& text, std::size_t workers) {
            SimConfig cfg = config(text);
            cfg.workers = workers;
            py::gil_scoped_release release;
            return simulate_statistic(cfg);
          },
          py::arg("config"), py::arg("workers") = 0,
          "Run the Monte Carlo harness on a `key = value` configuration string.");
  mod.def("coverage_experiment",
          [config](const std::string& text, double level) {
            const SimConfig cfg = config(text);
            py::gil_scoped_release release;
            return coverage_experiment(cfg, level);
          },
          py::arg("config"), py::arg("level") = 0.95);
  mod.def("bias_experiment",
          [config](const std::string& text) {
            const SimConfig cfg = config(text);
            py::gil_scoped_release release;
            return bias_experiment(cfg);
          },
          py::arg("config"));
  mod.def("ks_distance_normal", [](const Probs& x) { return ks_distance_normal(x); }, py::arg("samples"));

  mod.def("read_count_table",
          [](const std::string& path) {
            const CountTableFile t = read_count_table(path);
            py::dict d;
            d["categories"] = t.categories;
            d["samples"] = py::dict();
            for (std::size_t s = 0; s < t.sample_names.size(); ++s) d["samples"][py::str(t.sample_names[s])] = t.samples[s];
            return d;
          },
          py::arg("path"));
}
