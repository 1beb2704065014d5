#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gfa/components.hpp"
#include "gfa/error.hpp"
#include "gfa/gibbs.hpp"
#include "gfa/ingest.hpp"
#include "gfa/model.hpp"
#include "gfa/pipeline.hpp"
#include "gfa/random.hpp"
#include "gfa/validation.hpp"

namespace py = pybind11;
using namespace gfa;

namespace {

MultiViewDataset dataset_from(const std::vector<Eigen::MatrixXd>& views) {
  if (views.empty()) throw InvalidInput("need at least one view");
  MultiViewDataset ds;
  const Index n = views.front().rows();
  for (Index i = 0; i < n; ++i) ds.sample_ids.push_back("s" + std::to_string(i + 1));
  for (std::size_t m = 0; m < views.size(); ++m) {
    ViewMatrix v;
    v.name = "view" + std::to_string(m + 1);
    v.values = views[m];
    v.sample_ids = ds.sample_ids;
    for (Index d = 0; d < v.values.cols(); ++d) {
      v.feature_names.push_back("f" + std::to_string(d + 1));
    }
    ds.views.push_back(std::move(v));
  }
  ds.validate();
  return ds;
}

py::dict summary_dict(const PosteriorSummary& s) {
  py::dict d;
  d["scores"] = s.mean_state.scores;
  d["loadings"] = s.mean_state.loadings;
  d["activity_mean"] = s.activity_mean;
  d["activity"] = Eigen::MatrixXi(s.mean_state.active);
  d["inclusion"] = s.mean_state.inclusion;
  d["noise_precision"] = s.mean_state.noise_precision;
  d["retained"] = s.retained;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-view group factor analysis (Gibbs sampler core)";

  static py::exception<Error> base(m, "GfaError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidInput& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const NumericalError& e) {
      PyErr_SetString(PyExc_FloatingPointError, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("num_components", &ModelConfig::num_components)
      .def_readwrite("inclusion_a", &ModelConfig::inclusion_a)
      .def_readwrite("inclusion_b", &ModelConfig::inclusion_b)
      .def_readwrite("ard_shape", &ModelConfig::ard_shape)
      .def_readwrite("ard_rate", &ModelConfig::ard_rate)
      .def_readwrite("noise_shape", &ModelConfig::noise_shape)
      .def_readwrite("noise_rate", &ModelConfig::noise_rate)
      .def_readwrite("center_columns", &ModelConfig::center_columns)
      .def_readwrite("scale_columns", &ModelConfig::scale_columns)
      .def("validate", &ModelConfig::validate);

  py::class_<SamplingSchedule>(m, "SamplingSchedule")
      .def(py::init<>())
      .def_readwrite("n_chains", &SamplingSchedule::n_chains)
      .def_readwrite("burn_in", &SamplingSchedule::burn_in)
      .def_readwrite("n_samples", &SamplingSchedule::n_samples)
      .def_readwrite("thinning", &SamplingSchedule::thinning)
      .def_readwrite("seed", &SamplingSchedule::seed)
      .def("retained", &SamplingSchedule::retained)
      .def("validate", &SamplingSchedule::validate);

  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("stream"));

  m.def(
      "generate_synthetic",
      [](Index n, const std::vector<Index>& dims, const Eigen::MatrixXi& activity, double snr,
         std::uint64_t seed) {
        const auto data = generate_synthetic(n, dims, activity, snr, seed);
        std::vector<Eigen::MatrixXd> views;
        for (const auto& v : data.dataset.views) views.push_back(v.values);
        py::dict d;
        d["views"] = views;
        d["scores"] = data.truth.state.scores;
        d["loadings"] = data.truth.state.loadings;
        d["activity"] = Eigen::MatrixXi(data.truth.activity);
        d["noise_precision"] = data.truth.state.noise_precision;
        return d;
      },
      py::arg("num_samples"), py::arg("dims"), py::arg("activity"), py::arg("snr"),
      py::arg("seed"));

  m.def(
      "fit",
      [](const std::vector<Eigen::MatrixXd>& views, std::vector<std::string> roles,
         const ModelConfig& config, const SamplingSchedule& schedule, int jobs) {
        const auto ds = dataset_from(views);
        const auto role_map =
            roles.empty() ? ViewRoleMap::one_per_view(views.size()) : ViewRoleMap{std::move(roles)};
        FitResult fit;
        {
          py::gil_scoped_release release;
          fit = fit_model(ds, config, schedule, role_map, jobs);
        }
        auto d = summary_dict(fit.summary);
        d["selected_chain"] = fit.selection.selected;
        d["chain_means"] = fit.selection.chain_means;
        d["outlier"] = fit.selection.outlier;
        d["failed"] = fit.selection.failed;
        std::vector<std::string> kinds;
        for (const auto& c : classify_components(fit.summary.mean_state.active, role_map)) {
          kinds.push_back(to_string(c.kind));
        }
        d["kinds"] = kinds;
        d["runner_up_similarity"] =
            fit.runner_up_similarity ? py::cast(*fit.runner_up_similarity) : py::none();
        return d;
      },
      py::arg("views"), py::arg("roles") = std::vector<std::string>{},
      py::arg("config") = ModelConfig{}, py::arg("schedule") = SamplingSchedule{},
      py::arg("jobs") = 1);

  m.def(
      "select_chain",
      [](const std::vector<double>& means) {
        const auto sel = select_chain_by_means(means, std::vector<bool>(means.size(), false));
        return py::make_tuple(sel.selected, sel.outlier);
      },
      py::arg("means"), "index of the representative chain and per-chain outlier flags");

  m.def(
      "classify",
      [](const Eigen::MatrixXi& activity, const std::vector<std::string>& roles) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& c : classify_components(activity, ViewRoleMap{roles})) {
          out.emplace_back(to_string(c.kind), c.role);
        }
        return out;
      },
      py::arg("activity"), py::arg("roles"));

  m.def("benjamini_hochberg",
        [](const std::vector<double>& p) { return benjamini_hochberg(p); }, py::arg("p_values"));

  m.def(
      "significant_samples",
      [](const Eigen::VectorXd& scores, int n_permutations, double q_threshold) {
        std::vector<py::tuple> out;
        for (const auto& s : significant_samples(scores, n_permutations, q_threshold)) {
          out.push_back(py::make_tuple(s.sample, s.score, s.p_value, s.q_value));
        }
        return out;
      },
      py::arg("scores"), py::arg("n_permutations") = 10000, py::arg("q_threshold") = 0.05,
      "(sample, score, p, q) for samples below the FDR cutoff, largest |score| first");

  m.def("threshold_top_genes", &threshold_top_genes, py::arg("row"),
        py::arg("n_up") = kDefaultTopUp, py::arg("n_down") = kDefaultTopDown);

  m.def(
      "merge_replicates",
      [](const Eigen::MatrixXd& values, const std::vector<std::string>& ids) {
        ProfileTable t;
        t.name = "table";
        t.values = values;
        t.row_ids = ids;
        for (Index c = 0; c < values.cols(); ++c) t.feature_names.push_back(std::to_string(c));
        const auto merged = merge_replicates(t);
        return py::make_tuple(merged.values, merged.row_ids);
      },
      py::arg("values"), py::arg("row_ids"));

  m.def(
      "similarity_curve",
      [](const std::vector<std::pair<std::string, std::string>>& edges,
         const std::vector<std::string>& compounds,
         const std::vector<std::vector<std::string>>& sets, std::vector<int> lengths) {
        const OntologyGraph graph(edges, compounds);
        if (lengths.empty()) lengths = default_path_lengths();
        const auto curve = component_curve(graph, sets, lengths);
        return py::make_tuple(curve.lengths, curve.values);
      },
      py::arg("edges"), py::arg("compounds"), py::arg("sets"),
      py::arg("lengths") = std::vector<int>{});
}
