#include "gfa/cli/model_dir.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gfa/error.hpp"
#include "gfa/tsv.hpp"
#include "json.hpp"

namespace gfa::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> component_names(Index k) {
  std::vector<std::string> names;
  for (Index j = 0; j < k; ++j) names.push_back("k" + std::to_string(j + 1));
  return names;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << text;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  return out;
}

void write_matrix(const fs::path& path, const std::string& corner, std::vector<std::string> rows,
                  std::vector<std::string> cols, const Eigen::MatrixXd& values) {
  LabeledMatrix t;
  t.corner = corner;
  t.row_ids = std::move(rows);
  t.column_names = std::move(cols);
  t.values = values;
  write_labeled_matrix(path, t);
}

LabeledMatrix read_matrix(const fs::path& path, Index rows, Index cols) {
  if (!fs::exists(path)) {
    throw IntegrityError("model directory is missing " + path.string());
  }
  LabeledMatrix t;
  try {
    t = read_labeled_matrix(path);
  } catch (const ParseError& e) {
    throw IntegrityError(std::string("corrupt model file: ") + e.what());
  }
  if ((rows >= 0 && t.values.rows() != rows) || (cols >= 0 && t.values.cols() != cols)) {
    throw IntegrityError("unexpected shape in " + path.string());
  }
  return t;
}

ComponentKind parse_kind(const std::string& s, const fs::path& path) {
  if (s == "shared") return ComponentKind::Shared;
  if (s == "view-specific") return ComponentKind::ViewSpecific;
  if (s == "inactive") return ComponentKind::Inactive;
  throw IntegrityError("unknown component kind '" + s + "' in " + path.string());
}

}  // namespace

void write_status(const fs::path& dir, const std::string& status) {
  write_text(dir / "run.status", status + "\n");
}

std::string read_status(const fs::path& dir) {
  std::ifstream in(dir / "run.status");
  if (!in) return {};
  std::string line;
  std::getline(in, line);
  return line;
}

void write_chain_traces(const fs::path& dir, const std::vector<ChainOutcome>& chains,
                        const ChainSelection& selection) {
  fs::create_directories(dir / "chains");
  auto table = open_out(dir / "chains" / "chains.tsv");
  table << "chain\tstatus\tseed\tmean_log_density\toutlier\tselected\tmessage\n";
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const auto& c = chains[i];
    char name[32];
    std::snprintf(name, sizeof(name), "chain_%02zu", i);
    const fs::path cdir = dir / "chains" / name;
    fs::create_directories(cdir);
    table << i << '\t' << (c.failed() ? "failed" : "ok") << '\t';
    if (c.failed()) {
      table << "\tNA\t0\t0\t" << c.error << '\n';
      write_text(cdir / "error.txt", c.error + "\n");
      continue;
    }
    table << c.trace->seed << '\t' << format_double(selection.chain_means[i]) << '\t'
          << (selection.outlier[i] ? 1 : 0) << '\t' << (selection.selected == i ? 1 : 0) << "\t\n";
    auto trace = open_out(cdir / "log_density.tsv");
    trace << "sweep\tphase\tlog_density\n";
    const auto& ld = c.trace->log_densities;
    for (std::size_t s = 0; s < ld.size(); ++s) {
      trace << s + 1 << '\t'
            << (static_cast<int>(s) < c.trace->burn_in ? "burn_in" : "sampling") << '\t'
            << format_double(ld[s]) << '\n';
    }
  }
}

void write_summary(const fs::path& dir, const FitResult& fit, const DatasetLabels& labels,
                   double activity_threshold) {
  fs::create_directories(dir / "summary");
  const auto& st = fit.summary.mean_state;
  const Index k = st.num_components();
  const auto comps = component_names(k);
  write_matrix(dir / "summary" / "scores.tsv", "sample_id", labels.sample_ids, comps, st.scores);
  for (std::size_t m = 0; m < st.loadings.size(); ++m) {
    const auto& v = labels.view_names[m];
    write_matrix(dir / "summary" / ("loadings_" + v + ".tsv"), "feature", labels.feature_names[m],
                 comps, st.loadings[m]);
    write_matrix(dir / "summary" / ("ard_precision_" + v + ".tsv"), "feature",
                 labels.feature_names[m], comps, st.ard_precision[m]);
    write_matrix(dir / "summary" / ("noise_precision_" + v + ".tsv"), "feature",
                 labels.feature_names[m], {"noise_precision"}, st.noise_precision[m]);
  }
  write_matrix(dir / "summary" / "inclusion.tsv", "quantity", {"inclusion"}, comps,
               st.inclusion.transpose());
  write_matrix(dir / "summary" / "activity_mean.tsv", "view", labels.view_names, comps,
               fit.summary.activity_mean);
  write_matrix(dir / "summary" / "activity.tsv", "view", labels.view_names, comps,
               (fit.summary.activity_mean.array() >= activity_threshold).cast<double>().matrix());

  json info;
  info["selected_chain"] = fit.selection.selected;
  info["retained_states"] = fit.summary.retained;
  info["num_components"] = k;
  info["views"] = labels.view_names;
  info["num_samples"] = labels.sample_ids.size();
  info["runner_up_chain"] = fit.runner_up ? json(*fit.runner_up) : json(nullptr);
  info["runner_up_shared_similarity"] =
      fit.runner_up_similarity ? json(*fit.runner_up_similarity) : json(nullptr);
  write_text(dir / "model.json", info.dump(2) + "\n");
}

void write_reports(const fs::path& dir, const std::vector<ComponentReport>& reports,
                   const DatasetLabels& labels) {
  fs::create_directories(dir / "reports");
  auto comps = open_out(dir / "reports" / "components.tsv");
  comps << "label\tcomponent\tkind\trole\tvariance\tvariance_rank\tactivity\tn_significant\n";
  auto sig = open_out(dir / "reports" / "significant_samples.tsv");
  sig << "label\tcomponent\tsample_id\tscore\tp_value\tq_value\n";
  auto top = open_out(dir / "reports" / "top_loadings.tsv");
  top << "label\tcomponent\tview\trank\tfeature\tweight\tdegenerate\n";

  for (const auto& r : reports) {
    std::string act;
    for (std::size_t m = 0; m < r.activity.size(); ++m) {
      act += (m ? "," : "") + std::to_string(r.activity[m]);
    }
    comps << r.label << '\t' << r.component + 1 << '\t' << to_string(r.classification.kind) << '\t'
          << r.classification.role << '\t' << format_double(r.variance) << '\t' << r.variance_rank
          << '\t' << act << '\t' << r.significant.size() << '\n';
    for (const auto& s : r.significant) {
      sig << r.label << '\t' << r.component + 1 << '\t'
          << labels.sample_ids[static_cast<std::size_t>(s.sample)] << '\t' << format_double(s.score)
          << '\t' << format_double(s.p_value) << '\t' << format_double(s.q_value) << '\n';
    }
    for (std::size_t m = 0; m < r.top.size(); ++m) {
      const auto& t = r.top[m];
      for (std::size_t i = 0; i < t.entries.size(); ++i) {
        top << r.label << '\t' << r.component + 1 << '\t' << labels.view_names[m] << '\t' << i + 1
            << '\t' << t.entries[i].name << '\t' << format_double(t.entries[i].weight) << '\t'
            << (t.degenerate ? 1 : 0) << '\n';
      }
    }
  }
}

LoadedModel read_model_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IntegrityError("model directory not found: " + dir.string());
  }
  const auto status = read_status(dir);
  if (status != "complete") {
    throw IntegrityError("model directory " + dir.string() + " is not a completed fit (status '" +
                         status + "')");
  }
  LoadedModel out;
  try {
    out.manifest = RunManifest::load(dir / "manifest.json");
  } catch (const Error& e) {
    throw IntegrityError(std::string("corrupt manifest copy: ") + e.what());
  }
  const Index k = out.manifest.model.num_components;
  {
    std::ifstream f(dir / "model.json");
    if (!f) throw IntegrityError("missing " + (dir / "model.json").string());
    try {
      const auto info = json::parse(f);
      out.summary.retained = info.at("retained_states").get<int>();
    } catch (const json::exception& e) {
      throw IntegrityError(std::string("corrupt model.json: ") + e.what());
    }
    if (out.summary.retained < 1) throw IntegrityError("model.json reports no retained states");
  }

  auto scores = read_matrix(dir / "summary" / "scores.tsv", -1, k);
  out.labels.sample_ids = scores.row_ids;
  auto& st = out.summary.mean_state;
  st.scores = scores.values;
  for (const auto& v : out.manifest.views) {
    out.labels.view_names.push_back(v.name);
    auto w = read_matrix(dir / "summary" / ("loadings_" + v.name + ".tsv"), -1, k);
    const Index d = w.values.rows();
    auto alpha = read_matrix(dir / "summary" / ("ard_precision_" + v.name + ".tsv"), d, k);
    auto tau = read_matrix(dir / "summary" / ("noise_precision_" + v.name + ".tsv"), d, 1);
    if (alpha.row_ids != w.row_ids || tau.row_ids != w.row_ids) {
      throw IntegrityError("feature labels disagree across summary files of view " + v.name);
    }
    out.labels.feature_names.push_back(w.row_ids);
    st.loadings.push_back(w.values);
    st.ard_precision.push_back(alpha.values);
    st.noise_precision.push_back(tau.values.col(0));
  }
  const Index m_views = static_cast<Index>(out.manifest.views.size());
  st.inclusion = read_matrix(dir / "summary" / "inclusion.tsv", 1, k).values.row(0).transpose();
  out.summary.activity_mean = read_matrix(dir / "summary" / "activity_mean.tsv", m_views, k).values;
  if ((out.summary.activity_mean.array() < 0.0).any() ||
      (out.summary.activity_mean.array() > 1.0).any()) {
    throw IntegrityError("activity means outside [0, 1]");
  }
  st.active = (out.summary.activity_mean.array() >= 0.5).cast<int>();
  if (!spike_consistent(st)) {
    throw IntegrityError("summary loadings are non-zero for inactive components");
  }
  return out;
}

std::vector<ComponentRow> read_component_table(const fs::path& dir) {
  const auto path = dir / "reports" / "components.tsv";
  if (!fs::exists(path)) {
    throw IntegrityError("missing " + path.string() + "; run `gfa summarize` first");
  }
  const auto rows = read_string_rows(path);
  std::vector<ComponentRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 8) throw IntegrityError("malformed row in " + path.string());
    ComponentRow r;
    r.label = rows[i][0];
    r.component = std::stol(rows[i][1]) - 1;
    r.kind = parse_kind(rows[i][2], path);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SignificantRow> read_significant_samples(const fs::path& dir) {
  const auto path = dir / "reports" / "significant_samples.tsv";
  if (!fs::exists(path)) {
    throw IntegrityError("missing " + path.string() + "; run `gfa summarize` first");
  }
  const auto rows = read_string_rows(path);
  std::vector<SignificantRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 6) throw IntegrityError("malformed row in " + path.string());
    out.push_back({rows[i][0], rows[i][2]});
  }
  return out;
}

}  // namespace gfa::cli
