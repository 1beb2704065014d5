#include "gfa/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "gfa/cli/manifest.hpp"
#include "gfa/cli/model_dir.hpp"
#include "gfa/error.hpp"
#include "gfa/ingest.hpp"
#include "gfa/pipeline.hpp"
#include "gfa/tsv.hpp"
#include "gfa/validation.hpp"

namespace gfa::cli {

namespace fs = std::filesystem;

namespace {

// Bad flag combinations detected after parsing; exit code 1 like parse errors.
struct UsageError : Error {
  using Error::Error;
};

struct ModelOverrides {
  std::optional<int> components;
  std::optional<int> chains;
  std::optional<int> burn_in;
  std::optional<int> samples;
  std::optional<int> thinning;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App& app) {
    app.add_option_function<int>("--components", [this](const int& v) { components = v; },
                                 "number of latent components (K)");
    app.add_option_function<int>("--chains", [this](const int& v) { chains = v; },
                                 "number of independent chains");
    app.add_option_function<int>("--burn-in", [this](const int& v) { burn_in = v; },
                                 "burn-in sweeps per chain");
    app.add_option_function<int>("--samples", [this](const int& v) { samples = v; },
                                 "sampling-phase sweeps per chain");
    app.add_option_function<int>("--thin", [this](const int& v) { thinning = v; },
                                 "keep every n-th sampling sweep");
    app.add_option_function<std::uint64_t>("--seed", [this](const std::uint64_t& v) { seed = v; },
                                           "base random seed");
  }

  void apply(RunManifest& m) const {
    if (components) m.model.num_components = *components;
    if (chains) m.sampling.n_chains = *chains;
    if (burn_in) m.sampling.burn_in = *burn_in;
    if (samples) m.sampling.n_samples = *samples;
    if (thinning) m.sampling.thinning = *thinning;
    if (seed) m.sampling.seed = *seed;
  }
};

std::vector<std::string> component_columns(Index k) {
  std::vector<std::string> names;
  for (Index j = 0; j < k; ++j) names.push_back("k" + std::to_string(j + 1));
  return names;
}

void write_table(const fs::path& path, const std::string& corner, std::vector<std::string> rows,
                 std::vector<std::string> cols, const Eigen::MatrixXd& values) {
  LabeledMatrix t;
  t.corner = corner;
  t.row_ids = std::move(rows);
  t.column_names = std::move(cols);
  t.values = values;
  write_labeled_matrix(path, t);
}

// One token per component, one 0/1 digit per view: "110,011".
ActivityMatrix parse_activity(const std::vector<std::string>& tokens, std::size_t num_views) {
  if (tokens.empty()) {
    throw UsageError("--activity needs at least one component pattern");
  }
  ActivityMatrix a(static_cast<Index>(num_views), static_cast<Index>(tokens.size()));
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto& t = tokens[k];
    if (t.size() != num_views || t.find_first_not_of("01") != std::string::npos) {
      throw UsageError("activity pattern '" + t + "' must be " + std::to_string(num_views) +
                       " characters of 0/1, one per view");
    }
    for (std::size_t m = 0; m < num_views; ++m) {
      a(static_cast<Index>(m), static_cast<Index>(k)) = t[m] == '1' ? 1 : 0;
    }
  }
  return a;
}

void prepare_output_dir(const fs::path& dir) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) {
      throw InvalidInput("output path exists and is not a directory: " + dir.string());
    }
    if (fs::exists(dir / "run.status")) {
      fs::remove_all(dir);
    } else if (!fs::is_empty(dir)) {
      throw InvalidInput("refusing to overwrite non-empty directory " + dir.string() +
                         " that is not a model directory");
    }
  }
  fs::create_directories(dir);
}

std::vector<ProfileTable> load_views(const RunManifest& manifest) {
  std::vector<ProfileTable> views;
  for (const auto& spec : manifest.views) {
    auto table = load_view(manifest.resolve(spec.path));
    table.name = spec.name;
    if (spec.merge_replicates) table = merge_replicates(table);
    if (spec.threshold) table = threshold_table(table, spec.top_up, spec.top_down);
    views.push_back(std::move(table));
  }
  return views;
}

// ---- generate ----------------------------------------------------------

struct GenerateArgs {
  std::string out;
  int n_samples = 100;
  std::vector<int> dims{20, 20, 30};
  std::vector<std::string> roles;
  std::vector<std::string> activity;
  double snr = 1.0;
  ModelOverrides overrides;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const std::size_t m_views = a.dims.size();
  if (m_views < 2) throw UsageError("--dims needs at least 2 views");
  if (a.n_samples < 2) throw UsageError("--n-samples must be at least 2");
  std::vector<Index> dims;
  for (int d : a.dims) {
    if (d < 1) throw UsageError("--dims entries must be positive");
    dims.push_back(d);
  }
  std::vector<std::string> roles = a.roles;
  if (roles.empty()) roles = ViewRoleMap::one_per_view(m_views).roles;
  if (roles.size() != m_views) {
    throw UsageError("--roles must give one role per view");
  }
  std::vector<std::string> pattern = a.activity;
  if (pattern.empty()) {
    // one all-view component plus one specific to each view
    pattern.emplace_back(m_views, '1');
    for (std::size_t m = 0; m < m_views; ++m) {
      std::string p(m_views, '0');
      p[m] = '1';
      pattern.push_back(p);
    }
  }
  const auto activity = parse_activity(pattern, m_views);

  RunManifest manifest;
  manifest.sampling.seed = 0;
  a.overrides.apply(manifest);
  const auto data = generate_synthetic(a.n_samples, dims, activity, a.snr, manifest.sampling.seed);

  const fs::path dir(a.out);
  fs::create_directories(dir / "views");
  fs::create_directories(dir / "truth");
  manifest.base_dir = dir;
  const auto& ds = data.dataset;
  std::vector<std::string> view_names;
  for (std::size_t m = 0; m < m_views; ++m) {
    const auto& v = ds.views[m];
    view_names.push_back(v.name);
    ProfileTable t{v.name, v.values, ds.sample_ids, v.feature_names};
    const std::string rel = "views/" + v.name + ".tsv";
    save_view(t, dir / rel);
    ViewSpec spec;
    spec.name = v.name;
    spec.path = rel;
    spec.role = roles[m];
    manifest.views.push_back(spec);

    const auto& st = data.truth.state;
    write_table(dir / "truth" / ("loadings_" + v.name + ".tsv"), "feature", v.feature_names,
                component_columns(st.num_components()), st.loadings[m]);
    write_table(dir / "truth" / ("noise_precision_" + v.name + ".tsv"), "feature", v.feature_names,
                {"noise_precision"}, st.noise_precision[m]);
  }
  const auto& st = data.truth.state;
  write_table(dir / "truth" / "activity.tsv", "view", view_names,
              component_columns(activity.cols()), activity.cast<double>());
  write_table(dir / "truth" / "scores.tsv", "sample_id", ds.sample_ids,
              component_columns(st.num_components()), st.scores);

  verify_hashes(manifest);
  manifest.validate();
  manifest.save(dir / "manifest.json");
  out << "wrote " << m_views << " views of " << a.n_samples << " samples and "
      << activity.cols() << " true components to " << dir.string() << "\n";
  return kExitOk;
}

// ---- preprocess --------------------------------------------------------

struct PreprocessArgs {
  std::vector<std::string> inputs;
  std::string out;
  bool no_merge = false;
  bool threshold = false;
  int top_up = kDefaultTopUp;
  int top_down = kDefaultTopDown;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const fs::path dir(a.out);
  fs::create_directories(dir);
  for (const auto& in : a.inputs) {
    if (!fs::exists(in)) throw InvalidInput("input file not found: " + in);
    auto table = load_view(in);
    const auto rows_in = table.values.rows();
    if (!a.no_merge) table = merge_replicates(table);
    if (a.threshold) table = threshold_table(table, a.top_up, a.top_down);
    const auto target = dir / (table.name + ".tsv");
    if (fs::exists(target) && fs::equivalent(target, in)) {
      throw InvalidInput("output would overwrite input " + in);
    }
    save_view(table, target);
    out << table.name << "\t" << rows_in << " rows -> " << table.values.rows() << " rows\n";
  }
  return kExitOk;
}

// ---- fit -----------------------------------------------------------------

struct FitArgs {
  std::string manifest;
  std::string out;
  int jobs = 1;
  ModelOverrides overrides;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  auto manifest = RunManifest::load(a.manifest);
  a.overrides.apply(manifest);
  manifest.validate();
  manifest.model.validate();
  manifest.sampling.validate();
  verify_hashes(manifest);
  // The copy stored with the model points at the inputs wherever it is read from.
  RunManifest copy = manifest;
  for (auto& v : copy.views) v.path = fs::weakly_canonical(manifest.resolve(v.path)).string();

  const fs::path dir = a.out.empty() ? manifest.resolve(manifest.output) : fs::path(a.out);
  prepare_output_dir(dir);
  write_status(dir, "running");
  try {
    copy.save(dir / "manifest.json");
    const auto assembled = assemble_dataset(load_views(manifest), false, false);
    const auto& report = assembled.report;
    for (std::size_t m = 0; m < report.dropped_rows.size(); ++m) {
      if (report.dropped_rows[m] > 0) {
        out << "view " << manifest.views[m].name << ": " << report.dropped_rows[m]
            << " rows without a partner in every view were dropped\n";
      }
    }
    const auto roles = manifest.roles();
    const auto fit = fit_model(assembled.dataset, manifest.model, manifest.sampling, roles, a.jobs);
    const auto labels = labels_of(fit.dataset);
    write_chain_traces(dir, fit.chains, fit.selection);
    write_summary(dir, fit, labels, 0.5);
    const auto reports = build_reports(fit.summary, labels, roles, manifest.report);
    write_reports(dir, reports, labels);
    write_status(dir, "complete");

    std::size_t failed = 0;
    for (const auto& c : fit.chains) failed += c.failed() ? 1 : 0;
    std::size_t shared = 0;
    for (const auto& r : reports) shared += r.classification.kind == ComponentKind::Shared;
    out << "fitted " << fit.chains.size() << " chains (" << failed << " failed); selected chain "
        << fit.selection.selected << " with " << fit.summary.retained << " retained states\n";
    out << shared << " shared and " << reports.size() - shared
        << " view-specific components; model written to " << dir.string() << "\n";
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    write_status(dir, "failed\t" + msg);
    throw;
  }
  return kExitOk;
}

// ---- summarize -----------------------------------------------------------

struct SummarizeArgs {
  std::string model_dir;
  std::optional<double> activity_threshold;
  std::optional<int> n_top;
  std::optional<int> n_permutations;
  std::optional<double> q_threshold;
};

int cmd_summarize(const SummarizeArgs& a, std::ostream& out) {
  const fs::path dir(a.model_dir);
  auto model = read_model_dir(dir);
  auto& opts = model.manifest.report;
  if (a.activity_threshold) opts.activity_threshold = *a.activity_threshold;
  if (a.n_top) opts.n_top = *a.n_top;
  if (a.n_permutations) opts.n_permutations = *a.n_permutations;
  if (a.q_threshold) opts.q_threshold = *a.q_threshold;
  model.manifest.validate();
  const auto reports = build_reports(model.summary, model.labels, model.manifest.roles(), opts);
  write_reports(dir, reports, model.labels);
  // Keep the stored manifest in step with the reports on disk.
  model.manifest.save(dir / "manifest.json");
  std::size_t shared = 0;
  for (const auto& r : reports) shared += r.classification.kind == ComponentKind::Shared;
  out << shared << " shared and " << reports.size() - shared << " view-specific components\n";
  return kExitOk;
}

// ---- validate ------------------------------------------------------------

struct ValidateArgs {
  std::string model_dir;
  std::string edges;
  std::string compounds;
  std::vector<int> lengths;
  int draws = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const fs::path dir(a.model_dir);
  if (read_status(dir) != "complete") {
    throw IntegrityError("not a completed model directory: " + dir.string());
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& row : read_string_rows(a.edges)) {
    if (row.size() != 2) {
      throw InvalidInput(a.edges + ": every edge line needs exactly two tab-separated nodes");
    }
    edges.emplace_back(row[0], row[1]);
  }
  std::vector<std::string> compound_ids;
  for (const auto& row : read_string_rows(a.compounds)) compound_ids.push_back(row.front());
  const OntologyGraph graph(edges, compound_ids);

  const auto components = read_component_table(dir);
  const auto significant = read_significant_samples(dir);
  std::vector<std::string> labels;
  std::vector<std::vector<std::string>> sets;
  for (const auto& c : components) {
    if (c.kind != ComponentKind::Shared) continue;
    labels.push_back(c.label);
    sets.emplace_back();
    for (const auto& s : significant) {
      if (s.label == c.label) sets.back().push_back(s.sample_id);
    }
  }
  if (sets.empty()) {
    throw NoResult("model has no shared components; nothing to validate");
  }

  const auto lengths = a.lengths.empty() ? default_path_lengths() : a.lengths;
  auto curve = component_curve(graph, sets, lengths);

  std::vector<std::size_t> sizes;
  for (const auto& s : sets) {
    std::set<std::string> in_graph;
    for (const auto& id : s) {
      if (graph.is_compound(id)) in_graph.insert(id);
    }
    if (in_graph.size() >= 2) sizes.push_back(in_graph.size());
  }
  RandomStream rng(a.seed);
  const auto baseline = random_baseline(graph, sizes, lengths, a.draws, rng);

  const fs::path target = a.out.empty() ? dir / "reports" / "validation_curve.tsv" : fs::path(a.out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream f(target, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + target.string() + "'");
  f << "path_length\tsimilarity\tbaseline_mean\tbaseline_std\n";
  for (std::size_t l = 0; l < lengths.size(); ++l) {
    f << lengths[l] << '\t' << format_double(curve.values[l]) << '\t'
      << format_double(baseline.mean[l]) << '\t' << format_double(baseline.std[l]) << '\n';
  }
  out << curve.evaluable_sets << " of " << sets.size() << " shared components evaluable; "
      << curve.dropped_members << " significant samples not in the graph; curve written to "
      << target.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view group factor analysis"};
  app.name("gfa");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "simulate a multi-view dataset with known structure");
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--n-samples", gen.n_samples, "number of paired samples")->capture_default_str();
  g->add_option("--dims", gen.dims, "features per view")->delimiter(',')->capture_default_str();
  g->add_option("--roles", gen.roles, "role of each view (default: one role per view)")
      ->delimiter(',');
  g->add_option("--activity", gen.activity,
                "one 0/1 string per true component, one digit per view, e.g. 111,100")
      ->delimiter(',');
  g->add_option("--snr", gen.snr, "signal-to-noise ratio, > 0")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--jobs", "accepted for uniformity; generation is sequential");
  gen.overrides.add_to(*g);

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "merge replicates and threshold profile tables");
  p->add_option("inputs", pre.inputs, "profile TSV files")->required()->check(CLI::ExistingFile);
  p->add_option("--out", pre.out, "output directory")->required();
  p->add_flag("--no-merge", pre.no_merge, "keep technical replicates as separate rows");
  p->add_flag("--threshold", pre.threshold, "keep only the top up/down entries of each row");
  p->add_option("--top-up", pre.top_up, "largest positive entries kept per row")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  p->add_option("--top-down", pre.top_down, "most negative entries kept per row")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  p->add_option("--seed", "accepted for uniformity; preprocessing is deterministic");
  p->add_option("--jobs", "accepted for uniformity; preprocessing is sequential");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "run the sampler described by a manifest");
  f->add_option("manifest", fit.manifest, "run manifest (JSON)")->required();
  f->add_option("--out", fit.out, "model directory (default: manifest output)");
  f->add_option("--jobs", fit.jobs, "chains run concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit.overrides.add_to(*f);

  SummarizeArgs sum;
  auto* s = app.add_subcommand("summarize", "rebuild component reports of a fitted model");
  s->add_option("model_dir", sum.model_dir, "model directory")->required();
  s->add_option_function<double>(
      "--activity-threshold", [&](const double& v) { sum.activity_threshold = v; },
      "posterior activity needed to call a view active (default 0.5)");
  s->add_option_function<int>("--top", [&](const int& v) { sum.n_top = v; },
                              "top loadings listed per view (default 30)");
  s->add_option_function<int>("--permutations", [&](const int& v) { sum.n_permutations = v; },
                              "null draws per score; p-values floor at 1/(P*N+1) (default 10000)");
  s->add_option_function<double>("--q-threshold", [&](const double& v) { sum.q_threshold = v; },
                                 "FDR cutoff for significant samples (default 0.05)");
  s->add_option("--out", "reports are always written inside the model directory");
  s->add_option("--seed", "accepted for uniformity; summaries are deterministic");
  s->add_option("--jobs", "accepted for uniformity; summaries are sequential");

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "score shared components against an ontology graph");
  v->add_option("model_dir", val.model_dir, "model directory")->required();
  v->add_option("--edges", val.edges, "two-column TSV of undirected edges")
      ->required()
      ->check(CLI::ExistingFile);
  v->add_option("--compounds", val.compounds, "compound ids, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  v->add_option("--lengths", val.lengths, "path length thresholds (default 2..16)")
      ->delimiter(',');
  v->add_option("--draws", val.draws, "random baseline draws")
      ->check(CLI::Range(2, 1 << 30))
      ->capture_default_str();
  v->add_option("--seed", val.seed, "baseline seed")->capture_default_str();
  v->add_option("--out", val.out, "curve TSV (default: <model_dir>/reports/validation_curve.tsv)");
  v->add_option("--jobs", "accepted for uniformity; validation is sequential");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*p) return cmd_preprocess(pre, out);
    if (*f) return cmd_fit(fit, out);
    if (*s) return cmd_summarize(sum, out);
    if (*v) return cmd_validate(val, out);
  } catch (const UsageError& e) {
    err << "gfa: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "gfa: numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "gfa: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace gfa::cli
