#pragma once

// Model directory layout:
//
//   manifest.json                   copy of the run manifest, hashes filled
//   run.status                      "running", "complete" or "failed<TAB>message"
//   model.json                      selected chain, retained count, chain check
//   chains/chains.tsv               per-chain status, mean log density, outlier flag
//   chains/chain_NN/log_density.tsv one row per sweep
//   summary/scores.tsv              samples x components (posterior mean)
//   summary/loadings_<view>.tsv     features x components
//   summary/ard_precision_<view>.tsv
//   summary/noise_precision_<view>.tsv
//   summary/inclusion.tsv
//   summary/activity_mean.tsv       views x components
//   summary/activity.tsv            thresholded activity
//   reports/components.tsv          one row per non-inactive component
//   reports/significant_samples.tsv
//   reports/top_loadings.tsv

#include <filesystem>
#include <string>
#include <vector>

#include "gfa/cli/manifest.hpp"
#include "gfa/components.hpp"
#include "gfa/gibbs.hpp"
#include "gfa/pipeline.hpp"

namespace gfa::cli {

void write_status(const std::filesystem::path& dir, const std::string& status);
std::string read_status(const std::filesystem::path& dir);

void write_chain_traces(const std::filesystem::path& dir, const std::vector<ChainOutcome>& chains,
                        const ChainSelection& selection);

void write_summary(const std::filesystem::path& dir, const FitResult& fit,
                   const DatasetLabels& labels, double activity_threshold);

void write_reports(const std::filesystem::path& dir, const std::vector<ComponentReport>& reports,
                   const DatasetLabels& labels);

struct LoadedModel {
  RunManifest manifest;
  PosteriorSummary summary;
  DatasetLabels labels;
};

// Reads manifest and summary matrices back; IntegrityError on any missing
// file, failed run, or inconsistent shape.
LoadedModel read_model_dir(const std::filesystem::path& dir);

struct SignificantRow {
  std::string label;
  std::string sample_id;
};

struct ComponentRow {
  std::string label;
  Index component = 0;
  ComponentKind kind = ComponentKind::Inactive;
};

std::vector<ComponentRow> read_component_table(const std::filesystem::path& dir);
std::vector<SignificantRow> read_significant_samples(const std::filesystem::path& dir);

}  // namespace gfa::cli
