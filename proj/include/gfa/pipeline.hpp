#pragma once

#include <optional>
#include <vector>

#include "gfa/components.hpp"
#include "gfa/gibbs.hpp"
#include "gfa/model.hpp"

namespace gfa {

struct FitResult {
  MultiViewDataset dataset;  // after column centering/scaling
  std::vector<ChainOutcome> chains;
  ChainSelection selection;
  PosteriorSummary summary;  // of the selected chain
  // Next non-outlier chain and the fraction of the selected chain's shared
  // components it reproduces (unset with one chain or no shared components).
  std::optional<std::size_t> runner_up;
  std::optional<double> runner_up_similarity;
};

// Standardizes per config, runs all chains, selects one and summarizes it.
FitResult fit_model(const MultiViewDataset& dataset, const ModelConfig& config,
                    const SamplingSchedule& schedule, const ViewRoleMap& roles, int jobs = 1,
                    const ChainOptions& options = {.keep_states = false});

}  // namespace gfa
