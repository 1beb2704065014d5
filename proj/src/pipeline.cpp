#include "gfa/pipeline.hpp"

#include <cmath>
#include <limits>

#include "gfa/error.hpp"

namespace gfa {

FitResult fit_model(const MultiViewDataset& dataset, const ModelConfig& config,
                    const SamplingSchedule& schedule, const ViewRoleMap& roles, int jobs,
                    const ChainOptions& options) {
  config.validate();
  schedule.validate();
  dataset.validate();
  if (static_cast<Index>(roles.roles.size()) != dataset.num_views()) {
    throw InvalidInput("role map must assign exactly one role per view");
  }

  FitResult result;
  result.dataset = standardize_columns(dataset, config.center_columns, config.scale_columns);
  result.chains = run_chains(result.dataset, config, schedule, jobs, options);
  result.selection = select_chain(result.chains);
  const auto& selected = *result.chains[result.selection.selected].trace;
  result.summary = posterior_summary(selected);

  const auto& sel = result.selection;
  const double chosen = sel.chain_means[sel.selected];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sel.chain_means.size(); ++i) {
    if (i == sel.selected || sel.failed[i] || sel.outlier[i]) continue;
    const double gap = std::abs(sel.chain_means[i] - chosen);
    if (gap < best) {
      best = gap;
      result.runner_up = i;
    }
  }
  if (result.runner_up) {
    const auto other = posterior_summary(*result.chains[*result.runner_up].trace);
    try {
      result.runner_up_similarity = chain_similarity(result.summary, other, roles);
    } catch (const NoResult&) {
      // no shared components to compare
    }
  }
  return result;
}

}  // namespace gfa
