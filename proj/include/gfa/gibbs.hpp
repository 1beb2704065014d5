#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfa/model.hpp"
#include "gfa/random.hpp"

namespace gfa {

struct SamplingSchedule {
  int n_chains = 10;
  int burn_in = 5000;
  int n_samples = 1000;
  int thinning = 5;
  std::uint64_t seed = 0;

  void validate() const;
  int retained() const { return n_samples / thinning; }
};

// Running element-wise sums over retained states.
struct StateAccumulator {
  ModelState sum;         // `active` unused; see activity_sum
  Eigen::MatrixXd activity_sum;
  int count = 0;

  void add(const ModelState& state);
};

struct ChainTrace {
  std::vector<ModelState> states;    // retained states, empty when not kept
  std::vector<double> log_densities;  // one per sweep, burn-in included
  StateAccumulator accumulator;
  int burn_in = 0;
  std::uint64_t seed = 0;

  int retained() const { return accumulator.count; }
  // Mean joint log density over the post-burn-in sweeps.
  double sampling_phase_mean() const;
};

struct ChainOutcome {
  int index = 0;
  std::optional<ChainTrace> trace;
  std::string error;

  bool failed() const { return !trace.has_value(); }
};

struct PosteriorSummary {
  ModelState mean_state;          // `active` = activity_mean >= 0.5
  Eigen::MatrixXd activity_mean;  // M x K in [0, 1]
  int retained = 0;
};

// Exact Gaussian full conditional of the score rows: shared precision
// I + sum_m W^T diag(tau) W, one mean per row.
struct LatentConditional {
  Eigen::MatrixXd means;      // N x K
  Eigen::MatrixXd precision;  // K x K
};

// Element-wise Gaussian conditional of one loading column given the other
// columns (residual excludes component k).
struct LoadingConditional {
  Eigen::VectorXd means;
  Eigen::VectorXd precisions;
};

LatentConditional latent_conditional(const ModelState& state, const MultiViewDataset& dataset);
LoadingConditional loading_conditional(const ModelState& state, const MultiViewDataset& dataset,
                                       Index view, Index component);
// log P(H=1 | rest) - log P(H=0 | rest) with the loading column integrated out.
double activity_log_odds(const ModelState& state, const MultiViewDataset& dataset, Index view,
                         Index component);

void sample_latents(ModelState& state, const MultiViewDataset& dataset, RandomStream& rng);
void sample_loadings(ModelState& state, const MultiViewDataset& dataset, RandomStream& rng);
void sample_activity(ModelState& state, const MultiViewDataset& dataset, RandomStream& rng);
void sample_inclusion(ModelState& state, const ModelConfig& config, RandomStream& rng);
void sample_ard(ModelState& state, const ModelConfig& config, RandomStream& rng);
void sample_noise(ModelState& state, const MultiViewDataset& dataset, const ModelConfig& config,
                  RandomStream& rng);

// latents -> activity -> loadings -> ard -> inclusion -> noise
void sweep(ModelState& state, const MultiViewDataset& dataset, const ModelConfig& config,
           RandomStream& rng);

struct ChainOptions {
  bool keep_states = true;
};

ChainTrace run_chain(const MultiViewDataset& dataset, const ModelConfig& config,
                     const SamplingSchedule& schedule, int chain_index,
                     const ChainOptions& options = {});

// Runs schedule.n_chains chains on up to `jobs` threads. A chain that throws
// is reported as failed with its message.
std::vector<ChainOutcome> run_chains(const MultiViewDataset& dataset, const ModelConfig& config,
                                     const SamplingSchedule& schedule, int jobs,
                                     const ChainOptions& options = {});

struct ChainSelection {
  std::size_t selected = 0;
  std::vector<double> chain_means;  // NaN for failed chains
  std::vector<bool> outlier;
  std::vector<bool> failed;
};

// Outliers are chains more than 3 median absolute deviations from the
// median; the winner is the non-outlier closest to the non-outlier mean,
// lowest index on ties.
ChainSelection select_chain_by_means(std::span<const double> means,
                                     const std::vector<bool>& failed);
ChainSelection select_chain(std::span<const ChainOutcome> outcomes);

PosteriorSummary posterior_summary(const ChainTrace& trace);

}  // namespace gfa
