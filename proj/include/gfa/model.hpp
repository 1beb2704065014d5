#pragma once

// Multi-view group factor model with group-wise spike-and-slab activity and
// element-wise ARD loadings:
//
//   x_n^(m) ~ N(W^(m) z_n, diag(1 / tau^(m)))      z_n ~ N(0, I)
//   W^(m)_{d,k} ~ H_{m,k} N(0, 1 / alpha^(m)_{d,k}) + (1 - H_{m,k}) delta_0
//   H_{m,k} ~ Bernoulli(pi_k)     pi_k ~ Beta(a_pi, b_pi)
//   alpha ~ Gamma(a_alpha, b_alpha)  tau ~ Gamma(a_tau, b_tau)   (shape, rate)

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gfa {

using Index = Eigen::Index;
using ActivityMatrix = Eigen::MatrixXi;

// One N x D_m data matrix; rows are samples, columns are features.
struct ViewMatrix {
  std::string name;
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;
  std::vector<std::string> sample_ids;
};

// M views over the same N samples, rows paired across views.
struct MultiViewDataset {
  std::vector<ViewMatrix> views;
  std::vector<std::string> sample_ids;

  Index num_samples() const { return static_cast<Index>(sample_ids.size()); }
  Index num_views() const { return static_cast<Index>(views.size()); }
  Index dim(Index m) const { return views[static_cast<std::size_t>(m)].values.cols(); }
  const Eigen::MatrixXd& data(Index m) const { return views[static_cast<std::size_t>(m)].values; }

  // Throws InvalidInput when any dataset invariant is broken.
  void validate() const;
};

// Names attached to a fit; enough to write reports without the raw data.
struct DatasetLabels {
  std::vector<std::string> view_names;
  std::vector<std::string> sample_ids;
  std::vector<std::vector<std::string>> feature_names;
};

DatasetLabels labels_of(const MultiViewDataset& dataset);

struct ModelConfig {
  int num_components = 80;
  double inclusion_a = 1.0;  // Beta prior on per-component inclusion probability
  double inclusion_b = 1.0;
  double ard_shape = 1e-3;   // Gamma prior on loading precisions
  double ard_rate = 1e-3;
  double noise_shape = 1e-3;  // Gamma prior on per-feature noise precisions
  double noise_rate = 1e-3;
  bool center_columns = true;
  bool scale_columns = false;

  void validate() const;
};

// One full assignment of the latent variables.
struct ModelState {
  Eigen::MatrixXd scores;                     // N x K
  std::vector<Eigen::MatrixXd> loadings;      // per view, D_m x K
  ActivityMatrix active;                      // M x K, 0/1
  Eigen::VectorXd inclusion;                  // K, in (0, 1)
  std::vector<Eigen::MatrixXd> ard_precision;  // per view, D_m x K
  std::vector<Eigen::VectorXd> noise_precision;  // per view, D_m

  Index num_components() const { return scores.cols(); }
  Index num_views() const { return active.rows(); }

  bool operator==(const ModelState&) const = default;
};

// Shape checks against a dataset plus positivity and spike consistency.
void validate_state(const ModelState& state, const MultiViewDataset& dataset);

// True iff every inactive (m, k) has an exactly-zero loading column.
bool spike_consistent(const ModelState& state);

ModelState initialize_state(const ModelConfig& config, const MultiViewDataset& dataset,
                            std::uint64_t seed);

// Additive pieces of the joint log density.
struct LogDensityTerms {
  double likelihood = 0.0;
  double scores = 0.0;
  double loadings = 0.0;    // slab terms only; spikes contribute nothing
  double activity = 0.0;    // Bernoulli terms for every (m, k)
  double inclusion = 0.0;   // Beta terms
  double ard = 0.0;
  double noise = 0.0;

  double total() const {
    return likelihood + scores + loadings + activity + inclusion + ard + noise;
  }
};

LogDensityTerms log_density_terms(const ModelState& state, const MultiViewDataset& dataset,
                                  const ModelConfig& config);

double joint_log_density(const ModelState& state, const MultiViewDataset& dataset,
                         const ModelConfig& config);

struct SyntheticTruth {
  ModelState state;
  ActivityMatrix activity;
};

struct SyntheticData {
  MultiViewDataset dataset;
  SyntheticTruth truth;
};

// Draws Z ~ N(0, I), active loading columns ~ N(0, 1), and per-view noise
// whose variance is the view's mean per-feature signal variance divided by
// snr (unit variance when the view carries no signal).
SyntheticData generate_synthetic(Index num_samples, const std::vector<Index>& dims,
                                 const ActivityMatrix& activity, double snr,
                                 std::uint64_t seed);

// Sum over views of ||Z_{:,k} W^(m)_{:,k}^T||_F^2 for each component.
Eigen::VectorXd variance_explained(const ModelState& state);

// Centers (and optionally scales) each column of every view. Constant
// columns end up all zero.
MultiViewDataset standardize_columns(MultiViewDataset dataset, bool center, bool scale);

}  // namespace gfa
