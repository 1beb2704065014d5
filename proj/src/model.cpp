#include "gfa/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "gfa/error.hpp"
#include "gfa/random.hpp"

namespace gfa {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

std::string view_label(const MultiViewDataset& dataset, std::size_t m) {
  const auto& name = dataset.views[m].name;
  return name.empty() ? "view " + std::to_string(m) : "view '" + name + "'";
}

double gamma_log_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double beta_log_pdf(double x, double a, double b) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

void require_finite(double value, const std::string& where) {
  if (!std::isfinite(value)) {
    throw NumericalError("non-finite log density term: " + where);
  }
}

}  // namespace

void MultiViewDataset::validate() const {
  if (views.size() < 2) {
    throw InvalidInput("dataset needs at least 2 views, got " + std::to_string(views.size()));
  }
  if (sample_ids.size() < 2) {
    throw InvalidInput("dataset needs at least 2 samples, got " + std::to_string(sample_ids.size()));
  }
  const Index n = num_samples();
  for (std::size_t m = 0; m < views.size(); ++m) {
    const auto& view = views[m];
    const auto label = view_label(*this, m);
    if (view.values.rows() != n) {
      throw InvalidInput(label + " has " + std::to_string(view.values.rows()) + " rows, expected " +
                         std::to_string(n));
    }
    if (view.values.cols() < 1) {
      throw InvalidInput(label + " has no features");
    }
    if (static_cast<Index>(view.feature_names.size()) != view.values.cols()) {
      throw InvalidInput(label + ": feature name count does not match column count");
    }
    if (view.sample_ids != sample_ids) {
      throw InvalidInput(label + ": sample ids are not paired with the dataset rows");
    }
    std::set<std::string> seen;
    for (const auto& f : view.feature_names) {
      if (!seen.insert(f).second) {
        throw InvalidInput(label + ": duplicate feature name '" + f + "'");
      }
    }
    if (!view.values.allFinite()) {
      throw InvalidInput(label + " contains non-finite values");
    }
  }
}

DatasetLabels labels_of(const MultiViewDataset& dataset) {
  DatasetLabels labels;
  labels.sample_ids = dataset.sample_ids;
  for (const auto& view : dataset.views) {
    labels.view_names.push_back(view.name);
    labels.feature_names.push_back(view.feature_names);
  }
  return labels;
}

void ModelConfig::validate() const {
  if (num_components < 1) {
    throw InvalidInput("number of components must be at least 1");
  }
  const double hyper[] = {inclusion_a, inclusion_b, ard_shape, ard_rate, noise_shape, noise_rate};
  for (double h : hyper) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw InvalidInput("prior hyperparameters must be finite and positive");
    }
  }
}

void validate_state(const ModelState& state, const MultiViewDataset& dataset) {
  const Index k = state.scores.cols();
  const Index m_views = dataset.num_views();
  if (state.scores.rows() != dataset.num_samples()) {
    throw InvalidInput("state scores have wrong number of rows");
  }
  if (state.active.rows() != m_views || state.active.cols() != k) {
    throw InvalidInput("activity matrix must be views x components");
  }
  if (state.inclusion.size() != k) {
    throw InvalidInput("inclusion vector must have one entry per component");
  }
  if (static_cast<Index>(state.loadings.size()) != m_views ||
      static_cast<Index>(state.ard_precision.size()) != m_views ||
      static_cast<Index>(state.noise_precision.size()) != m_views) {
    throw InvalidInput("state must carry one loading/precision block per view");
  }
  for (Index m = 0; m < m_views; ++m) {
    const auto um = static_cast<std::size_t>(m);
    const Index d = dataset.dim(m);
    if (state.loadings[um].rows() != d || state.loadings[um].cols() != k ||
        state.ard_precision[um].rows() != d || state.ard_precision[um].cols() != k ||
        state.noise_precision[um].size() != d) {
      throw InvalidInput("state block shapes do not match " + view_label(dataset, um));
    }
    if ((state.ard_precision[um].array() <= 0.0).any() ||
        (state.noise_precision[um].array() <= 0.0).any()) {
      throw InvalidInput("precisions must be strictly positive");
    }
  }
  if ((state.inclusion.array() <= 0.0).any() || (state.inclusion.array() >= 1.0).any()) {
    throw InvalidInput("inclusion probabilities must lie in (0, 1)");
  }
  if (!spike_consistent(state)) {
    throw InvalidInput("inactive component has non-zero loadings");
  }
}

bool spike_consistent(const ModelState& state) {
  for (Index m = 0; m < state.active.rows(); ++m) {
    const auto& w = state.loadings[static_cast<std::size_t>(m)];
    for (Index k = 0; k < state.active.cols(); ++k) {
      if (state.active(m, k) == 0 && (w.col(k).array() != 0.0).any()) {
        return false;
      }
    }
  }
  return true;
}

ModelState initialize_state(const ModelConfig& config, const MultiViewDataset& dataset,
                            std::uint64_t seed) {
  config.validate();
  dataset.validate();
  const Index n = dataset.num_samples();
  const Index k = config.num_components;
  const Index m_views = dataset.num_views();

  RandomStream rng(seed);
  ModelState state;
  state.scores.resize(n, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      state.scores(i, j) = rng.normal();
    }
  }
  state.active = ActivityMatrix::Ones(m_views, k);
  state.inclusion =
      Eigen::VectorXd::Constant(k, config.inclusion_a / (config.inclusion_a + config.inclusion_b));
  for (Index m = 0; m < m_views; ++m) {
    const Index d = dataset.dim(m);
    Eigen::MatrixXd w(d, k);
    for (Index j = 0; j < k; ++j) {
      for (Index i = 0; i < d; ++i) {
        w(i, j) = rng.normal(0.0, 0.1);
      }
    }
    state.loadings.push_back(std::move(w));
    state.ard_precision.push_back(Eigen::MatrixXd::Constant(d, k, config.ard_shape / config.ard_rate));
    state.noise_precision.push_back(
        Eigen::VectorXd::Constant(d, config.noise_shape / config.noise_rate));
  }
  return state;
}

LogDensityTerms log_density_terms(const ModelState& state, const MultiViewDataset& dataset,
                                  const ModelConfig& config) {
  validate_state(state, dataset);
  const Index n = dataset.num_samples();
  const Index k = state.num_components();
  LogDensityTerms t;

  for (Index m = 0; m < dataset.num_views(); ++m) {
    const auto um = static_cast<std::size_t>(m);
    const auto& tau = state.noise_precision[um];
    const auto& w = state.loadings[um];
    const Eigen::MatrixXd resid = dataset.data(m) - state.scores * w.transpose();
    const Eigen::VectorXd sq = resid.colwise().squaredNorm().transpose();
    double ll = 0.0;
    for (Index d = 0; d < tau.size(); ++d) {
      ll += 0.5 * static_cast<double>(n) * (std::log(tau(d)) - kLogTwoPi) - 0.5 * tau(d) * sq(d);
    }
    require_finite(ll, "likelihood of " + view_label(dataset, um));
    t.likelihood += ll;

    const auto& alpha = state.ard_precision[um];
    double slab = 0.0;
    double ard = 0.0;
    for (Index j = 0; j < k; ++j) {
      const bool on = state.active(m, j) != 0;
      for (Index d = 0; d < alpha.rows(); ++d) {
        const double a = alpha(d, j);
        if (on) {
          slab += 0.5 * (std::log(a) - kLogTwoPi) - 0.5 * a * w(d, j) * w(d, j);
        }
        ard += gamma_log_pdf(a, config.ard_shape, config.ard_rate);
      }
    }
    require_finite(slab, "loading prior of " + view_label(dataset, um));
    require_finite(ard, "ARD prior of " + view_label(dataset, um));
    t.loadings += slab;
    t.ard += ard;

    double noise = 0.0;
    for (Index d = 0; d < tau.size(); ++d) {
      noise += gamma_log_pdf(tau(d), config.noise_shape, config.noise_rate);
    }
    require_finite(noise, "noise prior of " + view_label(dataset, um));
    t.noise += noise;
  }

  t.scores = -0.5 * static_cast<double>(n * k) * kLogTwoPi - 0.5 * state.scores.squaredNorm();
  require_finite(t.scores, "latent score prior");

  for (Index j = 0; j < k; ++j) {
    const double p = state.inclusion(j);
    for (Index m = 0; m < state.num_views(); ++m) {
      t.activity += state.active(m, j) != 0 ? std::log(p) : std::log1p(-p);
    }
    t.inclusion += beta_log_pdf(p, config.inclusion_a, config.inclusion_b);
  }
  require_finite(t.activity, "activity prior");
  require_finite(t.inclusion, "inclusion prior");
  return t;
}

double joint_log_density(const ModelState& state, const MultiViewDataset& dataset,
                         const ModelConfig& config) {
  return log_density_terms(state, dataset, config).total();
}

SyntheticData generate_synthetic(Index num_samples, const std::vector<Index>& dims,
                                 const ActivityMatrix& activity, double snr, std::uint64_t seed) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw InvalidInput("snr must be positive");
  }
  if (num_samples < 2) {
    throw InvalidInput("need at least 2 samples");
  }
  if (dims.size() < 2) {
    throw InvalidInput("need at least 2 views");
  }
  const Index m_views = static_cast<Index>(dims.size());
  if (activity.rows() != m_views || activity.cols() < 1) {
    throw InvalidInput("activity must be views x components with at least one component");
  }
  if (((activity.array() != 0) && (activity.array() != 1)).any()) {
    throw InvalidInput("activity entries must be 0 or 1");
  }
  for (Index d : dims) {
    if (d < 1) {
      throw InvalidInput("every view needs at least one feature");
    }
  }

  const Index n = num_samples;
  const Index k = activity.cols();
  RandomStream rng(seed);

  ModelState st;
  st.scores.resize(n, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      st.scores(i, j) = rng.normal();
    }
  }
  st.active = activity;
  st.inclusion.resize(k);
  for (Index j = 0; j < k; ++j) {
    const double frac = static_cast<double>(activity.col(j).sum()) / static_cast<double>(m_views);
    st.inclusion(j) = std::clamp(frac, 0.01, 0.99);
  }

  SyntheticData out;
  for (Index i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s%04ld", static_cast<long>(i + 1));
    out.dataset.sample_ids.emplace_back(buf);
  }

  for (Index m = 0; m < m_views; ++m) {
    const Index d = dims[static_cast<std::size_t>(m)];
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, k);
    for (Index j = 0; j < k; ++j) {
      if (activity(m, j) == 0) continue;
      for (Index r = 0; r < d; ++r) {
        w(r, j) = rng.normal();
      }
    }
    const Eigen::MatrixXd signal = st.scores * w.transpose();
    const Eigen::RowVectorXd mean = signal.colwise().mean();
    const double signal_var =
        (signal.rowwise() - mean).colwise().squaredNorm().mean() / static_cast<double>(n - 1);
    const double noise_var = signal_var > 0.0 ? signal_var / snr : 1.0;
    const double sd = std::sqrt(noise_var);

    Eigen::MatrixXd x = signal;
    for (Index c = 0; c < d; ++c) {
      for (Index r = 0; r < n; ++r) {
        x(r, c) += rng.normal(0.0, sd);
      }
    }

    ViewMatrix view;
    view.name = "view" + std::to_string(m + 1);
    view.values = std::move(x);
    view.sample_ids = out.dataset.sample_ids;
    for (Index c = 0; c < d; ++c) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "v%ld_f%04ld", static_cast<long>(m + 1), static_cast<long>(c + 1));
      view.feature_names.emplace_back(buf);
    }
    out.dataset.views.push_back(std::move(view));

    st.loadings.push_back(std::move(w));
    st.ard_precision.push_back(Eigen::MatrixXd::Ones(d, k));
    st.noise_precision.push_back(Eigen::VectorXd::Constant(d, 1.0 / noise_var));
  }
  out.truth.activity = activity;
  out.truth.state = std::move(st);
  return out;
}

Eigen::VectorXd variance_explained(const ModelState& state) {
  const Index k = state.scores.cols();
  Eigen::VectorXd loading_sq = Eigen::VectorXd::Zero(k);
  for (const auto& w : state.loadings) {
    if (w.cols() != k) {
      throw InvalidInput("loading matrix has " + std::to_string(w.cols()) +
                         " columns, expected " + std::to_string(k));
    }
    loading_sq += w.colwise().squaredNorm().transpose();
  }
  // ||z w^T||_F^2 = ||z||^2 ||w||^2
  return state.scores.colwise().squaredNorm().transpose().cwiseProduct(loading_sq);
}

MultiViewDataset standardize_columns(MultiViewDataset dataset, bool center, bool scale) {
  for (auto& view : dataset.views) {
    auto& x = view.values;
    const Index n = x.rows();
    for (Index c = 0; c < x.cols(); ++c) {
      auto col = x.col(c);
      const double mean = col.mean();
      const double sd =
          n > 1 ? std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
      if (center) {
        col.array() -= mean;
      }
      if (scale) {
        if (sd > 0.0) {
          col /= sd;
        } else if (center) {
          col.setZero();
        }
      }
    }
  }
  return dataset;
}

}  // namespace gfa
