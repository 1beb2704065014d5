#pragma once

// Helpers shared by the unit and acceptance tests: dataset builders, a
// forward simulator of the full prior, and Monte-Carlo summaries.

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfa/model.hpp"
#include "gfa/random.hpp"

namespace gfa::test {

inline MultiViewDataset make_dataset(const std::vector<Eigen::MatrixXd>& views) {
  MultiViewDataset ds;
  const Index n = views.front().rows();
  for (Index i = 0; i < n; ++i) ds.sample_ids.push_back("s" + std::to_string(i));
  for (std::size_t m = 0; m < views.size(); ++m) {
    ViewMatrix v;
    v.name = "v" + std::to_string(m);
    v.values = views[m];
    v.sample_ids = ds.sample_ids;
    for (Index d = 0; d < views[m].cols(); ++d) {
      v.feature_names.push_back("v" + std::to_string(m) + "_" + std::to_string(d));
    }
    ds.views.push_back(std::move(v));
  }
  return ds;
}

inline MultiViewDataset zeros_dataset(Index n, const std::vector<Index>& dims) {
  std::vector<Eigen::MatrixXd> views;
  for (auto d : dims) views.push_back(Eigen::MatrixXd::Zero(n, d));
  return make_dataset(views);
}

// State with every block sized for the dataset and filled with fixed values.
inline ModelState blank_state(const MultiViewDataset& ds, Index k, double alpha = 1.0,
                              double tau = 1.0, double pi = 0.5) {
  ModelState s;
  s.scores = Eigen::MatrixXd::Zero(ds.num_samples(), k);
  s.active = ActivityMatrix::Ones(ds.num_views(), k);
  s.inclusion = Eigen::VectorXd::Constant(k, pi);
  for (Index m = 0; m < ds.num_views(); ++m) {
    s.loadings.push_back(Eigen::MatrixXd::Zero(ds.dim(m), k));
    s.ard_precision.push_back(Eigen::MatrixXd::Constant(ds.dim(m), k, alpha));
    s.noise_precision.push_back(Eigen::VectorXd::Constant(ds.dim(m), tau));
  }
  return s;
}

// One draw of every latent variable from the prior.
inline ModelState draw_prior_state(const ModelConfig& c, Index n, const std::vector<Index>& dims,
                                   RandomStream& rng) {
  const Index k = c.num_components;
  const Index m_views = static_cast<Index>(dims.size());
  ModelState s;
  s.scores.resize(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) s.scores(i, j) = rng.normal();
  s.inclusion.resize(k);
  for (Index j = 0; j < k; ++j) s.inclusion(j) = rng.beta(c.inclusion_a, c.inclusion_b);
  s.active.resize(m_views, k);
  for (Index m = 0; m < m_views; ++m) {
    const Index d = dims[static_cast<std::size_t>(m)];
    Eigen::MatrixXd alpha(d, k), w = Eigen::MatrixXd::Zero(d, k);
    for (Index j = 0; j < k; ++j) {
      s.active(m, j) = rng.bernoulli(s.inclusion(j)) ? 1 : 0;
      for (Index r = 0; r < d; ++r) {
        alpha(r, j) = rng.gamma(c.ard_shape, c.ard_rate);
        if (s.active(m, j)) w(r, j) = rng.normal() / std::sqrt(alpha(r, j));
      }
    }
    Eigen::VectorXd tau(d);
    for (Index r = 0; r < d; ++r) tau(r) = rng.gamma(c.noise_shape, c.noise_rate);
    s.loadings.push_back(w);
    s.ard_precision.push_back(alpha);
    s.noise_precision.push_back(tau);
  }
  return s;
}

// X^(m) = Z W^T + noise with per-feature precision tau.
inline void draw_data(const ModelState& s, MultiViewDataset& ds, RandomStream& rng) {
  for (std::size_t m = 0; m < ds.views.size(); ++m) {
    auto& x = ds.views[m].values;
    x = s.scores * s.loadings[m].transpose();
    for (Index c = 0; c < x.cols(); ++c) {
      const double sd = 1.0 / std::sqrt(s.noise_precision[m](c));
      for (Index r = 0; r < x.rows(); ++r) x(r, c) += sd * rng.normal();
    }
  }
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance
  double se = 0.0;   // iid standard error of the mean
};

inline Moments moments(const std::vector<double>& v) {
  Moments out;
  double m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - out.mean;
    out.mean += d / static_cast<double>(i + 1);
    m2 += d * (v[i] - out.mean);
  }
  out.var = m2 / static_cast<double>(v.size() - 1);
  out.se = std::sqrt(out.var / static_cast<double>(v.size()));
  return out;
}

// Standard error of the mean of an autocorrelated series by batch means.
inline double batch_means_se(const std::vector<double>& v, std::size_t n_batches = 50) {
  const std::size_t len = v.size() / n_batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += v[i];
    means.push_back(s / static_cast<double>(len));
  }
  return std::sqrt(moments(means).var / static_cast<double>(n_batches));
}

inline double normal_log_pdf(double x, double mean, double precision) {
  return 0.5 * (std::log(precision) - std::log(2.0 * M_PI)) - 0.5 * precision * (x - mean) * (x - mean);
}

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("gfa_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace gfa::test
