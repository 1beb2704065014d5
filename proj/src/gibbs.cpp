#include "gfa/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "gfa/error.hpp"

namespace gfa {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_precision(const Eigen::MatrixXd& precision) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("latent conditional precision is not positive definite");
  }
  return llt;
}

Eigen::MatrixXd residual(const ModelState& state, const MultiViewDataset& dataset, Index m) {
  return dataset.data(m) - state.scores * state.loadings[static_cast<std::size_t>(m)].transpose();
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

// Draws one column from its element-wise conditional given the residual
// correlation `corr` = R_{-k}^T z_k and the score energy s = ||z_k||^2.
void draw_column(Eigen::Ref<Eigen::VectorXd> out, const Eigen::VectorXd& corr, double energy,
                 const Eigen::Ref<const Eigen::VectorXd>& alpha, const Eigen::VectorXd& tau,
                 RandomStream& rng) {
  for (Index d = 0; d < out.size(); ++d) {
    const double prec = alpha(d) + tau(d) * energy;
    const double mean = tau(d) * corr(d) / prec;
    out(d) = mean + rng.normal() / std::sqrt(prec);
  }
}

double column_log_odds(const Eigen::VectorXd& corr, double energy,
                       const Eigen::Ref<const Eigen::VectorXd>& alpha, const Eigen::VectorXd& tau,
                       double inclusion) {
  double lo = logit(inclusion);
  for (Index d = 0; d < corr.size(); ++d) {
    const double prec = alpha(d) + tau(d) * energy;
    const double tc = tau(d) * corr(d);
    lo += 0.5 * (std::log(alpha(d)) - std::log(prec)) + 0.5 * tc * tc / prec;
  }
  return lo;
}

}  // namespace

void SamplingSchedule::validate() const {
  if (n_chains < 1 || n_samples < 1 || thinning < 1 || burn_in < 0) {
    throw InvalidInput("sampling schedule counts must be >= 1 (burn-in >= 0)");
  }
  if (thinning > n_samples) {
    throw InvalidInput("thinning larger than the number of samples retains nothing");
  }
}

void StateAccumulator::add(const ModelState& state) {
  if (count == 0) {
    sum = state;
    activity_sum = state.active.cast<double>();
  } else {
    sum.scores += state.scores;
    sum.inclusion += state.inclusion;
    for (std::size_t m = 0; m < state.loadings.size(); ++m) {
      sum.loadings[m] += state.loadings[m];
      sum.ard_precision[m] += state.ard_precision[m];
      sum.noise_precision[m] += state.noise_precision[m];
    }
    activity_sum += state.active.cast<double>();
  }
  ++count;
}

double ChainTrace::sampling_phase_mean() const {
  const auto first = log_densities.begin() + std::min<std::ptrdiff_t>(burn_in, std::ssize(log_densities));
  const auto n = std::distance(first, log_densities.end());
  if (n == 0) {
    throw NoResult("chain has no sampling-phase sweeps");
  }
  double s = 0.0;
  for (auto it = first; it != log_densities.end(); ++it) s += *it;
  return s / static_cast<double>(n);
}

LatentConditional latent_conditional(const ModelState& state, const MultiViewDataset& dataset) {
  const Index k = state.num_components();
  LatentConditional out;
  out.precision = Eigen::MatrixXd::Identity(k, k);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dataset.num_samples(), k);
  for (Index m = 0; m < dataset.num_views(); ++m) {
    const auto um = static_cast<std::size_t>(m);
    const Eigen::MatrixXd tw = state.noise_precision[um].asDiagonal() * state.loadings[um];
    out.precision.noalias() += state.loadings[um].transpose() * tw;
    rhs.noalias() += dataset.data(m) * tw;
  }
  const auto llt = factor_precision(out.precision);
  out.means = llt.solve(rhs.transpose()).transpose();
  return out;
}

LoadingConditional loading_conditional(const ModelState& state, const MultiViewDataset& dataset,
                                       Index view, Index component) {
  const auto um = static_cast<std::size_t>(view);
  const auto z = state.scores.col(component);
  Eigen::MatrixXd r = residual(state, dataset, view);
  r.noalias() += z * state.loadings[um].col(component).transpose();
  const Eigen::VectorXd corr = r.transpose() * z;
  const double energy = z.squaredNorm();
  const auto& tau = state.noise_precision[um];
  const auto& alpha = state.ard_precision[um];

  LoadingConditional out;
  out.precisions = alpha.col(component) + tau * energy;
  out.means = tau.cwiseProduct(corr).cwiseQuotient(out.precisions);
  return out;
}

double activity_log_odds(const ModelState& state, const MultiViewDataset& dataset, Index view,
                         Index component) {
  const auto um = static_cast<std::size_t>(view);
  const auto z = state.scores.col(component);
  Eigen::MatrixXd r = residual(state, dataset, view);
  r.noalias() += z * state.loadings[um].col(component).transpose();
  const Eigen::VectorXd corr = r.transpose() * z;
  return column_log_odds(corr, z.squaredNorm(), state.ard_precision[um].col(component),
                         state.noise_precision[um], state.inclusion(component));
}

void sample_latents(ModelState& state, const MultiViewDataset& dataset, RandomStream& rng) {
  const auto cond = latent_conditional(state, dataset);
  const auto llt = factor_precision(cond.precision);
  const Index n = cond.means.rows();
  const Index k = cond.means.cols();
  Eigen::MatrixXd noise(k, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) {
      noise(j, i) = rng.normal();
    }
  }
  // L L^T = P  =>  L^{-T} e ~ N(0, P^{-1})
  llt.matrixU().solveInPlace(noise);
  state.scores = cond.means + noise.transpose();
}

void sample_loadings(ModelState& state, const MultiViewDataset& dataset, RandomStream& rng) {
  const Index k = state.num_components();
  for (Index m = 0; m < dataset.num_views(); ++m) {
    const auto um = static_cast<std::size_t>(m);
    auto& w = state.loadings[um];
    Eigen::MatrixXd r = residual(state, dataset, m);
    for (Index j = 0; j < k; ++j) {
      if (state.active(m, j) == 0) continue;
      const auto z = state.scores.col(j);
      r.noalias() += z * w.col(j).transpose();
      const Eigen::VectorXd corr = r.transpose() * z;
      draw_column(w.col(j), corr, z.squaredNorm(), state.ard_precision[um].col(j),
                  state.noise_precision[um], rng);
      r.noalias() -= z * w.col(j).transpose();
    }
  }
}

void sample_activity(ModelState& state, const MultiViewDataset& dataset, RandomStream& rng) {
  const Index k = state.num_components();
  for (Index m = 0; m < dataset.num_views(); ++m) {
    const auto um = static_cast<std::size_t>(m);
    auto& w = state.loadings[um];
    Eigen::MatrixXd r = residual(state, dataset, m);
    for (Index j = 0; j < k; ++j) {
      const auto z = state.scores.col(j);
      if (state.active(m, j) != 0) {
        r.noalias() += z * w.col(j).transpose();
      }
      const Eigen::VectorXd corr = r.transpose() * z;
      const double energy = z.squaredNorm();
      const auto alpha = state.ard_precision[um].col(j);
      const double lo =
          column_log_odds(corr, energy, alpha, state.noise_precision[um], state.inclusion(j));
      if (!std::isfinite(lo)) {
        throw NumericalError("non-finite activity log-odds for view " + std::to_string(m) +
                             ", component " + std::to_string(j));
      }
      // H = 1 with probability sigmoid(lo), compared on the logit scale.
      const double u = rng.uniform();
      const bool on = logit(u) < lo;
      state.active(m, j) = on ? 1 : 0;
      if (on) {
        draw_column(w.col(j), corr, energy, alpha, state.noise_precision[um], rng);
        r.noalias() -= z * w.col(j).transpose();
      } else {
        w.col(j).setZero();
      }
    }
  }
}

void sample_inclusion(ModelState& state, const ModelConfig& config, RandomStream& rng) {
  const double m_views = static_cast<double>(state.num_views());
  for (Index j = 0; j < state.num_components(); ++j) {
    const double on = static_cast<double>(state.active.col(j).sum());
    state.inclusion(j) = rng.beta(config.inclusion_a + on, config.inclusion_b + m_views - on);
  }
}

void sample_ard(ModelState& state, const ModelConfig& config, RandomStream& rng) {
  for (Index m = 0; m < state.num_views(); ++m) {
    const auto um = static_cast<std::size_t>(m);
    auto& alpha = state.ard_precision[um];
    const auto& w = state.loadings[um];
    for (Index j = 0; j < alpha.cols(); ++j) {
      const bool on = state.active(m, j) != 0;
      for (Index d = 0; d < alpha.rows(); ++d) {
        alpha(d, j) = on ? rng.gamma(config.ard_shape + 0.5, config.ard_rate + 0.5 * w(d, j) * w(d, j))
                         : rng.gamma(config.ard_shape, config.ard_rate);
      }
    }
  }
}

void sample_noise(ModelState& state, const MultiViewDataset& dataset, const ModelConfig& config,
                  RandomStream& rng) {
  const double half_n = 0.5 * static_cast<double>(dataset.num_samples());
  for (Index m = 0; m < dataset.num_views(); ++m) {
    const auto um = static_cast<std::size_t>(m);
    const Eigen::VectorXd sq = residual(state, dataset, m).colwise().squaredNorm().transpose();
    auto& tau = state.noise_precision[um];
    for (Index d = 0; d < tau.size(); ++d) {
      tau(d) = rng.gamma(config.noise_shape + half_n, config.noise_rate + 0.5 * sq(d));
    }
  }
}

void sweep(ModelState& state, const MultiViewDataset& dataset, const ModelConfig& config,
           RandomStream& rng) {
  sample_latents(state, dataset, rng);
  sample_activity(state, dataset, rng);
  sample_loadings(state, dataset, rng);
  sample_ard(state, config, rng);
  sample_inclusion(state, config, rng);
  sample_noise(state, dataset, config, rng);
}

ChainTrace run_chain(const MultiViewDataset& dataset, const ModelConfig& config,
                     const SamplingSchedule& schedule, int chain_index,
                     const ChainOptions& options) {
  schedule.validate();
  config.validate();
  dataset.validate();

  ChainTrace trace;
  trace.seed = derive_seed(schedule.seed, static_cast<std::uint64_t>(chain_index));
  trace.burn_in = schedule.burn_in;
  RandomStream rng(trace.seed);
  ModelState state = initialize_state(config, dataset, rng.next());
  validate_state(state, dataset);

  const int total = schedule.burn_in + schedule.n_samples;
  trace.log_densities.reserve(static_cast<std::size_t>(total));
  if (options.keep_states) {
    trace.states.reserve(static_cast<std::size_t>(schedule.retained()));
  }
  for (int it = 0; it < total; ++it) {
    sweep(state, dataset, config, rng);
    trace.log_densities.push_back(joint_log_density(state, dataset, config));
    const int post = it - schedule.burn_in + 1;
    if (post > 0 && post % schedule.thinning == 0) {
      trace.accumulator.add(state);
      if (options.keep_states) {
        trace.states.push_back(state);
      }
    }
  }
  return trace;
}

std::vector<ChainOutcome> run_chains(const MultiViewDataset& dataset, const ModelConfig& config,
                                     const SamplingSchedule& schedule, int jobs,
                                     const ChainOptions& options) {
  schedule.validate();
  const int n = schedule.n_chains;
  std::vector<ChainOutcome> outcomes(static_cast<std::size_t>(n));
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      auto& out = outcomes[static_cast<std::size_t>(i)];
      out.index = i;
      try {
        out.trace = run_chain(dataset, config, schedule, i, options);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };

  if (jobs <= 0) {
    jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  jobs = std::min(jobs, n);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  return outcomes;
}

namespace {

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

ChainSelection select_chain_by_means(std::span<const double> means,
                                     const std::vector<bool>& failed) {
  if (means.size() != failed.size()) {
    throw InvalidInput("chain means and failure flags differ in length");
  }
  ChainSelection sel;
  sel.chain_means.assign(means.begin(), means.end());
  sel.failed = failed;
  sel.outlier.assign(means.size(), false);

  std::vector<double> ok;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!failed[i]) ok.push_back(means[i]);
  }
  if (ok.empty()) {
    throw NoResult("all chains failed");
  }
  const double med = median(ok);
  std::vector<double> dev;
  for (double v : ok) dev.push_back(std::abs(v - med));
  const double mad = median(dev);

  double sum = 0.0;
  int kept = 0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (failed[i]) continue;
    sel.outlier[i] = std::abs(means[i] - med) > 3.0 * mad;
    if (!sel.outlier[i]) {
      sum += means[i];
      ++kept;
    }
  }
  const double target = sum / kept;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (failed[i] || sel.outlier[i]) continue;
    const double gap = std::abs(means[i] - target);
    if (gap < best) {
      best = gap;
      sel.selected = i;
    }
  }
  return sel;
}

ChainSelection select_chain(std::span<const ChainOutcome> outcomes) {
  std::vector<double> means;
  std::vector<bool> failed;
  for (const auto& o : outcomes) {
    failed.push_back(o.failed());
    means.push_back(o.failed() ? std::numeric_limits<double>::quiet_NaN()
                               : o.trace->sampling_phase_mean());
  }
  if (!outcomes.empty() && std::all_of(failed.begin(), failed.end(), [](bool f) { return f; })) {
    throw NumericalError("all chains failed; chain 0: " + outcomes.front().error);
  }
  return select_chain_by_means(means, failed);
}

PosteriorSummary posterior_summary(const ChainTrace& trace) {
  const auto& acc = trace.accumulator;
  if (acc.count == 0) {
    throw NoResult("trace has no retained states");
  }
  const double inv = 1.0 / static_cast<double>(acc.count);
  PosteriorSummary out;
  out.retained = acc.count;
  out.activity_mean = acc.activity_sum * inv;

  ModelState& s = out.mean_state;
  s.scores = acc.sum.scores * inv;
  s.inclusion = acc.sum.inclusion * inv;
  s.active = (out.activity_mean.array() >= 0.5).cast<int>();
  for (std::size_t m = 0; m < acc.sum.loadings.size(); ++m) {
    Eigen::MatrixXd w = acc.sum.loadings[m] * inv;
    for (Index j = 0; j < w.cols(); ++j) {
      if (s.active(static_cast<Index>(m), j) == 0) w.col(j).setZero();
    }
    s.loadings.push_back(std::move(w));
    s.ard_precision.push_back(acc.sum.ard_precision[m] * inv);
    s.noise_precision.push_back(acc.sum.noise_precision[m] * inv);
  }
  return out;
}

}  // namespace gfa
