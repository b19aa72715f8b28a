// Copyright 2026 The scenex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENEX__OPTIMIZER_HPP_
#define SCENEX__OPTIMIZER_HPP_

#include "scenex/scenario.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace scenex
{

// Bayesian optimization over a finite lattice. The surrogate is a Gaussian
// process approximated by Bayesian linear regression on random cosine features
// of a squared-exponential kernel; candidates are picked by Thompson sampling.
// Minimization is the native direction.

/// Lowest noise variance a kernel may carry.
inline constexpr double kNoiseFloor = 1e-6;
/// Noise variance used for the single retry after a failed factorization.
inline constexpr double kFitRetryNoise = 1e-2;

struct KernelConfig
{
  double length_scale{0.2};  // isotropic, in normalized [0,1] coordinates
  double signal_variance{1.0};
  double noise_variance{1e-2};
  std::size_t features{1000};

  void validate() const;
};

/// phi(x) = sqrt(2 s^2 / M) cos(W x + b)
class FeatureMap
{
public:
  FeatureMap(Eigen::MatrixXd frequencies, Eigen::VectorXd phases, double signal_variance);

  std::size_t features() const { return static_cast<std::size_t>(phases_.size()); }
  std::size_t dims() const { return static_cast<std::size_t>(frequencies_.cols()); }
  const Eigen::MatrixXd & frequencies() const { return frequencies_; }
  const Eigen::VectorXd & phases() const { return phases_; }
  double amplitude() const { return amplitude_; }

  Eigen::VectorXd operator()(std::span<const double> x) const;
  /// One feature row per input row.
  Eigen::MatrixXd design(const Eigen::MatrixXd & inputs) const;

private:
  Eigen::MatrixXd frequencies_;  // M x d
  Eigen::VectorXd phases_;  // M
  double amplitude_;
};

/// Frequencies drawn from the kernel's spectral density N(0, 1/l^2); phases uniform on [0, 2pi).
FeatureMap sample_feature_map(const KernelConfig & cfg, std::size_t dims, std::uint64_t seed);

/// Exact squared-exponential kernel, the target of the feature approximation.
double squared_exponential(
  std::span<const double> x, std::span<const double> y, double length_scale,
  double signal_variance);

struct Observation
{
  IndexVector index;
  std::vector<double> x;  // normalized coordinates
  double y{0.0};
};

/// k / (samples - 1) per dim; single-sample dims map to 0.
std::vector<double> normalize(const ParameterGrid & grid, const IndexVector & index);

struct Prediction
{
  double mean{0.0};
  double variance{0.0};  // latent function variance, >= 0
};

/**
 * Weight-space posterior of the feature regression with unit weight prior.
 *
 * With fewer observations than features the posterior is held in dual form
 * (Cholesky of Phi Phi^T + s_n^2 I), otherwise in primal form (Cholesky of
 * Phi^T Phi / s_n^2 + I). Both describe the same Gaussian.
 */
class GpPosterior
{
public:
  enum class Form { primal, dual };

  GpPosterior(FeatureMap map, KernelConfig cfg, const std::vector<Observation> & obs,
    std::optional<Form> force_form = std::nullopt);

  const FeatureMap & feature_map() const { return map_; }
  const KernelConfig & config() const { return cfg_; }
  Form form() const { return form_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  const Eigen::VectorXd & weight_mean() const { return weight_mean_; }

  /// Prediction in original y units.
  Prediction predict(std::span<const double> x) const;
  /// One draw from the weight posterior (standardized units).
  Eigen::VectorXd sample_weights(std::mt19937_64 & rng) const;
  /// Standardized weights mapped back to original y units: f(x) = mean + scale * phi(x) . w
  double evaluate(const Eigen::VectorXd & weights, std::span<const double> x) const;

private:
  FeatureMap map_;
  KernelConfig cfg_;
  Form form_;
  double y_mean_{0.0};
  double y_scale_{1.0};
  Eigen::MatrixXd design_;  // N x M
  Eigen::VectorXd y_std_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd weight_mean_;
};

/// Throws FitError when the factorization fails twice; throws std::invalid_argument on no data.
GpPosterior fit(const std::vector<Observation> & obs, const KernelConfig & cfg, std::uint64_t seed);

/// Gaussian log evidence of the standardized targets under the feature model.
double log_marginal_likelihood(
  const std::vector<Observation> & obs, const KernelConfig & cfg, std::uint64_t seed);

/// The fixed candidate set: l in {0.05, 0.1, 0.2, 0.4, 0.8} x noise in {1e-4, 1e-2}.
std::vector<KernelConfig> default_tuning_candidates(std::size_t features = 1000);

/// Evidence argmax over the candidates; ties go to the larger length scale.
KernelConfig tune(
  const std::vector<Observation> & obs, const std::vector<KernelConfig> & candidates,
  std::uint64_t seed);

/// Sampled-function values at every lattice cell, in flat order.
Eigen::VectorXd score_grid(
  const FeatureMap & map, const Eigen::VectorXd & weights, const ParameterGrid & grid);

/// Lowest score among unevaluated cells; ties resolve to the lower flat index.
std::optional<std::uint64_t> argmin_unevaluated(
  const Eigen::VectorXd & scores, const std::vector<bool> & evaluated);

struct BoOptions
{
  std::size_t budget{430};
  std::size_t init_count{8};
  std::uint64_t seed{1};
  std::size_t retune_every{10};
  std::size_t features{1000};
  double failure_value{20.0};  // recorded when the objective throws or returns non-finite
};

struct BoState
{
  const ParameterGrid * grid{nullptr};
  BoOptions options;
  std::vector<Observation> observations;
  std::vector<bool> evaluated;
  std::optional<GpPosterior> posterior;
  std::mt19937_64 rng;
  KernelConfig kernel;

  BoState(const ParameterGrid & g, BoOptions opts);
  bool exhausted() const { return observations.size() >= grid->cardinality(); }
  const Observation & incumbent() const;
};

/// Distinct space-filling start cells (shifted Halton sequence).
std::vector<IndexVector> initial_design(
  const ParameterGrid & grid, std::size_t count, std::uint64_t seed);

/// Thompson draw over all unevaluated cells. Throws std::runtime_error when the grid is exhausted.
IndexVector thompson_next(BoState & state);

using Objective = std::function<double(const IndexVector &)>;
/// Called after each evaluation with the new observation and its ordinal.
using ObservationHook = std::function<void(std::size_t, const Observation &)>;

/// Full loop: initial design, then fit / periodic retune / Thompson step until the budget.
std::vector<Observation> run(
  const Objective & objective, const ParameterGrid & grid, const BoOptions & options,
  const ObservationHook & hook = {});

/// splitmix64 finalizer; derives independent stream seeds from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace scenex

#endif  // SCENEX__OPTIMIZER_HPP_
