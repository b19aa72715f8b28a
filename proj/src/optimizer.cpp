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

#include "scenex/optimizer.hpp"

#include "scenex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace scenex
{

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void KernelConfig::validate() const
{
  if (!(length_scale > 0.0) || !(signal_variance > 0.0) || features == 0) {
    throw std::invalid_argument("kernel config: length scale, signal variance and features must be positive");
  }
  if (!(noise_variance >= kNoiseFloor)) {
    throw std::invalid_argument("kernel config: noise variance below the noise floor");
  }
}

FeatureMap::FeatureMap(Eigen::MatrixXd frequencies, Eigen::VectorXd phases, double signal_variance)
: frequencies_(std::move(frequencies)),
  phases_(std::move(phases)),
  amplitude_(std::sqrt(2.0 * signal_variance / static_cast<double>(phases_.size())))
{
}

Eigen::VectorXd FeatureMap::operator()(std::span<const double> x) const
{
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return amplitude_ * (frequencies_ * xv + phases_).array().cos().matrix();
}

Eigen::MatrixXd FeatureMap::design(const Eigen::MatrixXd & inputs) const
{
  Eigen::MatrixXd arg = inputs * frequencies_.transpose();
  arg.rowwise() += phases_.transpose();
  return amplitude_ * arg.array().cos().matrix();
}

FeatureMap sample_feature_map(const KernelConfig & cfg, std::size_t dims, std::uint64_t seed)
{
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  const auto m = static_cast<Eigen::Index>(cfg.features);
  const auto d = static_cast<Eigen::Index>(dims);
  Eigen::MatrixXd w(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      w(i, j) = normal(rng) / cfg.length_scale;
    }
  }
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    b(i) = uniform(rng);
  }
  return FeatureMap(std::move(w), std::move(b), cfg.signal_variance);
}

double squared_exponential(
  std::span<const double> x, std::span<const double> y, double length_scale,
  double signal_variance)
{
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = (x[i] - y[i]) / length_scale;
    r2 += d * d;
  }
  return signal_variance * std::exp(-0.5 * r2);
}

std::vector<double> normalize(const ParameterGrid & grid, const IndexVector & index)
{
  grid.check_index(index);
  std::vector<double> x(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const std::size_t n = grid.dims()[i].samples;
    x[i] = n > 1 ? static_cast<double>(index[i]) / static_cast<double>(n - 1) : 0.0;
  }
  return x;
}

namespace
{

constexpr double kLog2Pi = 1.8378770664093453;

Eigen::MatrixXd input_matrix(const std::vector<Observation> & obs)
{
  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto d = static_cast<Eigen::Index>(obs.front().x.size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      x(i, j) = obs[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(j)];
    }
  }
  return x;
}

struct Standardized
{
  Eigen::VectorXd y;
  double mean{0.0};
  double scale{1.0};
};

Standardized standardize(const std::vector<Observation> & obs)
{
  Standardized s;
  const auto n = static_cast<Eigen::Index>(obs.size());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = obs[static_cast<std::size_t>(i)].y;
  }
  s.mean = y.mean();
  const double var = (y.array() - s.mean).square().mean();
  s.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  s.y = (y.array() - s.mean) / s.scale;
  return s;
}

GpPosterior::Form choose_form(std::size_t n, std::size_t m)
{
  return n < m ? GpPosterior::Form::dual : GpPosterior::Form::primal;
}

// Cholesky of the form's system matrix; nullopt when not positive definite.
std::optional<Eigen::LLT<Eigen::MatrixXd>> factorize(
  const Eigen::MatrixXd & phi, double noise, GpPosterior::Form form)
{
  Eigen::MatrixXd system;
  if (form == GpPosterior::Form::dual) {
    system = phi * phi.transpose();
    system.diagonal().array() += noise;
  } else {
    system = phi.transpose() * phi / noise;
    system.diagonal().array() += 1.0;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    return std::nullopt;
  }
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (!(diag.array() > 0.0).all() || !diag.allFinite()) {
    return std::nullopt;
  }
  return llt;
}

}  // namespace

GpPosterior::GpPosterior(
  FeatureMap map, KernelConfig cfg, const std::vector<Observation> & obs,
  std::optional<Form> force_form)
: map_(std::move(map)), cfg_(cfg)
{
  if (obs.empty()) {
    throw std::invalid_argument("fit needs at least one observation");
  }
  const Standardized st = standardize(obs);
  y_mean_ = st.mean;
  y_scale_ = st.scale;
  y_std_ = st.y;
  design_ = map_.design(input_matrix(obs));
  form_ = force_form.value_or(choose_form(obs.size(), map_.features()));

  auto llt = factorize(design_, cfg_.noise_variance, form_);
  if (!llt) {
    cfg_.noise_variance = std::max(cfg_.noise_variance * 10.0, kFitRetryNoise);
    llt = factorize(design_, cfg_.noise_variance, form_);
    if (!llt) {
      throw FitError("surrogate factorization failed after noise retry");
    }
  }
  factor_ = std::move(*llt);
  if (form_ == Form::dual) {
    weight_mean_ = design_.transpose() * factor_.solve(y_std_);
  } else {
    weight_mean_ = factor_.solve(design_.transpose() * y_std_ / cfg_.noise_variance);
  }
}

Prediction GpPosterior::predict(std::span<const double> x) const
{
  const Eigen::VectorXd phi = map_(x);
  double var = 0.0;
  if (form_ == Form::dual) {
    const Eigen::VectorXd v = factor_.matrixL().solve(design_ * phi);
    var = phi.squaredNorm() - v.squaredNorm();
  } else {
    var = factor_.matrixL().solve(phi).squaredNorm();
  }
  Prediction p;
  p.mean = y_mean_ + y_scale_ * phi.dot(weight_mean_);
  p.variance = std::max(0.0, var) * y_scale_ * y_scale_;
  return p;
}

Eigen::VectorXd GpPosterior::sample_weights(std::mt19937_64 & rng) const
{
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(map_.features());
  if (form_ == Form::primal) {
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      z(i) = normal(rng);
    }
    // A = L L^T, Cov = A^-1 -> w = mean + L^-T z
    return weight_mean_ + factor_.matrixU().solve(z);
  }
  // Pathwise update of a prior draw: w = w0 + Phi^T K^-1 (y - Phi w0 - eps)
  const auto n = design_.rows();
  Eigen::VectorXd w0(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    w0(i) = normal(rng);
  }
  Eigen::VectorXd eps(n);
  const double noise_sd = std::sqrt(cfg_.noise_variance);
  for (Eigen::Index i = 0; i < n; ++i) {
    eps(i) = noise_sd * normal(rng);
  }
  const Eigen::VectorXd residual = y_std_ - design_ * w0 - eps;
  return w0 + design_.transpose() * factor_.solve(residual);
}

double GpPosterior::evaluate(const Eigen::VectorXd & weights, std::span<const double> x) const
{
  return y_mean_ + y_scale_ * map_(x).dot(weights);
}

GpPosterior fit(const std::vector<Observation> & obs, const KernelConfig & cfg, std::uint64_t seed)
{
  if (obs.empty()) {
    throw std::invalid_argument("fit needs at least one observation");
  }
  return GpPosterior(sample_feature_map(cfg, obs.front().x.size(), seed), cfg, obs);
}

double log_marginal_likelihood(
  const std::vector<Observation> & obs, const KernelConfig & cfg, std::uint64_t seed)
{
  if (obs.size() < 2) {
    throw std::invalid_argument("evidence needs at least two observations");
  }
  const FeatureMap map = sample_feature_map(cfg, obs.front().x.size(), seed);
  const Standardized st = standardize(obs);
  const Eigen::MatrixXd phi = map.design(input_matrix(obs));
  const auto n = static_cast<double>(obs.size());
  const auto form = choose_form(obs.size(), map.features());

  double noise = cfg.noise_variance;
  auto llt = factorize(phi, noise, form);
  if (!llt) {
    noise = std::max(noise * 10.0, kFitRetryNoise);
    llt = factorize(phi, noise, form);
    if (!llt) {
      throw FitError("evidence factorization failed after noise retry");
    }
  }
  const double log_det_factor = 2.0 * llt->matrixL().toDenseMatrix().diagonal().array().log().sum();

  double quad = 0.0;
  double log_det = 0.0;
  if (form == GpPosterior::Form::dual) {
    quad = st.y.dot(llt->solve(st.y));
    log_det = log_det_factor;
  } else {
    // K^-1 = (I - Phi A^-1 Phi^T / s2) / s2,  |K| = |A| s2^N
    const Eigen::VectorXd pty = phi.transpose() * st.y;
    quad = (st.y.squaredNorm() - pty.dot(llt->solve(pty)) / noise) / noise;
    log_det = log_det_factor + n * std::log(noise);
  }
  return -0.5 * quad - 0.5 * log_det - 0.5 * n * kLog2Pi;
}

std::vector<KernelConfig> default_tuning_candidates(std::size_t features)
{
  std::vector<KernelConfig> out;
  for (double l : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    for (double noise : {1e-4, 1e-2}) {
      out.push_back(KernelConfig{l, 1.0, noise, features});
    }
  }
  return out;
}

KernelConfig tune(
  const std::vector<Observation> & obs, const std::vector<KernelConfig> & candidates,
  std::uint64_t seed)
{
  if (candidates.empty()) {
    throw std::invalid_argument("tune needs at least one candidate");
  }
  if (candidates.size() == 1) {
    return candidates.front();
  }
  std::optional<KernelConfig> best;
  double best_lml = -std::numeric_limits<double>::infinity();
  for (const auto & c : candidates) {
    double lml = -std::numeric_limits<double>::infinity();
    try {
      lml = log_marginal_likelihood(obs, c, seed);
    } catch (const FitError &) {
      continue;
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(best_lml));
    const bool tie = std::isfinite(best_lml) && std::abs(lml - best_lml) <= tol;
    if (!best || (!tie && lml > best_lml) || (tie && c.length_scale > best->length_scale)) {
      best = c;
      best_lml = lml;
    }
  }
  return best.value_or(candidates.front());
}

Eigen::VectorXd score_grid(
  const FeatureMap & map, const Eigen::VectorXd & weights, const ParameterGrid & grid)
{
  // cos(sum_d w_d x_d + b) = Re(e^{ib} prod_d e^{i w_d x_d}); the leading dims
  // are folded into per-row coefficients, the last dim is applied as a GEMM.
  const auto & dims = grid.dims();
  const std::size_t d = dims.size();
  const auto m = static_cast<Eigen::Index>(map.features());
  const std::size_t n_last = dims.back().samples;
  const std::uint64_t rows = grid.cardinality() / n_last;

  auto coord = [&](std::size_t dim, std::size_t k) {
    const std::size_t n = dims[dim].samples;
    return n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
  };

  Eigen::MatrixXd cos_last(m, static_cast<Eigen::Index>(n_last));
  Eigen::MatrixXd sin_last(m, static_cast<Eigen::Index>(n_last));
  for (std::size_t k = 0; k < n_last; ++k) {
    const Eigen::VectorXd arg = map.frequencies().col(static_cast<Eigen::Index>(d - 1)) * coord(d - 1, k);
    cos_last.col(static_cast<Eigen::Index>(k)) = arg.array().cos().matrix();
    sin_last.col(static_cast<Eigen::Index>(k)) = arg.array().sin().matrix();
  }

  const Eigen::MatrixXd cos_last_t = cos_last.transpose();
  const Eigen::MatrixXd sin_last_t = sin_last.transpose();

  // e^{i w_j x} tables for the leading dims
  std::vector<Eigen::MatrixXd> lead_cos(d - 1);
  std::vector<Eigen::MatrixXd> lead_sin(d - 1);
  for (std::size_t j = 0; j + 1 < d; ++j) {
    lead_cos[j].resize(m, static_cast<Eigen::Index>(dims[j].samples));
    lead_sin[j].resize(m, static_cast<Eigen::Index>(dims[j].samples));
    for (std::size_t k = 0; k < dims[j].samples; ++k) {
      const Eigen::ArrayXd arg = map.frequencies().col(static_cast<Eigen::Index>(j)).array() * coord(j, k);
      lead_cos[j].col(static_cast<Eigen::Index>(k)) = arg.cos().matrix();
      lead_sin[j].col(static_cast<Eigen::Index>(k)) = arg.sin().matrix();
    }
  }

  const Eigen::ArrayXd coeff = map.amplitude() * weights.array();
  const Eigen::ArrayXd base_re = coeff * map.phases().array().cos();
  const Eigen::ArrayXd base_im = coeff * map.phases().array().sin();
  Eigen::VectorXd scores(static_cast<Eigen::Index>(grid.cardinality()));
  constexpr std::uint64_t kBlock = 512;
  IndexVector lead(d - 1, 0);
  Eigen::ArrayXd cr(m);
  Eigen::ArrayXd ci(m);
  for (std::uint64_t r0 = 0; r0 < rows; r0 += kBlock) {
    const auto block = static_cast<Eigen::Index>(std::min(kBlock, rows - r0));
    Eigen::MatrixXd re(m, block);
    Eigen::MatrixXd im(m, block);
    for (Eigen::Index r = 0; r < block; ++r) {
      // lead holds the row-major index of the leading dims for row r0 + r
      std::uint64_t rest = r0 + static_cast<std::uint64_t>(r);
      for (std::size_t j = d - 1; j-- > 0;) {
        lead[j] = static_cast<std::size_t>(rest % dims[j].samples);
        rest /= dims[j].samples;
      }
      cr = base_re;
      ci = base_im;
      for (std::size_t j = 0; j + 1 < d; ++j) {
        const auto k = static_cast<Eigen::Index>(lead[j]);
        const auto tc = lead_cos[j].col(k).array();
        const auto ts = lead_sin[j].col(k).array();
        const Eigen::ArrayXd nr = cr * tc - ci * ts;
        ci = cr * ts + ci * tc;
        cr = nr;
      }
      re.col(r) = cr.matrix();
      im.col(r) = ci.matrix();
    }
    const Eigen::MatrixXd out = cos_last_t * re - sin_last_t * im;
    for (Eigen::Index r = 0; r < block; ++r) {
      scores.segment(static_cast<Eigen::Index>((r0 + static_cast<std::uint64_t>(r)) * n_last),
                     static_cast<Eigen::Index>(n_last)) = out.col(r);
    }
  }
  return scores;
}

std::optional<std::uint64_t> argmin_unevaluated(
  const Eigen::VectorXd & scores, const std::vector<bool> & evaluated)
{
  std::optional<std::uint64_t> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (evaluated[static_cast<std::size_t>(i)]) {
      continue;
    }
    if (!best || scores(i) < best_score) {
      best = static_cast<std::uint64_t>(i);
      best_score = scores(i);
    }
  }
  return best;
}

BoState::BoState(const ParameterGrid & g, BoOptions opts)
: grid(&g),
  options(opts),
  evaluated(static_cast<std::size_t>(g.cardinality()), false),
  rng(mix_seed(opts.seed, 2)),
  kernel{0.2, 1.0, 1e-2, opts.features}
{
}

const Observation & BoState::incumbent() const
{
  if (observations.empty()) {
    throw std::logic_error("no observations yet");
  }
  return *std::min_element(
    observations.begin(), observations.end(),
    [](const Observation & a, const Observation & b) { return a.y < b.y; });
}

namespace
{

double radical_inverse(std::uint64_t i, std::uint64_t base)
{
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::vector<IndexVector> initial_design(
  const ParameterGrid & grid, std::size_t count, std::uint64_t seed)
{
  const std::size_t d = grid.size();
  if (d > std::size(kPrimes)) {
    throw std::invalid_argument("initial design supports at most 16 dims");
  }
  count = static_cast<std::size_t>(std::min<std::uint64_t>(count, grid.cardinality()));
  std::mt19937_64 rng(mix_seed(seed, 3));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> shift(d);
  for (auto & s : shift) {
    s = uniform(rng);
  }

  std::vector<IndexVector> out;
  std::vector<bool> taken(static_cast<std::size_t>(grid.cardinality()), false);
  const std::uint64_t max_tries = 64 * (count + 1);
  for (std::uint64_t j = 1; out.size() < count && j <= max_tries; ++j) {
    IndexVector idx(d);
    for (std::size_t k = 0; k < d; ++k) {
      double u = radical_inverse(j, kPrimes[k]) + shift[k];
      u -= std::floor(u);
      const std::size_t n = grid.dims()[k].samples;
      idx[k] = std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
    }
    const auto f = grid.flat(idx);
    if (!taken[f]) {
      taken[f] = true;
      out.push_back(std::move(idx));
    }
  }
  // tiny grids: fill the rest uniformly
  while (out.size() < count) {
    std::uniform_int_distribution<std::uint64_t> pick(0, grid.cardinality() - 1);
    const auto f = pick(rng);
    if (!taken[f]) {
      taken[f] = true;
      out.push_back(grid.unflat(f));
    }
  }
  return out;
}

IndexVector thompson_next(BoState & state)
{
  if (state.exhausted()) {
    throw std::runtime_error("grid exhausted");
  }
  if (!state.posterior) {
    throw std::logic_error("thompson_next needs a fitted posterior");
  }
  const Eigen::VectorXd w = state.posterior->sample_weights(state.rng);
  const Eigen::VectorXd scores = score_grid(state.posterior->feature_map(), w, *state.grid);
  const auto next = argmin_unevaluated(scores, state.evaluated);
  if (!next) {
    throw std::runtime_error("grid exhausted");
  }
  return state.grid->unflat(*next);
}

std::vector<Observation> run(
  const Objective & objective, const ParameterGrid & grid, const BoOptions & options,
  const ObservationHook & hook)
{
  if (options.init_count < 1 || options.budget < options.init_count) {
    throw std::invalid_argument("need budget >= init_count >= 1");
  }
  BoState state(grid, options);
  const std::uint64_t feature_seed = mix_seed(options.seed, 1);
  const auto candidates = default_tuning_candidates(options.features);

  auto evaluate = [&](const IndexVector & index) {
    double y = options.failure_value;
    try {
      y = objective(index);
    } catch (const std::exception &) {
      y = options.failure_value;
    }
    if (!std::isfinite(y)) {
      y = options.failure_value;
    }
    Observation o{index, normalize(grid, index), y};
    state.evaluated[grid.flat(index)] = true;
    state.observations.push_back(std::move(o));
    if (hook) {
      hook(state.observations.size() - 1, state.observations.back());
    }
  };

  for (const auto & index : initial_design(grid, options.init_count, options.seed)) {
    evaluate(index);
  }

  for (std::size_t iter = 0; state.observations.size() < options.budget && !state.exhausted();
       ++iter) {
    if (iter % options.retune_every == 0 && state.observations.size() >= 2) {
      state.kernel = tune(state.observations, candidates, feature_seed);
    }
    state.posterior.emplace(fit(state.observations, state.kernel, feature_seed));
    evaluate(thompson_next(state));
  }
  return state.observations;
}

}  // namespace scenex
