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


#include "scenex/errors.hpp"
#include "scenex/optimizer.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using scenex::IndexVector;
using scenex::KernelConfig;
using scenex::Observation;
using scenex::ParameterGrid;

namespace
{

std::vector<Observation> sine_data(std::size_t n)
{
  const ParameterGrid g({{"x", 0.0, 1.0, n}});
  std::vector<Observation> obs;
  for (std::size_t k = 0; k < n; ++k) {
    const auto x = scenex::normalize(g, {k});
    obs.push_back({{k}, x, std::sin(2.0 * std::numbers::pi * x[0])});
  }
  return obs;
}

double branin_on(const ParameterGrid & g, const IndexVector & idx)
{
  const auto v = g.values(idx);
  return scenex::testing::branin(v[0], v[1]);
}

}  // namespace

TEST(Normalize, Examples)
{
  const ParameterGrid g(
    {{"ped_delay", 0.0, 7.0, 50}, {"ego_s", 27.99, 77.99, 250}, {"one", 3.0, 3.0, 1}});
  EXPECT_EQ(scenex::normalize(g, {0, 0, 0}), (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(scenex::normalize(g, {49, 0, 0})[0], 1.0);
  EXPECT_NEAR(scenex::normalize(g, {0, 125, 0})[1], 125.0 / 249.0, 1e-15);
}

TEST(FeatureMap, Deterministic)
{
  KernelConfig cfg;
  cfg.features = 64;
  const auto a = scenex::sample_feature_map(cfg, 2, 99);
  const auto b = scenex::sample_feature_map(cfg, 2, 99);
  EXPECT_EQ(a.frequencies(), b.frequencies());
  EXPECT_EQ(a.phases(), b.phases());
  const auto c = scenex::sample_feature_map(cfg, 2, 100);
  EXPECT_NE(a.phases(), c.phases());
}

TEST(FeatureMap, ApproximatesSquaredExponential)
{
  KernelConfig cfg;
  cfg.features = 2000;
  cfg.length_scale = 0.3;
  cfg.signal_variance = 1.7;
  const std::vector<double> x{0.2, 0.4};
  const std::vector<double> y{0.2 + 0.3 / std::sqrt(2.0), 0.4 + 0.3 / std::sqrt(2.0)};
  double cross = 0.0;
  double self = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto map = scenex::sample_feature_map(cfg, 2, seed);
    cross += map(x).dot(map(y)) / 10.0;
    self += map(x).dot(map(x)) / 10.0;
  }
  const double exact_cross = 1.7 * std::exp(-0.5);
  EXPECT_NEAR(scenex::squared_exponential(x, y, 0.3, 1.7), exact_cross, 1e-12);
  EXPECT_LT(std::abs(cross - exact_cross) / exact_cross, 0.05);
  EXPECT_LT(std::abs(self - 1.7) / 1.7, 0.05);
}

TEST(Fit, SingleObservationInterpolates)
{
  KernelConfig cfg;
  cfg.noise_variance = 1e-4;
  const std::vector<Observation> obs{{{3}, {0.3}, 4.2}};
  const auto post = scenex::fit(obs, cfg, 1);
  EXPECT_NEAR(post.predict(obs[0].x).mean, 4.2, std::sqrt(cfg.noise_variance));
  EXPECT_THROW(scenex::fit({}, cfg, 1), std::invalid_argument);
}

TEST(Fit, SineRegression)
{
  KernelConfig cfg;
  cfg.features = 500;
  cfg.length_scale = 0.2;
  cfg.noise_variance = 1e-4;
  const auto post = scenex::fit(sine_data(20), cfg, 5);
  double sq = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = i / 99.0;
    const double e = post.predict(std::vector<double>{x}).mean - std::sin(2.0 * std::numbers::pi * x);
    sq += e * e;
  }
  EXPECT_LT(std::sqrt(sq / 100.0), 0.05);
}

TEST(Fit, VarianceLowerAtData)
{
  KernelConfig cfg;
  cfg.length_scale = 0.1;
  std::vector<Observation> obs;
  for (double x : {0.0, 0.1, 0.2, 0.3}) {
    obs.push_back({{}, {x}, x * x});
  }
  const auto post = scenex::fit(obs, cfg, 2);
  EXPECT_LT(post.predict(std::vector<double>{0.1}).variance,
            post.predict(std::vector<double>{1.0}).variance);
}

TEST(Fit, PrimalAndDualAgree)
{
  KernelConfig cfg;
  cfg.features = 60;
  cfg.noise_variance = 1e-2;
  const auto obs = sine_data(30);
  const auto map = scenex::sample_feature_map(cfg, 1, 4);
  const scenex::GpPosterior primal(map, cfg, obs, scenex::GpPosterior::Form::primal);
  const scenex::GpPosterior dual(map, cfg, obs, scenex::GpPosterior::Form::dual);
  for (double x : {0.05, 0.5, 0.77}) {
    const std::vector<double> q{x};
    EXPECT_NEAR(primal.predict(q).mean, dual.predict(q).mean, 1e-8);
    EXPECT_NEAR(primal.predict(q).variance, dual.predict(q).variance, 1e-8);
  }
}

TEST(Evidence, PrefersConsistentNoiseAndScale)
{
  std::vector<Observation> dup;
  for (int i = 0; i < 6; ++i) {
    dup.push_back({{}, {0.25 * (i % 3)}, static_cast<double>(i % 3)});
  }
  KernelConfig tight;
  tight.noise_variance = 1e-4;
  KernelConfig loose;
  loose.noise_variance = 1.0;
  EXPECT_GT(scenex::log_marginal_likelihood(dup, tight, 1),
            scenex::log_marginal_likelihood(dup, loose, 1));

  const auto sine = sine_data(20);
  KernelConfig moderate;
  moderate.length_scale = 0.2;
  KernelConfig wide;
  wide.length_scale = 10.0;
  EXPECT_GT(scenex::log_marginal_likelihood(sine, moderate, 3),
            scenex::log_marginal_likelihood(sine, wide, 3));

  auto shuffled = sine;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[2], shuffled[11]);
  EXPECT_NEAR(scenex::log_marginal_likelihood(sine, moderate, 3),
              scenex::log_marginal_likelihood(shuffled, moderate, 3), 1e-6);
  EXPECT_THROW(scenex::log_marginal_likelihood({sine[0]}, moderate, 3), std::invalid_argument);
}

TEST(Tune, CandidateRules)
{
  const auto sine = sine_data(20);
  KernelConfig only;
  only.length_scale = 0.05;
  EXPECT_EQ(scenex::tune(sine, {only}, 1).length_scale, 0.05);

  const auto cands = scenex::default_tuning_candidates(1000);
  EXPECT_EQ(cands.size(), 10U);
  EXPECT_LE(scenex::tune(sine, cands, 1).length_scale, 0.4);

  std::vector<Observation> flat;
  for (int i = 0; i < 8; ++i) {
    flat.push_back({{}, {i / 7.0}, 3.0});
  }
  EXPECT_EQ(scenex::tune(flat, cands, 1).length_scale, 0.8);
}

TEST(Thompson, TieGoesToLowerIndex)
{
  Eigen::VectorXd scores(5);
  scores << 3.0, 1.0, 2.0, 1.0, 5.0;
  std::vector<bool> done(5, false);
  EXPECT_EQ(scenex::argmin_unevaluated(scores, done), 1U);
  done[1] = true;
  EXPECT_EQ(scenex::argmin_unevaluated(scores, done), 3U);
  std::fill(done.begin(), done.end(), true);
  EXPECT_FALSE(scenex::argmin_unevaluated(scores, done).has_value());
}

TEST(Thompson, LastRemainingCell)
{
  const ParameterGrid g({{"x", 0.0, 1.0, 6}});
  scenex::BoOptions opts;
  opts.features = 50;
  scenex::BoState st(g, opts);
  for (std::size_t k = 0; k < 6; ++k) {
    if (k == 4) continue;
    st.observations.push_back({{k}, scenex::normalize(g, {k}), static_cast<double>(k)});
    st.evaluated[k] = true;
  }
  st.posterior.emplace(scenex::fit(st.observations, st.kernel, 1));
  EXPECT_EQ(scenex::thompson_next(st), (IndexVector{4}));
  st.evaluated[4] = true;
  st.observations.push_back({{4}, {0.8}, 4.0});
  EXPECT_THROW(scenex::thompson_next(st), std::runtime_error);
}

TEST(Thompson, ConcentratedPosteriorPicksSmallestX)
{
  const ParameterGrid g({{"x", 0.0, 1.0, 101}});
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    scenex::BoOptions opts;
    opts.seed = seed;
    scenex::BoState st(g, opts);
    st.kernel.noise_variance = scenex::kNoiseFloor;
    for (std::size_t k = 0; k <= 100; k += 2) {
      const auto x = scenex::normalize(g, {k});
      st.observations.push_back({{k}, x, x[0]});
      st.evaluated[k] = true;
    }
    st.posterior.emplace(scenex::fit(st.observations, st.kernel, scenex::mix_seed(seed, 1)));
    hits += scenex::thompson_next(st) == IndexVector{1} ? 1 : 0;
  }
  EXPECT_GE(hits, 95);
}

TEST(ScoreGrid, MatchesDirectEvaluation)
{
  const ParameterGrid g({{"a", 0.0, 1.0, 4}, {"b", 0.0, 1.0, 3}, {"c", 0.0, 1.0, 5}});
  KernelConfig cfg;
  cfg.features = 40;
  const auto map = scenex::sample_feature_map(cfg, 3, 8);
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(40, -1.0, 1.0);
  const auto scores = scenex::score_grid(map, w, g);
  ASSERT_EQ(scores.size(), 60);
  for (std::uint64_t f = 0; f < g.cardinality(); ++f) {
    const auto x = scenex::normalize(g, g.unflat(f));
    EXPECT_NEAR(scores(static_cast<Eigen::Index>(f)), map(x).dot(w), 1e-10);
  }
}

TEST(InitialDesign, DistinctAndSeeded)
{
  const ParameterGrid g({{"a", 0.0, 1.0, 10}, {"b", 0.0, 1.0, 10}});
  const auto d1 = scenex::initial_design(g, 12, 4);
  EXPECT_EQ(d1, scenex::initial_design(g, 12, 4));
  std::set<std::uint64_t> flats;
  for (const auto & i : d1) flats.insert(g.flat(i));
  EXPECT_EQ(flats.size(), 12U);
  const ParameterGrid tiny({{"a", 0.0, 1.0, 3}});
  EXPECT_EQ(scenex::initial_design(tiny, 8, 1).size(), 3U);
}

TEST(Run, InitOnlyBudget)
{
  const ParameterGrid g({{"a", 0.0, 1.0, 20}, {"b", 0.0, 1.0, 20}});
  int calls = 0;
  scenex::BoOptions opts;
  opts.budget = 5;
  opts.init_count = 5;
  const auto hist = scenex::run(
    [&](const IndexVector &) {
      ++calls;
      return 1.0;
    },
    g, opts);
  EXPECT_EQ(hist.size(), 5U);
  EXPECT_EQ(calls, 5);
  opts.budget = 3;
  EXPECT_THROW(scenex::run([](const IndexVector &) { return 0.0; }, g, opts), std::invalid_argument);
}

TEST(Run, NeverRepeatsAndRecordsFailures)
{
  const ParameterGrid g({{"a", 0.0, 1.0, 7}, {"b", 0.0, 1.0, 5}});
  scenex::BoOptions opts;
  opts.budget = 100;  // more than the 35 cells
  opts.features = 200;
  opts.failure_value = 99.0;
  std::vector<std::size_t> ordinals;
  const auto hist = scenex::run(
    [&](const IndexVector & i) -> double {
      if (i[0] == 3) throw std::runtime_error("boom");
      if (i[0] == 4) return std::nan("");
      return static_cast<double>(i[0] + i[1]);
    },
    g, opts, [&](std::size_t n, const Observation &) { ordinals.push_back(n); });
  ASSERT_EQ(hist.size(), 35U);
  std::set<std::uint64_t> seen;
  for (std::size_t n = 0; n < hist.size(); ++n) {
    EXPECT_TRUE(seen.insert(g.flat(hist[n].index)).second);
    EXPECT_EQ(ordinals[n], n);
    if (hist[n].index[0] == 3 || hist[n].index[0] == 4) {
      EXPECT_EQ(hist[n].y, 99.0);
    }
  }
}

TEST(Run, BraninWithinBestOnePercent)
{
  const ParameterGrid g({{"x1", -5.0, 10.0, 50}, {"x2", 0.0, 15.0, 50}});
  std::vector<double> all;
  for (std::uint64_t f = 0; f < g.cardinality(); ++f) {
    all.push_back(branin_on(g, g.unflat(f)));
  }
  std::sort(all.begin(), all.end());
  const double threshold = all[g.cardinality() / 100 - 1];

  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    scenex::BoOptions opts;
    opts.budget = 100;
    opts.seed = seed;
    const auto hist = scenex::run([&](const IndexVector & i) { return branin_on(g, i); }, g, opts);
    double best = hist[0].y;
    for (const auto & o : hist) best = std::min(best, o.y);
    wins += best <= threshold ? 1 : 0;
  }
  EXPECT_GE(wins, 18);
}
