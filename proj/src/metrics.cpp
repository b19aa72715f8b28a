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

#include "scenex/metrics.hpp"

#include "scenex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenex
{

std::string_view to_string(MetricKind kind)
{
  switch (kind) {
    case MetricKind::euclidean:
      return "euclidean";
    case MetricKind::trajectory:
      return "trajectory";
    case MetricKind::wttc:
      return "wttc";
    case MetricKind::gap_time:
      return "gap_time";
    case MetricKind::pet:
      return "pet";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name)
{
  for (auto k : kAllMetrics) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

bool is_time_metric(MetricKind kind)
{
  return kind == MetricKind::wttc || kind == MetricKind::gap_time || kind == MetricKind::pet;
}

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running minimum that clamps to the cap on completion.
class MinTracker
{
public:
  MinTracker(MetricKind kind, double cap) : kind_(kind), cap_(cap) {}

  void offer(double value, double t)
  {
    if (value < best_) {
      best_ = value;
      argmin_ = t;
    }
  }

  MetricResult result() const
  {
    MetricResult r;
    r.kind = kind_;
    if (!(best_ < cap_)) {
      r.value = cap_;
      r.capped = true;
      r.argmin_time = std::isfinite(best_) ? argmin_ : std::nullopt;
    } else {
      r.value = best_;
      r.argmin_time = argmin_;
    }
    return r;
  }

private:
  MetricKind kind_;
  double cap_;
  double best_{kInf};
  std::optional<double> argmin_;
};

MetricResult capped_result(MetricKind kind, double cap)
{
  return MetricResult{kind, cap, std::nullopt, true};
}

std::size_t common_samples(const ActorTrack & a, const ActorTrack & b)
{
  return std::min(a.s.size(), b.s.size());
}

double center_distance(const ActorTrack & a, const ActorTrack & b, std::size_t k)
{
  return std::hypot(a.x[k] - b.x[k], a.y[k] - b.y[k]);
}

}  // namespace

MetricResult euclidean_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b, const MetricCaps & caps)
{
  const ActorTrack & ta = trace.actor(a);
  const ActorTrack & tb = trace.actor(b);
  MinTracker best(MetricKind::euclidean, caps.distance);
  for (std::size_t k = 0; k < common_samples(ta, tb); ++k) {
    best.offer(center_distance(ta, tb, k), trace.time(k));
  }
  return best.result();
}

MetricResult trajectory_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::optional<ConflictRegion> & region, const MetricCaps & caps)
{
  if (!region) {
    return capped_result(MetricKind::trajectory, caps.distance);
  }
  const ActorTrack & ta = trace.actor(a);
  const ActorTrack & tb = trace.actor(b);
  const double entry_a = region->entry_for(ta.id);
  const double exit_a = region->exit_for(ta.id);
  const double entry_b = region->entry_for(tb.id);
  const double exit_b = region->exit_for(tb.id);

  MinTracker best(MetricKind::trajectory, caps.distance);
  for (std::size_t k = 0; k < common_samples(ta, tb); ++k) {
    if (ta.s[k] > exit_a || tb.s[k] > exit_b) {
      continue;
    }
    const double d = std::max(0.0, entry_a - ta.s[k]) + std::max(0.0, entry_b - tb.s[k]);
    best.offer(d, trace.time(k));
  }
  return best.result();
}

std::optional<double> wttc_at(double gap, double speed_sum, double accel_sum)
{
  if (gap <= 0.0) {
    return 0.0;
  }
  if (accel_sum > 0.0) {
    // 2g / (V + sqrt(V^2 + 2Ag)) is the positive root without cancellation
    return 2.0 * gap / (speed_sum + std::sqrt(speed_sum * speed_sum + 2.0 * accel_sum * gap));
  }
  if (speed_sum > 0.0) {
    return gap / speed_sum;
  }
  return std::nullopt;
}

MetricResult wttc_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b, const MetricCaps & caps)
{
  const ActorTrack & ta = trace.actor(a);
  const ActorTrack & tb = trace.actor(b);
  const double radii = ta.footprint_radius + tb.footprint_radius;
  const double accel = ta.max_accel + tb.max_accel;
  MinTracker best(MetricKind::wttc, caps.time);
  for (std::size_t k = 0; k < common_samples(ta, tb); ++k) {
    const double gap = center_distance(ta, tb, k) - radii;
    if (const auto tau = wttc_at(gap, ta.v[k] + tb.v[k], accel)) {
      best.offer(*tau, trace.time(k));
    }
  }
  return best.result();
}

MetricResult gap_time_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::optional<ConflictRegion> & region, const MetricCaps & caps)
{
  if (!region) {
    return capped_result(MetricKind::gap_time, caps.time);
  }
  const ActorTrack & ta = trace.actor(a);
  const ActorTrack & tb = trace.actor(b);
  const double entry_a = region->entry_for(ta.id);
  const double entry_b = region->entry_for(tb.id);

  MinTracker best(MetricKind::gap_time, caps.time);
  for (std::size_t k = 0; k < common_samples(ta, tb); ++k) {
    const double da = entry_a - ta.s[k];
    const double db = entry_b - tb.s[k];
    if (!(da > 0.0 && db > 0.0 && ta.v[k] > caps.speed_guard && tb.v[k] > caps.speed_guard)) {
      continue;
    }
    best.offer(std::abs(da / ta.v[k] - db / tb.v[k]), trace.time(k));
  }
  return best.result();
}

std::optional<std::pair<double, double>> occupancy_interval(
  const ActorTrack & track, double dt, double entry, double exit)
{
  const double lo = entry - track.footprint_radius;
  const double hi = exit + track.footprint_radius;
  std::optional<std::pair<double, double>> out;
  for (std::size_t k = 0; k < track.s.size(); ++k) {
    if (track.s[k] >= lo && track.s[k] <= hi) {
      const double t = static_cast<double>(k) * dt;
      if (!out) {
        out = std::pair{t, t};
      }
      out->second = t;
    }
  }
  return out;
}

MetricResult pet(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::optional<ConflictRegion> & region, const MetricCaps & caps)
{
  if (!region) {
    return capped_result(MetricKind::pet, caps.time);
  }
  const ActorTrack & ta = trace.actor(a);
  const ActorTrack & tb = trace.actor(b);
  const auto occ_a =
    occupancy_interval(ta, trace.dt, region->entry_for(ta.id), region->exit_for(ta.id));
  const auto occ_b =
    occupancy_interval(tb, trace.dt, region->entry_for(tb.id), region->exit_for(tb.id));
  if (!occ_a || !occ_b) {
    return capped_result(MetricKind::pet, caps.time);
  }
  MinTracker best(MetricKind::pet, caps.time);
  if (occ_a->first <= occ_b->second && occ_b->first <= occ_a->second) {
    best.offer(0.0, std::max(occ_a->first, occ_b->first));
  } else {
    const auto & earlier = occ_a->first < occ_b->first ? *occ_a : *occ_b;
    const auto & later = occ_a->first < occ_b->first ? *occ_b : *occ_a;
    best.offer(later.first - earlier.second, later.first);
  }
  return best.result();
}

MetricResult evaluate(
  MetricKind kind, const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::vector<ConflictRegion> & regions, const MetricCaps & caps)
{
  if (!trace.has_actor(a) || !trace.has_actor(b)) {
    throw std::out_of_range("metric pair not present in trace");
  }
  if (trace.collided(a, b) && kind != MetricKind::trajectory) {
    const std::size_t last = trace.samples() - 1;
    MetricResult r;
    r.kind = kind;
    r.argmin_time = trace.time(last);
    r.value = kind == MetricKind::euclidean
                ? center_distance(trace.actor(a), trace.actor(b), last)
                : 0.0;
    return r;
  }
  const auto region = find_region(regions, a, b);
  switch (kind) {
    case MetricKind::euclidean:
      return euclidean_min(trace, a, b, caps);
    case MetricKind::trajectory:
      return trajectory_min(trace, a, b, region, caps);
    case MetricKind::wttc:
      return wttc_min(trace, a, b, caps);
    case MetricKind::gap_time:
      return gap_time_min(trace, a, b, region, caps);
    case MetricKind::pet:
      return pet(trace, a, b, region, caps);
  }
  throw std::logic_error("unhandled metric kind");
}

}  // namespace scenex
