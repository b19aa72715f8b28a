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

#ifndef SCENEX__METRICS_HPP_
#define SCENEX__METRICS_HPP_

#include "scenex/geometry.hpp"
#include "scenex/simulator.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenex
{

// Criticality metrics between two actors of a trace. Smaller is more critical
// for every kind. Results that found no interaction are clamped to a cap and
// flagged, so they never rank above an uncapped value.

enum class MetricKind { euclidean, trajectory, wttc, gap_time, pet };

inline constexpr std::array<MetricKind, 5> kAllMetrics{
  MetricKind::euclidean, MetricKind::trajectory, MetricKind::wttc, MetricKind::gap_time,
  MetricKind::pet};

std::string_view to_string(MetricKind kind);
/// Throws ConfigError for an unknown name.
MetricKind parse_metric(std::string_view name);
bool is_time_metric(MetricKind kind);

struct MetricCaps
{
  double time{20.0};  // s
  double distance{200.0};  // m
  double speed_guard{0.1};  // m/s, gap-time division guard

  double for_kind(MetricKind kind) const { return is_time_metric(kind) ? time : distance; }
};

struct MetricResult
{
  MetricKind kind{MetricKind::euclidean};
  double value{0.0};
  std::optional<double> argmin_time;
  bool capped{false};
};

/// Minimum center distance over all samples.
MetricResult euclidean_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const MetricCaps & caps = {});

/// Summed remaining distance to the conflict-region entries while neither actor has left it.
MetricResult trajectory_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::optional<ConflictRegion> & region, const MetricCaps & caps = {});

/// Worst-time-to-collision: earliest touch of the two worst-case motion envelopes.
MetricResult wttc_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const MetricCaps & caps = {});

/// Positive root of 0.5*accel*tau^2 + speed*tau - gap = 0, nullopt when unreachable.
std::optional<double> wttc_at(double gap, double speed_sum, double accel_sum);

/// Predicted arrival-time difference at the conflict region while both approach it.
MetricResult gap_time_min(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::optional<ConflictRegion> & region, const MetricCaps & caps = {});

/// Post-encroachment time of the footprint-inflated region occupancies.
MetricResult pet(
  const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::optional<ConflictRegion> & region, const MetricCaps & caps = {});

/// Occupancy interval [first, last] sample time with s in [entry - r, exit + r].
std::optional<std::pair<double, double>> occupancy_interval(
  const ActorTrack & track, double dt, double entry, double exit);

/**
 * Dispatches to one metric. When the trace ended in a collision between a and
 * b, time metrics are forced to 0 and the euclidean value is the center
 * distance at the final sample.
 */
MetricResult evaluate(
  MetricKind kind, const SimulationTrace & trace, std::string_view a, std::string_view b,
  const std::vector<ConflictRegion> & regions, const MetricCaps & caps = {});

}  // namespace scenex

#endif  // SCENEX__METRICS_HPP_
