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

#ifndef SCENEX__SIMULATOR_HPP_
#define SCENEX__SIMULATOR_HPP_

#include "scenex/scenario.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scenex
{

/// Brake limit; IDM output below -kEmergencyDecel is truncated.
inline constexpr double kEmergencyDecel = 8.0;
/// Lateral half-width of the corridor in which the ego perceives objects.
inline constexpr double kCorridorHalfWidth = 1.75;

struct IdmParams
{
  double desired_speed{10.0};  // v0
  double time_headway{1.5};  // T
  double max_accel{1.5};  // a
  double comfort_decel{2.0};  // b
  double exponent{4.0};  // delta
  double min_gap{2.0};  // s0
  double max_lateral_accel{2.5};
  double lookahead{50.0};

  void validate() const;
};

/// Free-road IDM: a * (1 - (v/v0)^delta).
double idm_free_acceleration(double v, const IdmParams & p);

/**
 * IDM acceleration behind an object at `gap` approached with rate `dv`
 * (v - v_lead). Non-positive gaps return -kEmergencyDecel; the result never
 * drops below it.
 */
double idm_acceleration(double v, double gap, double dv, const IdmParams & p);

enum class ObjectKind { real_actor, curvature_limit };

/// Something the ego follows, expressed in its own path coordinate.
struct VirtualObject
{
  ObjectKind kind{ObjectKind::real_actor};
  std::string source;  // actor id, empty for curvature limits
  double gap{0.0};  // m along the ego path, >= 0
  double speed{0.0};  // object speed along the ego path
  double relative_speed{0.0};  // ego speed minus `speed`
};

/// Curvature limit sqrt(a_lat / kappa).
double curvature_speed_limit(double curvature, const IdmParams & p);

/**
 * Binding curvature limit in [s, s + lookahead] for an ego moving at v.
 *
 * Candidates are the local curvature peaks in the window. The one requiring the
 * hardest braking, (v^2 - v_lim^2) / (2 gap), binds; when none requires braking,
 * the smallest limit binds. Straight windows yield nullopt.
 */
std::optional<VirtualObject> curvature_virtual_object(
  const Path & route, double s, double v, const IdmParams & p);

struct ActorState
{
  double s{0.0};
  double v{0.0};
  bool started{false};
  bool finished{false};

  bool active() const { return started && !finished; }
};

struct WorldState
{
  double t{0.0};
  std::vector<ActorState> actors;  // parallel to ConcreteScenario::actors
};

WorldState initial_state(const ConcreteScenario & scenario);

/// Active actors inside the ego corridor and ahead of it, projected onto the ego path.
std::vector<VirtualObject> filter_objects(
  const ConcreteScenario & scenario, const WorldState & state, std::size_t ego_index);

/// Ego command: minimum IDM acceleration over free road, filtered objects and curvature limit.
double ego_acceleration(
  const ConcreteScenario & scenario, const WorldState & state, std::size_t ego_index,
  const IdmParams & p);

/// Advances every actor by dt (semi-implicit Euler: speed first, then position).
WorldState step(
  const ConcreteScenario & scenario, const WorldState & state, double dt, const IdmParams & p);

enum class Termination { horizon, all_arrived, collision };
std::string_view to_string(Termination t);

struct ActorTrack
{
  std::string id;
  ActorKind kind{ActorKind::vehicle};
  double footprint_radius{0.0};
  double max_accel{0.0};
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> s;
  std::vector<double> v;
  std::optional<double> arrival_time;  // interpolated route-end crossing
};

struct SimulationTrace
{
  double dt{0.05};
  std::vector<ActorTrack> actors;
  Termination termination{Termination::horizon};
  std::optional<std::pair<std::string, std::string>> collision;

  std::size_t samples() const { return actors.empty() ? 0 : actors.front().s.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
  const ActorTrack & actor(std::string_view id) const;
  bool has_actor(std::string_view id) const;
  bool collided(std::string_view a, std::string_view b) const;
};

struct SimConfig
{
  double dt{0.05};
  double horizon{60.0};
  IdmParams idm;
};

/**
 * Runs the closed loop until the horizon, until every actor reached its route
 * end, or until the ego's footprint touches another actor's. The IDM desired
 * speed is taken from the ego's target_speed. Pure function of its inputs.
 */
SimulationTrace simulate(const ConcreteScenario & scenario, const SimConfig & cfg);

/// `t,actor,x,y,s,v` rows, 6 decimals.
void write_trace_csv(std::ostream & out, const SimulationTrace & trace);
/// Inverse of write_trace_csv; per-actor radius and max_accel come from `scenario`.
SimulationTrace read_trace_csv(std::istream & in, const ConcreteScenario & scenario);

}  // namespace scenex

#endif  // SCENEX__SIMULATOR_HPP_
