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

#include "scenex/simulator.hpp"

#include "scenex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace scenex
{

namespace
{
constexpr double kTimeEps = 1e-9;
}

void IdmParams::validate() const
{
  if (!(desired_speed > 0.0 && time_headway > 0.0 && max_accel > 0.0 && comfort_decel > 0.0 &&
        min_gap > 0.0 && max_lateral_accel > 0.0 && lookahead > 0.0)) {
    throw ConfigError("IDM parameters must be strictly positive");
  }
  if (!(exponent >= 1.0)) {
    throw ConfigError("IDM exponent must be >= 1");
  }
}

double idm_free_acceleration(double v, const IdmParams & p)
{
  const double a = p.max_accel * (1.0 - std::pow(v / p.desired_speed, p.exponent));
  return std::max(a, -kEmergencyDecel);
}

double idm_acceleration(double v, double gap, double dv, const IdmParams & p)
{
  if (!(gap > 0.0)) {
    return -kEmergencyDecel;
  }
  const double dynamic =
    v * p.time_headway + v * dv / (2.0 * std::sqrt(p.max_accel * p.comfort_decel));
  const double desired_gap = p.min_gap + std::max(0.0, dynamic);
  const double ratio = desired_gap / gap;
  const double a =
    p.max_accel * (1.0 - std::pow(v / p.desired_speed, p.exponent) - ratio * ratio);
  return std::max(a, -kEmergencyDecel);
}

double curvature_speed_limit(double curvature, const IdmParams & p)
{
  if (!(curvature > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return std::sqrt(p.max_lateral_accel / curvature);
}

std::optional<VirtualObject> curvature_virtual_object(
  const Path & route, double s, double v, const IdmParams & p)
{
  const auto & arc = route.arc_lengths();
  const auto & kappa = route.vertex_curvatures();
  const double end = s + p.lookahead;

  std::optional<VirtualObject> best;
  double best_required = -1.0;
  auto first = std::lower_bound(arc.begin(), arc.end(), s);
  for (auto i = static_cast<std::size_t>(first - arc.begin()); i < arc.size() && arc[i] <= end;
       ++i) {
    if (!(kappa[i] > 0.0)) {
      continue;
    }
    const double limit = curvature_speed_limit(kappa[i], p);
    const double gap = arc[i] - s;
    double required = 0.0;
    if (v > limit) {
      required = gap > 0.0 ? (v * v - limit * limit) / (2.0 * gap)
                           : std::numeric_limits<double>::infinity();
    }
    // hardest braking first, then the slowest limit, then the nearest point
    const bool better = !best || required > best_required ||
                        (required == best_required && limit < best->speed);
    if (better) {
      best_required = required;
      best = VirtualObject{ObjectKind::curvature_limit, {}, gap, limit, v - limit};
    }
  }
  return best;
}

WorldState initial_state(const ConcreteScenario & scenario)
{
  WorldState w;
  w.t = 0.0;
  w.actors.reserve(scenario.actors.size());
  for (const auto & a : scenario.actors) {
    ActorState st;
    st.s = a.start_s;
    st.started = a.start_delay <= kTimeEps;
    st.v = st.started ? a.initial_speed : 0.0;
    w.actors.push_back(st);
  }
  return w;
}

std::vector<VirtualObject> filter_objects(
  const ConcreteScenario & scenario, const WorldState & state, std::size_t ego_index)
{
  std::vector<VirtualObject> out;
  const ActorState & ego = state.actors[ego_index];
  if (!ego.active()) {
    return out;
  }
  const ActorSpec & ego_spec = scenario.actors[ego_index];
  const Path & ego_route = *ego_spec.route;

  for (std::size_t i = 0; i < scenario.actors.size(); ++i) {
    if (i == ego_index || !state.actors[i].active()) {
      continue;
    }
    const ActorSpec & spec = scenario.actors[i];
    const PathState where = spec.route->state_at_clamped(state.actors[i].s);
    const Projection proj = ego_route.project(where.point);
    if (proj.lateral - spec.footprint_radius > kCorridorHalfWidth || !(proj.s > ego.s)) {
      continue;
    }
    const Vec2 velocity{
      state.actors[i].v * std::cos(where.heading), state.actors[i].v * std::sin(where.heading)};
    VirtualObject obj;
    obj.kind = ObjectKind::real_actor;
    obj.source = spec.id;
    obj.gap = std::max(0.0, proj.s - ego.s - ego_spec.footprint_radius - spec.footprint_radius);
    obj.speed = dot(velocity, proj.tangent);
    obj.relative_speed = ego.v - obj.speed;
    out.push_back(std::move(obj));
  }
  return out;
}

double ego_acceleration(
  const ConcreteScenario & scenario, const WorldState & state, std::size_t ego_index,
  const IdmParams & p)
{
  const ActorState & ego = state.actors[ego_index];
  double accel = idm_free_acceleration(ego.v, p);
  for (const auto & obj : filter_objects(scenario, state, ego_index)) {
    accel = std::min(accel, idm_acceleration(ego.v, obj.gap, obj.relative_speed, p));
  }
  const auto curve =
    curvature_virtual_object(*scenario.actors[ego_index].route, ego.s, ego.v, p);
  if (curve) {
    // Offset by the equilibrium spacing so the ego reaches the limit speed at the
    // curvature point instead of stopping in front of it.
    const double gap = curve->gap + p.min_gap + curve->speed * p.time_headway;
    accel = std::min(accel, idm_acceleration(ego.v, gap, curve->relative_speed, p));
  }
  return accel;
}

namespace
{

std::size_t ego_index_of(const ConcreteScenario & scenario)
{
  for (std::size_t i = 0; i < scenario.actors.size(); ++i) {
    if (scenario.actors[i].behavior == Behavior::idm_controlled) {
      return i;
    }
  }
  throw ConfigError("scenario has no idm-controlled ego");
}

WorldState step_impl(
  const ConcreteScenario & scenario, const WorldState & state, double dt, const IdmParams & p,
  std::size_t ego_index, std::vector<std::optional<double>> * arrivals)
{
  WorldState next = state;
  next.t = state.t + dt;
  for (std::size_t i = 0; i < scenario.actors.size(); ++i) {
    const ActorSpec & spec = scenario.actors[i];
    ActorState & st = next.actors[i];
    if (st.finished) {
      st.v = 0.0;
      continue;
    }
    if (!st.started) {
      if (state.t + kTimeEps < spec.start_delay) {
        continue;
      }
      st.started = true;
      st.v = spec.initial_speed;
    }

    double v_new = 0.0;
    if (i == ego_index) {
      const double a = ego_acceleration(scenario, state, ego_index, p);
      v_new = std::max(0.0, st.v + a * dt);
    } else {
      v_new = std::min(spec.target_speed, st.v + spec.ramp_accel * dt);
    }

    const double length = spec.route->length();
    const double s_new = st.s + v_new * dt;
    if (s_new >= length) {
      if (arrivals != nullptr && v_new > 0.0) {
        (*arrivals)[i] = state.t + (length - st.s) / v_new;
      }
      st.v = (length - st.s) / dt;
      st.s = length;
      st.finished = true;
    } else {
      st.v = v_new;
      st.s = s_new;
    }
  }
  return next;
}

std::optional<std::size_t> ego_collision(
  const ConcreteScenario & scenario, const WorldState & state, std::size_t ego_index)
{
  if (state.actors[ego_index].finished) {
    return std::nullopt;
  }
  const ActorSpec & ego = scenario.actors[ego_index];
  const Vec2 pe = ego.route->point_at(state.actors[ego_index].s);
  for (std::size_t i = 0; i < scenario.actors.size(); ++i) {
    if (i == ego_index || state.actors[i].finished) {
      continue;
    }
    const ActorSpec & other = scenario.actors[i];
    const Vec2 po = other.route->point_at(state.actors[i].s);
    if (distance(pe, po) < ego.footprint_radius + other.footprint_radius) {
      return i;
    }
  }
  return std::nullopt;
}

void record(SimulationTrace & trace, const ConcreteScenario & scenario, const WorldState & w)
{
  for (std::size_t i = 0; i < scenario.actors.size(); ++i) {
    const Vec2 p = scenario.actors[i].route->point_at(w.actors[i].s);
    ActorTrack & track = trace.actors[i];
    track.x.push_back(p.x);
    track.y.push_back(p.y);
    track.s.push_back(w.actors[i].s);
    track.v.push_back(w.actors[i].v);
  }
}

}  // namespace

WorldState step(
  const ConcreteScenario & scenario, const WorldState & state, double dt, const IdmParams & p)
{
  return step_impl(scenario, state, dt, p, ego_index_of(scenario), nullptr);
}

std::string_view to_string(Termination t)
{
  switch (t) {
    case Termination::horizon:
      return "horizon";
    case Termination::all_arrived:
      return "all_arrived";
    case Termination::collision:
      return "collision";
  }
  return "unknown";
}

const ActorTrack & SimulationTrace::actor(std::string_view id) const
{
  for (const auto & a : actors) {
    if (a.id == id) {
      return a;
    }
  }
  throw std::out_of_range("actor '" + std::string(id) + "' not in trace");
}

bool SimulationTrace::has_actor(std::string_view id) const
{
  return std::any_of(actors.begin(), actors.end(), [&](const auto & a) { return a.id == id; });
}

bool SimulationTrace::collided(std::string_view a, std::string_view b) const
{
  if (!collision) {
    return false;
  }
  return (collision->first == a && collision->second == b) ||
         (collision->first == b && collision->second == a);
}

SimulationTrace simulate(const ConcreteScenario & scenario, const SimConfig & cfg)
{
  if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0)) {
    throw ConfigError("dt and horizon must be positive");
  }
  const std::size_t ego_index = ego_index_of(scenario);
  IdmParams idm = cfg.idm;
  idm.desired_speed = scenario.actors[ego_index].target_speed;
  idm.validate();

  SimulationTrace trace;
  trace.dt = cfg.dt;
  for (const auto & a : scenario.actors) {
    ActorTrack track;
    track.id = a.id;
    track.kind = a.kind;
    track.footprint_radius = a.footprint_radius;
    track.max_accel = a.max_accel;
    trace.actors.push_back(std::move(track));
  }

  const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  std::vector<std::optional<double>> arrivals(scenario.actors.size());

  WorldState w = initial_state(scenario);
  record(trace, scenario, w);
  auto hit = ego_collision(scenario, w, ego_index);
  for (std::size_t k = 0; k < steps && !hit; ++k) {
    w = step_impl(scenario, w, cfg.dt, idm, ego_index, &arrivals);
    w.t = static_cast<double>(k + 1) * cfg.dt;
    record(trace, scenario, w);
    hit = ego_collision(scenario, w, ego_index);
    if (!hit && std::all_of(w.actors.begin(), w.actors.end(), [](const auto & a) {
          return a.finished;
        })) {
      trace.termination = Termination::all_arrived;
      break;
    }
  }
  if (hit) {
    trace.termination = Termination::collision;
    trace.collision = {scenario.actors[ego_index].id, scenario.actors[*hit].id};
  }
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    trace.actors[i].arrival_time = arrivals[i];
  }
  return trace;
}

void write_trace_csv(std::ostream & out, const SimulationTrace & trace)
{
  out << "t,actor,x,y,s,v\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t k = 0; k < trace.samples(); ++k) {
    const double t = trace.time(k);
    for (const auto & a : trace.actors) {
      out << t << ',' << a.id << ',' << a.x[k] << ',' << a.y[k] << ',' << a.s[k] << ',' << a.v[k]
          << '\n';
    }
  }
}

SimulationTrace read_trace_csv(std::istream & in, const ConcreteScenario & scenario)
{
  SimulationTrace trace;
  std::string line;
  if (!std::getline(in, line) || line != "t,actor,x,y,s,v") {
    throw ConfigError("trace CSV: unexpected header");
  }
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> cols;
    while (std::getline(row, field, ',')) {
      cols.push_back(field);
    }
    if (cols.size() != 6) {
      throw ConfigError("trace CSV: malformed row '" + line + "'");
    }
    const double t = std::stod(cols[0]);
    if (times.empty() || t != times.back()) {
      times.push_back(t);
    }
    auto it = std::find_if(trace.actors.begin(), trace.actors.end(), [&](const auto & a) {
      return a.id == cols[1];
    });
    if (it == trace.actors.end()) {
      const ActorSpec & spec = scenario.actor(cols[1]);
      ActorTrack track;
      track.id = spec.id;
      track.kind = spec.kind;
      track.footprint_radius = spec.footprint_radius;
      track.max_accel = spec.max_accel;
      trace.actors.push_back(std::move(track));
      it = std::prev(trace.actors.end());
    }
    it->x.push_back(std::stod(cols[2]));
    it->y.push_back(std::stod(cols[3]));
    it->s.push_back(std::stod(cols[4]));
    it->v.push_back(std::stod(cols[5]));
  }
  trace.dt = times.size() >= 2 ? times[1] - times[0] : 0.05;
  return trace;
}

}  // namespace scenex
