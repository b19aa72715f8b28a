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

#include "scenex/scenario.hpp"

#include "scenex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace scenex
{

// Generated from data/scenarios/*.json at configure time.
std::string_view bundled_scenario_text(std::string_view id);
std::vector<std::string> bundled_scenario_ids();

void ParameterDim::validate() const
{
  if (samples == 0) {
    throw ConfigError("dim '" + name + "': samples must be >= 1");
  }
  if (!std::isfinite(min) || !std::isfinite(max)) {
    throw ConfigError("dim '" + name + "': bounds must be finite");
  }
  if (samples >= 2 && !(max > min)) {
    throw ConfigError("dim '" + name + "': max must exceed min when samples >= 2");
  }
}

double ParameterDim::value(std::size_t k) const
{
  if (k >= samples) {
    throw std::out_of_range(
      "index " + std::to_string(k) + " out of range for dim '" + name + "' with " +
      std::to_string(samples) + " samples");
  }
  if (k == 0) {
    return min;
  }
  if (k == samples - 1) {
    return max;
  }
  return min + static_cast<double>(k) * (max - min) / static_cast<double>(samples - 1);
}

std::size_t ParameterDim::nearest(double v) const
{
  if (samples == 1) {
    return 0;
  }
  const double k = std::round((v - min) / step());
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(samples - 1)));
}

std::optional<std::size_t> ParameterDim::lattice_index(double v, double tol) const
{
  const std::size_t k = nearest(v);
  const double scale = std::max({1.0, std::abs(min), std::abs(max)});
  if (std::abs(value(k) - v) <= tol * scale) {
    return k;
  }
  return std::nullopt;
}

ParameterGrid::ParameterGrid(std::vector<ParameterDim> dims) : dims_(std::move(dims))
{
  cardinality_ = dims_.empty() ? 0 : 1;
  for (const auto & d : dims_) {
    d.validate();
    cardinality_ *= d.samples;
  }
}

std::optional<std::size_t> ParameterGrid::dim_index(std::string_view name) const
{
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name == name) {
      return i;
    }
  }
  return std::nullopt;
}

void ParameterGrid::check_index(const IndexVector & index) const
{
  if (index.size() != dims_.size()) {
    throw std::out_of_range(
      "index vector has " + std::to_string(index.size()) + " entries, grid has " +
      std::to_string(dims_.size()) + " dims");
  }
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= dims_[i].samples) {
      throw std::out_of_range(
        "index " + std::to_string(index[i]) + " out of range for dim '" + dims_[i].name + "'");
    }
  }
}

std::uint64_t ParameterGrid::flat(const IndexVector & index) const
{
  check_index(index);
  std::uint64_t f = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    f = f * dims_[i].samples + index[i];
  }
  return f;
}

IndexVector ParameterGrid::unflat(std::uint64_t flat) const
{
  if (flat >= cardinality_) {
    throw std::out_of_range("flat index " + std::to_string(flat) + " out of range");
  }
  IndexVector index(dims_.size());
  for (std::size_t i = dims_.size(); i-- > 0;) {
    index[i] = static_cast<std::size_t>(flat % dims_[i].samples);
    flat /= dims_[i].samples;
  }
  return index;
}

std::vector<double> ParameterGrid::values(const IndexVector & index) const
{
  check_index(index);
  std::vector<double> v(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    v[i] = dims_[i].value(index[i]);
  }
  return v;
}

IndexVector ParameterGrid::quantize(std::span<const double> values) const
{
  if (values.size() != dims_.size()) {
    throw std::out_of_range("value vector size does not match grid");
  }
  IndexVector index(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    index[i] = dims_[i].nearest(values[i]);
  }
  return index;
}

ParameterGrid build_parameter_grid(std::vector<ParameterDim> dims)
{
  if (dims.empty()) {
    throw ConfigError("parameter grid needs at least one dim");
  }
  return ParameterGrid(std::move(dims));
}

std::vector<double> grid_values(const ParameterGrid & grid, const IndexVector & index)
{
  return grid.values(index);
}

std::string_view to_string(ActorKind kind)
{
  switch (kind) {
    case ActorKind::ego:
      return "ego";
    case ActorKind::pedestrian:
      return "pedestrian";
    case ActorKind::vehicle:
      return "vehicle";
    case ActorKind::truck:
      return "truck";
  }
  return "unknown";
}

std::string_view to_string(Behavior behavior)
{
  return behavior == Behavior::idm_controlled ? "idm_controlled" : "scripted";
}

void ActorSpec::validate() const
{
  if (!route) {
    throw ConfigError("actor '" + id + "' has no route");
  }
  if (!(start_s >= 0.0 && start_s < route->length())) {
    throw ConfigError(
      "actor '" + id + "': start_s " + std::to_string(start_s) + " outside [0, route length)");
  }
  if (!(start_delay >= 0.0)) {
    throw ConfigError("actor '" + id + "': start_delay must be >= 0");
  }
  if (!(target_speed > 0.0)) {
    throw ConfigError("actor '" + id + "': target_speed must be > 0");
  }
  if (!(initial_speed >= 0.0)) {
    throw ConfigError("actor '" + id + "': initial_speed must be >= 0");
  }
  if (!(footprint_radius > 0.0)) {
    throw ConfigError("actor '" + id + "': footprint_radius must be > 0");
  }
  if (!(max_accel >= 0.0) || !(ramp_accel > 0.0)) {
    throw ConfigError("actor '" + id + "': accelerations must be positive");
  }
}

namespace
{

const ActorSpec & find_actor(const std::vector<ActorSpec> & actors, std::string_view id)
{
  for (const auto & a : actors) {
    if (a.id == id) {
      return a;
    }
  }
  throw ConfigError("unknown actor '" + std::string(id) + "'");
}

double & field_ref(ActorSpec & a, BoundField f)
{
  switch (f) {
    case BoundField::start_s:
      return a.start_s;
    case BoundField::start_delay:
      return a.start_delay;
    case BoundField::target_speed:
      return a.target_speed;
    case BoundField::initial_speed:
      return a.initial_speed;
  }
  return a.start_s;
}

BoundField parse_field(const std::string & s)
{
  if (s == "start_s") return BoundField::start_s;
  if (s == "start_delay") return BoundField::start_delay;
  if (s == "target_speed") return BoundField::target_speed;
  if (s == "initial_speed") return BoundField::initial_speed;
  throw ConfigError("unknown bound field '" + s + "'");
}

ActorKind parse_kind(const std::string & s)
{
  if (s == "ego") return ActorKind::ego;
  if (s == "pedestrian") return ActorKind::pedestrian;
  if (s == "vehicle") return ActorKind::vehicle;
  if (s == "truck") return ActorKind::truck;
  throw ConfigError("unknown actor kind '" + s + "'");
}

Vec2 parse_point(const nlohmann::json & j)
{
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("point must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::shared_ptr<const Path> parse_route(const nlohmann::json & j)
{
  std::vector<Vec2> pts;
  if (j.contains("points")) {
    for (const auto & p : j.at("points")) {
      pts.push_back(parse_point(p));
    }
  } else if (j.contains("segments")) {
    std::vector<std::vector<Vec2>> pieces;
    for (const auto & seg : j.at("segments")) {
      const auto type = seg.at("type").get<std::string>();
      const double spacing = seg.value("spacing", 0.5);
      if (!(spacing > 0.0)) {
        throw ConfigError("segment spacing must be > 0");
      }
      if (type == "line") {
        pieces.push_back(sample_line(parse_point(seg.at("from")), parse_point(seg.at("to")), spacing));
      } else if (type == "arc") {
        constexpr double deg = std::numbers::pi / 180.0;
        pieces.push_back(sample_arc(
          parse_point(seg.at("center")), seg.at("radius").get<double>(),
          seg.at("start_deg").get<double>() * deg, seg.at("sweep_deg").get<double>() * deg,
          spacing));
      } else {
        throw ConfigError("unknown route segment type '" + type + "'");
      }
    }
    pts = join_pieces(pieces);
  } else {
    throw ConfigError("route needs 'points' or 'segments'");
  }
  try {
    return std::make_shared<const Path>(std::move(pts));
  } catch (const std::invalid_argument & e) {
    throw ConfigError(std::string("invalid route: ") + e.what());
  }
}

ActorSpec parse_actor(const nlohmann::json & j)
{
  ActorSpec a;
  a.id = j.at("id").get<std::string>();
  a.kind = parse_kind(j.at("kind").get<std::string>());
  const auto behavior = j.value("behavior", a.kind == ActorKind::ego ? "idm_controlled" : "scripted");
  if (behavior == "idm_controlled") {
    a.behavior = Behavior::idm_controlled;
  } else if (behavior == "scripted") {
    a.behavior = Behavior::scripted;
  } else {
    throw ConfigError("unknown behavior '" + behavior + "'");
  }
  a.route = parse_route(j.at("route"));
  a.start_s = j.value("start_s", 0.0);
  a.start_delay = j.value("start_delay", 0.0);
  a.target_speed = j.at("target_speed").get<double>();
  a.initial_speed = j.value("initial_speed", 0.0);
  a.footprint_radius = j.at("footprint_radius").get<double>();
  a.max_accel = j.value("max_accel", 0.0);
  a.ramp_accel = j.value("ramp_accel", 2.0);
  return a;
}

std::string read_file(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open " + file.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_json_text(std::string_view text, const std::string & what)
{
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    throw ConfigError("malformed scenario document " + what + ": " + e.what());
  }
}

}  // namespace

const ActorSpec & LogicalScenario::actor(std::string_view actor_id) const
{
  return find_actor(actors, actor_id);
}

const ActorSpec & LogicalScenario::ego() const
{
  for (const auto & a : actors) {
    if (a.behavior == Behavior::idm_controlled) {
      return a;
    }
  }
  throw ConfigError("scenario '" + id + "' has no idm-controlled ego");
}

void LogicalScenario::validate() const
{
  std::size_t egos = 0;
  for (std::size_t i = 0; i < actors.size(); ++i) {
    actors[i].validate();
    egos += actors[i].behavior == Behavior::idm_controlled ? 1 : 0;
    for (std::size_t j = 0; j < i; ++j) {
      if (actors[i].id == actors[j].id) {
        throw ConfigError("duplicate actor id '" + actors[i].id + "'");
      }
    }
  }
  if (egos != 1) {
    throw ConfigError("scenario '" + id + "' needs exactly one idm-controlled actor");
  }
  if (bindings.size() != grid.size()) {
    throw ConfigError("scenario '" + id + "': every grid dim needs exactly one binding");
  }
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    if (bindings[i].param != grid.dims()[i].name) {
      throw ConfigError(
        "scenario '" + id + "': binding " + std::to_string(i) + " is for '" + bindings[i].param +
        "', expected '" + grid.dims()[i].name + "'");
    }
    find_actor(actors, bindings[i].actor);
  }
  // every lattice extreme must produce a valid actor
  const auto & dims = grid.dims();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    for (double v : {dims[i].min, dims[i].max}) {
      ActorSpec a = find_actor(actors, bindings[i].actor);
      field_ref(a, bindings[i].field) = bindings[i].offset + bindings[i].scale * v;
      a.validate();
    }
  }
}

const ActorSpec & ConcreteScenario::actor(std::string_view actor_id) const
{
  return find_actor(actors, actor_id);
}

ConcreteScenario instantiate_values(const LogicalScenario & logical, std::span<const double> values)
{
  if (values.size() != logical.grid.size()) {
    throw std::out_of_range("value vector size does not match scenario grid");
  }
  ConcreteScenario c;
  c.logical_id = logical.id;
  c.actors = logical.actors;
  c.values.assign(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto & b = logical.bindings[i];
    for (auto & a : c.actors) {
      if (a.id == b.actor) {
        field_ref(a, b.field) = b.offset + b.scale * values[i];
      }
    }
  }
  for (const auto & a : c.actors) {
    a.validate();
  }
  return c;
}

ConcreteScenario instantiate(const LogicalScenario & logical, const IndexVector & index)
{
  const auto values = grid_values(logical.grid, index);
  ConcreteScenario c = instantiate_values(logical, values);
  c.index = index;
  return c;
}

LogicalScenario parse_scenario_document(const nlohmann::json & doc)
{
  try {
    if (doc.value("schema_version", 0) != 1) {
      throw ConfigError("unsupported scenario schema_version");
    }
    LogicalScenario s;
    if (doc.contains("extends")) {
      s = load_scenario_library(doc.at("extends").get<std::string>());
    }
    s.id = doc.at("id").get<std::string>();
    s.description = doc.value("description", s.description);
    if (doc.contains("actors")) {
      s.actors.clear();
      for (const auto & a : doc.at("actors")) {
        s.actors.push_back(parse_actor(a));
      }
    }
    if (doc.contains("dims")) {
      std::vector<ParameterDim> dims;
      for (const auto & d : doc.at("dims")) {
        dims.push_back(
          {d.at("name").get<std::string>(), d.at("min").get<double>(), d.at("max").get<double>(),
           d.at("samples").get<std::size_t>()});
      }
      s.grid = build_parameter_grid(std::move(dims));
    }
    if (doc.contains("bindings")) {
      s.bindings.clear();
      for (const auto & b : doc.at("bindings")) {
        s.bindings.push_back(
          {b.at("param").get<std::string>(), b.at("actor").get<std::string>(),
           parse_field(b.at("field").get<std::string>()), b.value("scale", 1.0),
           b.value("offset", 0.0)});
      }
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("malformed scenario document: ") + e.what());
  }
}

std::vector<std::string> scenario_library_ids() { return bundled_scenario_ids(); }

LogicalScenario load_scenario_library(std::string_view id)
{
  const auto text = bundled_scenario_text(id);
  if (text.empty()) {
    throw ConfigError("unknown scenario id '" + std::string(id) + "'");
  }
  return parse_scenario_document(parse_json_text(text, std::string(id)));
}

LogicalScenario load_scenario_file(const std::filesystem::path & file)
{
  return parse_scenario_document(parse_json_text(read_file(file), file.string()));
}

std::vector<ConflictRegion> conflict_regions(const std::vector<ActorSpec> & actors)
{
  std::vector<ConflictRegion> out;
  for (std::size_t i = 0; i < actors.size(); ++i) {
    for (std::size_t j = i + 1; j < actors.size(); ++j) {
      auto r = conflict_region(
        *actors[i].route, *actors[j].route, 2.0 * actors[i].footprint_radius,
        2.0 * actors[j].footprint_radius);
      if (r) {
        r->actor_a = actors[i].id;
        r->actor_b = actors[j].id;
        out.push_back(std::move(*r));
      }
    }
  }
  return out;
}

std::optional<ConflictRegion> find_region(
  const std::vector<ConflictRegion> & regions, std::string_view a, std::string_view b)
{
  for (const auto & r : regions) {
    if (r.involves(std::string(a), std::string(b))) {
      return r;
    }
  }
  return std::nullopt;
}

}  // namespace scenex
