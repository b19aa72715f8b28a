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

#ifndef SCENEX__SCENARIO_HPP_
#define SCENEX__SCENARIO_HPP_

#include "scenex/geometry.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenex
{

using IndexVector = std::vector<std::size_t>;

/// One discretized parameter axis with inclusive endpoints.
struct ParameterDim
{
  std::string name;
  double min{0.0};
  double max{0.0};
  std::size_t samples{1};

  /// Throws ConfigError when samples == 0 or (samples >= 2 and max <= min).
  void validate() const;
  double step() const { return samples > 1 ? (max - min) / static_cast<double>(samples - 1) : 0.0; }
  /// min + k * step; returns min and max exactly at both ends.
  double value(std::size_t k) const;
  /// Nearest lattice index for v, clamped into range.
  std::size_t nearest(double v) const;
  /// Lattice index of v if v is within `tol` of a lattice value.
  std::optional<std::size_t> lattice_index(double v, double tol = 1e-9) const;
};

/// Row-major (first dimension slowest) lattice over a list of dims.
class ParameterGrid
{
public:
  ParameterGrid() = default;
  explicit ParameterGrid(std::vector<ParameterDim> dims);

  const std::vector<ParameterDim> & dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  std::uint64_t cardinality() const { return cardinality_; }
  std::optional<std::size_t> dim_index(std::string_view name) const;

  std::uint64_t flat(const IndexVector & index) const;
  IndexVector unflat(std::uint64_t flat) const;
  std::vector<double> values(const IndexVector & index) const;
  /// Nearest lattice index per dim.
  IndexVector quantize(std::span<const double> values) const;
  void check_index(const IndexVector & index) const;

private:
  std::vector<ParameterDim> dims_;
  std::uint64_t cardinality_{0};
};

/// Throws ConfigError on an empty list or an invalid dim.
ParameterGrid build_parameter_grid(std::vector<ParameterDim> dims);
/// Throws std::out_of_range for an out-of-range index.
std::vector<double> grid_values(const ParameterGrid & grid, const IndexVector & index);

enum class ActorKind { ego, pedestrian, vehicle, truck };
enum class Behavior { idm_controlled, scripted };

std::string_view to_string(ActorKind kind);
std::string_view to_string(Behavior behavior);

struct ActorSpec
{
  std::string id;
  ActorKind kind{ActorKind::vehicle};
  std::shared_ptr<const Path> route;
  Behavior behavior{Behavior::scripted};
  double start_s{0.0};
  double start_delay{0.0};
  double target_speed{1.0};
  double initial_speed{0.0};
  double footprint_radius{1.0};
  double max_accel{0.0};  // worst-case acceleration bound for WTTC
  double ramp_accel{2.0};  // scripted speed ramp

  void validate() const;
};

/// Template fields a grid parameter may drive.
enum class BoundField { start_s, start_delay, target_speed, initial_speed };

/// field := offset + scale * parameter
struct Binding
{
  std::string param;
  std::string actor;
  BoundField field{BoundField::start_s};
  double scale{1.0};
  double offset{0.0};
};

struct LogicalScenario
{
  std::string id;
  std::string description;
  std::vector<ActorSpec> actors;
  ParameterGrid grid;
  std::vector<Binding> bindings;  // one per grid dim, in dim order

  const ActorSpec & actor(std::string_view actor_id) const;
  const ActorSpec & ego() const;
  /// Every dim bound exactly once, every binding targets an existing actor.
  void validate() const;
};

struct ConcreteScenario
{
  std::string logical_id;
  std::vector<ActorSpec> actors;
  std::vector<double> values;  // one per logical grid dim
  IndexVector index;  // empty when instantiated from off-lattice values

  const ActorSpec & actor(std::string_view actor_id) const;
};

/// Binds the lattice values at `index`.
ConcreteScenario instantiate(const LogicalScenario & logical, const IndexVector & index);
/// Binds arbitrary in-range values; used for fixed overrides that need not sit on the lattice.
ConcreteScenario instantiate_values(const LogicalScenario & logical, std::span<const double> values);

/// Bundled library ids: A, B, A3, B3.
std::vector<std::string> scenario_library_ids();
/// Throws ConfigError for an unknown id.
LogicalScenario load_scenario_library(std::string_view id);
/// Loads one scenario document from disk; `extends` refers to bundled ids.
LogicalScenario load_scenario_file(const std::filesystem::path & file);
LogicalScenario parse_scenario_document(const nlohmann::json & doc);

/// Conflict regions of every route pair, keyed by unordered actor pair.
std::vector<ConflictRegion> conflict_regions(const std::vector<ActorSpec> & actors);
std::optional<ConflictRegion> find_region(
  const std::vector<ConflictRegion> & regions, std::string_view a, std::string_view b);

}  // namespace scenex

#endif  // SCENEX__SCENARIO_HPP_
