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

#ifndef SCENEX__EXPLORER_HPP_
#define SCENEX__EXPLORER_HPP_

#include "scenex/metrics.hpp"
#include "scenex/optimizer.hpp"
#include "scenex/scenario.hpp"
#include "scenex/simulator.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scenex
{

/// Environment variable that replaces the configured output directory.
inline constexpr const char * kOutputDirEnv = "SCENEX_OUTPUT_DIR";
inline constexpr int kConfigSchemaVersion = 1;

/// `lattice`: fixed values must be lattice points of their dim. `exact`: any in-range value.
enum class OverrideMode { lattice, exact };

struct RunConfig
{
  std::string scenario;  // bundled id or path to a scenario document
  MetricKind metric{MetricKind::pet};
  std::pair<std::string, std::string> pair{"ego", "ped"};
  std::map<std::string, double> overrides;
  OverrideMode override_mode{OverrideMode::lattice};
  std::map<std::string, std::size_t> strides;  // per logical dim, default 1
  std::size_t budget{430};
  std::size_t init_count{8};
  std::uint64_t seed{1};
  double dt{0.05};
  double horizon{60.0};
  IdmParams idm;
  MetricCaps caps;
  std::size_t features{1000};
  std::size_t retune_every{10};
  std::filesystem::path output_dir{"out"};
  std::filesystem::path base_dir{"."};  // resolves relative scenario paths

  /// Effective output directory after the environment override.
  std::filesystem::path resolved_output_dir() const;
};

/// Throws ConfigError on unknown keys, bad values or off-lattice overrides.
RunConfig parse_config(const std::filesystem::path & file);
RunConfig parse_config_json(const nlohmann::json & doc, const std::filesystem::path & base_dir = ".");
/// Every field including defaults, in a stable key order.
nlohmann::json config_to_json(const RunConfig & cfg);

LogicalScenario load_run_scenario(const RunConfig & cfg);

/**
 * The searched sub-lattice of a logical scenario: fixed dims removed, strides
 * applied. Search indices address this grid; values always come from the
 * logical lattice so strided cells reproduce full-resolution values exactly.
 */
class SearchSpace
{
public:
  SearchSpace(const LogicalScenario & logical, const RunConfig & cfg);

  const ParameterGrid & grid() const { return grid_; }
  const std::vector<std::size_t> & searched_dims() const { return searched_; }
  const std::vector<std::size_t> & strides() const { return strides_; }
  /// Values for every logical dim at a search index.
  std::vector<double> full_values(const IndexVector & search_index) const;
  /// Logical lattice index of a searched dim's value at a search index.
  std::size_t logical_index(std::size_t search_dim, std::size_t k) const;
  /// Search index for values of the searched dims; throws ConfigError off the lattice.
  IndexVector locate(std::span<const double> searched_values) const;

private:
  const LogicalScenario * logical_;
  ParameterGrid grid_;
  std::vector<std::size_t> searched_;  // logical dim per search dim
  std::vector<std::size_t> strides_;  // per search dim
  std::vector<std::optional<double>> fixed_;  // per logical dim
};

struct EvaluationRecord
{
  std::size_t iteration{0};
  IndexVector index;  // search index
  std::uint64_t flat{0};
  std::vector<double> values;  // every logical dim
  MetricResult metric;
  std::array<MetricResult, 5> breakdown;  // kAllMetrics order
  Termination termination{Termination::horizon};
  double wall_time{0.0};  // s, simulate + evaluate
};

/// Scenario -> simulation -> metric for one run configuration. Thread-safe const API.
class Evaluator
{
public:
  explicit Evaluator(const RunConfig & cfg);

  const RunConfig & config() const { return cfg_; }
  const LogicalScenario & scenario() const { return scenario_; }
  const SearchSpace & space() const { return space_; }
  const std::vector<ConflictRegion> & regions() const { return regions_; }

  ConcreteScenario concrete(const IndexVector & search_index) const;
  SimulationTrace trace(const IndexVector & search_index) const;
  EvaluationRecord evaluate(const IndexVector & search_index) const;

private:
  RunConfig cfg_;
  LogicalScenario scenario_;
  SearchSpace space_;
  std::vector<ConflictRegion> regions_;
};

struct ExplorationReport
{
  nlohmann::json config_echo;
  std::vector<EvaluationRecord> history;
  std::size_t incumbent{0};  // position in history

  /// Deterministic summary: config echo, history without wall times, incumbent, totals.
  nlohmann::json to_json(const Evaluator & evaluator) const;
};

/// Header line of a records file: scenario, metric, pair and the search lattice.
nlohmann::json records_header(const Evaluator & evaluator, std::string_view source);
nlohmann::json record_to_json(const EvaluationRecord & rec, const Evaluator & evaluator);

/**
 * Bayesian exploration. Writes <out>/records.jsonl (one line per evaluation,
 * appended as they happen) and <out>/report.json. When `write` is false nothing
 * touches the filesystem.
 */
ExplorationReport explore(const RunConfig & cfg, bool write = true);

/// Every strided cell, in lattice order. Strides are per logical dim; 0 entries mean 1.
std::vector<EvaluationRecord> grid_oracle(
  const RunConfig & cfg, const std::vector<std::size_t> & strides, unsigned jobs = 0,
  bool write = true);

struct ReplayResult
{
  SimulationTrace trace;
  EvaluationRecord record;
  std::optional<ConflictRegion> region;
};

/// Simulates the cell at the given values of the searched dims; writes trace.csv and metrics.json.
ReplayResult replay(const RunConfig & cfg, std::span<const double> values, bool write = true);

/// 2-D min-reduction of a records file over two named dims, as CSV.
void export_heatmap(
  std::istream & records, const std::string & x_dim, const std::string & y_dim,
  std::ostream & csv, std::optional<MetricKind> metric = std::nullopt);

}  // namespace scenex

#endif  // SCENEX__EXPLORER_HPP_
