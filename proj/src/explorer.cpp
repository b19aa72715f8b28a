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

#include "scenex/explorer.hpp"

#include "scenex/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace scenex
{

using nlohmann::json;

std::filesystem::path RunConfig::resolved_output_dir() const
{
  if (const char * env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return output_dir;
}

namespace
{

std::string format_value(double v)
{
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(6) << v;
  return ss.str();
}

template <typename T>
T get_checked(const json & doc, const char * key)
{
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception & e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json & obj, const std::set<std::string> & allowed, const std::string & where)
{
  if (!obj.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  for (const auto & [key, _] : obj.items()) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

void check_override(const ParameterDim & dim, double v, OverrideMode mode)
{
  const double lo = std::min(dim.min, dim.max);
  const double hi = std::max(dim.min, dim.max);
  const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (v < lo - tol || v > hi + tol) {
    throw ConfigError(
      "override " + dim.name + "=" + format_value(v) + " outside [" + format_value(lo) + ", " +
      format_value(hi) + "]");
  }
  if (mode == OverrideMode::exact || dim.lattice_index(v)) {
    return;
  }
  const auto below = static_cast<std::size_t>(std::floor((v - dim.min) / dim.step()));
  const std::size_t k_lo = std::min(below, dim.samples - 1);
  const std::size_t k_hi = std::min(k_lo + 1, dim.samples - 1);
  throw ConfigError(
    "override " + dim.name + "=" + format_value(v) + " is not on the lattice; neighbours are " +
    format_value(dim.value(k_lo)) + " and " + format_value(dim.value(k_hi)));
}

}  // namespace

LogicalScenario load_run_scenario(const RunConfig & cfg)
{
  const auto ids = scenario_library_ids();
  if (std::find(ids.begin(), ids.end(), cfg.scenario) != ids.end()) {
    return load_scenario_library(cfg.scenario);
  }
  std::filesystem::path p = cfg.scenario;
  if (p.is_relative()) {
    p = cfg.base_dir / p;
  }
  if (std::filesystem::exists(p)) {
    return load_scenario_file(p);
  }
  throw ConfigError("unknown scenario '" + cfg.scenario + "'");
}

RunConfig parse_config_json(const json & doc, const std::filesystem::path & base_dir)
{
  check_keys(
    doc,
    {"schema_version", "scenario", "metric", "pair", "overrides", "override_mode", "strides",
     "budget", "init_count", "seed", "dt", "horizon", "idm", "caps", "surrogate", "output_dir"},
    "run config");
  if (doc.value("schema_version", kConfigSchemaVersion) != kConfigSchemaVersion) {
    throw ConfigError("unsupported run config schema_version");
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.scenario = get_checked<std::string>(doc, "scenario");
  cfg.metric = parse_metric(get_checked<std::string>(doc, "metric"));
  try {
    if (doc.contains("pair")) {
      const auto pair = doc.at("pair").get<std::vector<std::string>>();
      if (pair.size() != 2 || pair[0] == pair[1]) {
        throw ConfigError("pair must name two different actors");
      }
      cfg.pair = {pair[0], pair[1]};
    }
    if (doc.contains("overrides")) {
      cfg.overrides = doc.at("overrides").get<std::map<std::string, double>>();
    }
    if (doc.contains("override_mode")) {
      const auto mode = doc.at("override_mode").get<std::string>();
      if (mode == "lattice") {
        cfg.override_mode = OverrideMode::lattice;
      } else if (mode == "exact") {
        cfg.override_mode = OverrideMode::exact;
      } else {
        throw ConfigError("override_mode must be 'lattice' or 'exact'");
      }
    }
    if (doc.contains("strides")) {
      cfg.strides = doc.at("strides").get<std::map<std::string, std::size_t>>();
    }
    cfg.budget = doc.value("budget", cfg.budget);
    cfg.init_count = doc.value("init_count", cfg.init_count);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.dt = doc.value("dt", cfg.dt);
    cfg.horizon = doc.value("horizon", cfg.horizon);
    if (doc.contains("idm")) {
      const auto & j = doc.at("idm");
      check_keys(
        j,
        {"time_headway", "max_accel", "comfort_decel", "exponent", "min_gap",
         "max_lateral_accel", "lookahead"},
        "idm");
      cfg.idm.time_headway = j.value("time_headway", cfg.idm.time_headway);
      cfg.idm.max_accel = j.value("max_accel", cfg.idm.max_accel);
      cfg.idm.comfort_decel = j.value("comfort_decel", cfg.idm.comfort_decel);
      cfg.idm.exponent = j.value("exponent", cfg.idm.exponent);
      cfg.idm.min_gap = j.value("min_gap", cfg.idm.min_gap);
      cfg.idm.max_lateral_accel = j.value("max_lateral_accel", cfg.idm.max_lateral_accel);
      cfg.idm.lookahead = j.value("lookahead", cfg.idm.lookahead);
    }
    if (doc.contains("caps")) {
      const auto & j = doc.at("caps");
      check_keys(j, {"time", "distance", "speed_guard"}, "caps");
      cfg.caps.time = j.value("time", cfg.caps.time);
      cfg.caps.distance = j.value("distance", cfg.caps.distance);
      cfg.caps.speed_guard = j.value("speed_guard", cfg.caps.speed_guard);
    }
    if (doc.contains("surrogate")) {
      const auto & j = doc.at("surrogate");
      check_keys(j, {"features", "retune_every"}, "surrogate");
      cfg.features = j.value("features", cfg.features);
      cfg.retune_every = j.value("retune_every", cfg.retune_every);
    }
    if (doc.contains("output_dir")) {
      cfg.output_dir = doc.at("output_dir").get<std::string>();
    }
  } catch (const json::exception & e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }

  if (cfg.init_count < 1 || cfg.budget < cfg.init_count) {
    throw ConfigError("need budget >= init_count >= 1");
  }
  if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0)) {
    throw ConfigError("dt and horizon must be positive");
  }
  if (cfg.features == 0 || cfg.retune_every == 0) {
    throw ConfigError("surrogate features and retune_every must be positive");
  }
  if (!(cfg.caps.time > 0.0 && cfg.caps.distance > 0.0 && cfg.caps.speed_guard > 0.0)) {
    throw ConfigError("caps must be positive");
  }
  IdmParams probe = cfg.idm;
  probe.validate();

  const LogicalScenario scenario = load_run_scenario(cfg);
  scenario.actor(cfg.pair.first);
  scenario.actor(cfg.pair.second);
  for (const auto & [name, value] : cfg.overrides) {
    const auto dim = scenario.grid.dim_index(name);
    if (!dim) {
      throw ConfigError("override names unknown dim '" + name + "'");
    }
    check_override(scenario.grid.dims()[*dim], value, cfg.override_mode);
  }
  for (const auto & [name, stride] : cfg.strides) {
    if (!scenario.grid.dim_index(name)) {
      throw ConfigError("stride names unknown dim '" + name + "'");
    }
    if (stride < 1) {
      throw ConfigError("stride for '" + name + "' must be >= 1");
    }
  }
  SearchSpace space(scenario, cfg);  // rejects configs that fix every dim
  return cfg;
}

RunConfig parse_config(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open config " + file.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ConfigError("malformed config " + file.string() + ": " + e.what());
  }
  return parse_config_json(doc, file.parent_path().empty() ? "." : file.parent_path());
}

json config_to_json(const RunConfig & cfg)
{
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["scenario"] = cfg.scenario;
  j["metric"] = std::string(to_string(cfg.metric));
  j["pair"] = {cfg.pair.first, cfg.pair.second};
  j["overrides"] = cfg.overrides;
  j["override_mode"] = cfg.override_mode == OverrideMode::exact ? "exact" : "lattice";
  j["strides"] = cfg.strides;
  j["budget"] = cfg.budget;
  j["init_count"] = cfg.init_count;
  j["seed"] = cfg.seed;
  j["dt"] = cfg.dt;
  j["horizon"] = cfg.horizon;
  j["idm"] = {
    {"time_headway", cfg.idm.time_headway},
    {"max_accel", cfg.idm.max_accel},
    {"comfort_decel", cfg.idm.comfort_decel},
    {"exponent", cfg.idm.exponent},
    {"min_gap", cfg.idm.min_gap},
    {"max_lateral_accel", cfg.idm.max_lateral_accel},
    {"lookahead", cfg.idm.lookahead}};
  j["caps"] = {
    {"time", cfg.caps.time}, {"distance", cfg.caps.distance},
    {"speed_guard", cfg.caps.speed_guard}};
  j["surrogate"] = {{"features", cfg.features}, {"retune_every", cfg.retune_every}};
  j["output_dir"] = cfg.output_dir.generic_string();
  return j;
}

SearchSpace::SearchSpace(const LogicalScenario & logical, const RunConfig & cfg)
: logical_(&logical)
{
  const auto & dims = logical.grid.dims();
  fixed_.resize(dims.size());
  std::vector<ParameterDim> search_dims;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (auto it = cfg.overrides.find(dims[i].name); it != cfg.overrides.end()) {
      fixed_[i] = it->second;
      continue;
    }
    std::size_t stride = 1;
    if (auto it = cfg.strides.find(dims[i].name); it != cfg.strides.end()) {
      stride = std::max<std::size_t>(1, it->second);
    }
    const std::size_t count = (dims[i].samples + stride - 1) / stride;
    search_dims.push_back(
      {dims[i].name, dims[i].value(0), dims[i].value((count - 1) * stride), count});
    searched_.push_back(i);
    strides_.push_back(stride);
  }
  if (search_dims.empty()) {
    throw ConfigError("every dim is fixed; nothing to search");
  }
  grid_ = ParameterGrid(std::move(search_dims));
}

std::size_t SearchSpace::logical_index(std::size_t search_dim, std::size_t k) const
{
  return k * strides_[search_dim];
}

std::vector<double> SearchSpace::full_values(const IndexVector & search_index) const
{
  grid_.check_index(search_index);
  const auto & dims = logical_->grid.dims();
  std::vector<double> values(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (fixed_[i]) {
      values[i] = *fixed_[i];
    }
  }
  for (std::size_t j = 0; j < searched_.size(); ++j) {
    values[searched_[j]] = dims[searched_[j]].value(logical_index(j, search_index[j]));
  }
  return values;
}

IndexVector SearchSpace::locate(std::span<const double> searched_values) const
{
  if (searched_values.size() != searched_.size()) {
    throw ConfigError(
      "expected " + std::to_string(searched_.size()) + " values (one per searched dim), got " +
      std::to_string(searched_values.size()));
  }
  IndexVector index(searched_.size());
  for (std::size_t j = 0; j < searched_.size(); ++j) {
    const ParameterDim & dim = logical_->grid.dims()[searched_[j]];
    const double v = searched_values[j];
    // values typed at 6 decimals must still resolve
    const auto k = dim.lattice_index(v, 1e-6);
    if (k && *k % strides_[j] == 0) {
      index[j] = *k / strides_[j];
      continue;
    }
    const ParameterDim & sdim = grid_.dims()[j];
    const double pos = sdim.samples > 1 ? (v - sdim.min) / sdim.step() : 0.0;
    const auto lo = static_cast<std::size_t>(
      std::clamp(std::floor(pos), 0.0, static_cast<double>(sdim.samples - 1)));
    const std::size_t hi = std::min(lo + 1, sdim.samples - 1);
    throw ConfigError(
      dim.name + "=" + format_value(v) + " is not on the lattice; neighbours are " +
      format_value(dim.value(logical_index(j, lo))) + " and " +
      format_value(dim.value(logical_index(j, hi))));
  }
  return index;
}

Evaluator::Evaluator(const RunConfig & cfg)
: cfg_(cfg), scenario_(load_run_scenario(cfg)), space_(scenario_, cfg_),
  regions_(conflict_regions(scenario_.actors))
{
  scenario_.actor(cfg_.pair.first);
  scenario_.actor(cfg_.pair.second);
}

ConcreteScenario Evaluator::concrete(const IndexVector & search_index) const
{
  return instantiate_values(scenario_, space_.full_values(search_index));
}

SimulationTrace Evaluator::trace(const IndexVector & search_index) const
{
  return simulate(concrete(search_index), SimConfig{cfg_.dt, cfg_.horizon, cfg_.idm});
}

EvaluationRecord Evaluator::evaluate(const IndexVector & search_index) const
{
  EvaluationRecord rec;
  rec.index = search_index;
  rec.flat = space_.grid().flat(search_index);
  rec.values = space_.full_values(search_index);

  const auto start = std::chrono::steady_clock::now();
  const SimulationTrace tr = trace(search_index);
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    rec.breakdown[i] =
      scenex::evaluate(kAllMetrics[i], tr, cfg_.pair.first, cfg_.pair.second, regions_, cfg_.caps);
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  rec.termination = tr.termination;
  rec.metric = rec.breakdown[static_cast<std::size_t>(cfg_.metric)];
  return rec;
}

namespace
{

json params_json(const std::vector<double> & values, const LogicalScenario & scenario)
{
  json p = json::object();
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[scenario.grid.dims()[i].name] = values[i];
  }
  return p;
}

json history_entry(const EvaluationRecord & rec, const Evaluator & ev)
{
  return {
    {"iteration", rec.iteration},
    {"index", rec.index},
    {"flat", rec.flat},
    {"params", params_json(rec.values, ev.scenario())},
    {"metric", rec.metric.value},
    {"capped", rec.metric.capped},
    {"termination", std::string(to_string(rec.termination))}};
}

std::filesystem::path prepare_output_dir(const RunConfig & cfg)
{
  const auto dir = cfg.resolved_output_dir();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  return dir;
}

std::ofstream open_output(const std::filesystem::path & file)
{
  std::ofstream out(file, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + file.string());
  }
  return out;
}

}  // namespace

json records_header(const Evaluator & ev, std::string_view source)
{
  json dims = json::array();
  const auto & space = ev.space();
  for (std::size_t j = 0; j < space.grid().size(); ++j) {
    const auto & d = space.grid().dims()[j];
    json values = json::array();
    const auto & logical_dim = ev.scenario().grid.dims()[space.searched_dims()[j]];
    for (std::size_t k = 0; k < d.samples; ++k) {
      values.push_back(logical_dim.value(space.logical_index(j, k)));
    }
    dims.push_back({{"name", d.name}, {"values", values}});
  }
  return {
    {"type", "header"},
    {"source", std::string(source)},
    {"scenario", ev.scenario().id},
    {"metric", std::string(to_string(ev.config().metric))},
    {"pair", {ev.config().pair.first, ev.config().pair.second}},
    {"dims", dims}};
}

json record_to_json(const EvaluationRecord & rec, const Evaluator & ev)
{
  json j = history_entry(rec, ev);
  j["type"] = "record";
  json metrics = json::object();
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    metrics[std::string(to_string(kAllMetrics[i]))] = {
      {"value", rec.breakdown[i].value}, {"capped", rec.breakdown[i].capped}};
  }
  j["metrics"] = metrics;
  j["wall_time_s"] = rec.wall_time;
  return j;
}

json ExplorationReport::to_json(const Evaluator & ev) const
{
  json hist = json::array();
  std::size_t capped = 0;
  std::size_t collisions = 0;
  for (const auto & rec : history) {
    hist.push_back(history_entry(rec, ev));
    capped += rec.metric.capped ? 1 : 0;
    collisions += rec.termination == Termination::collision ? 1 : 0;
  }
  json j;
  j["config"] = config_echo;
  j["history"] = hist;
  j["incumbent"] = history.empty() ? json(nullptr) : history_entry(history[incumbent], ev);
  j["totals"] = {
    {"evaluations", history.size()},
    {"capped", capped},
    {"collisions", collisions},
    {"search_cardinality", ev.space().grid().cardinality()}};
  return j;
}

ExplorationReport explore(const RunConfig & cfg, bool write)
{
  const Evaluator ev(cfg);
  ExplorationReport report;
  report.config_echo = config_to_json(cfg);

  std::ofstream records;
  std::filesystem::path out_dir;
  if (write) {
    out_dir = prepare_output_dir(cfg);
    records = open_output(out_dir / "records.jsonl");
    records << records_header(ev, "explore").dump() << '\n' << std::flush;
  }

  std::optional<EvaluationRecord> pending;
  auto objective = [&](const IndexVector & index) {
    pending = ev.evaluate(index);
    return pending->metric.value;
  };
  auto hook = [&](std::size_t ordinal, const Observation & obs) {
    EvaluationRecord rec;
    if (pending && pending->index == obs.index) {
      rec = std::move(*pending);
    } else {
      rec.index = obs.index;
      rec.flat = ev.space().grid().flat(obs.index);
      rec.values = ev.space().full_values(obs.index);
      rec.metric = {cfg.metric, obs.y, std::nullopt, true};
      for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
        rec.breakdown[i] = {kAllMetrics[i], cfg.caps.for_kind(kAllMetrics[i]), std::nullopt, true};
      }
    }
    pending.reset();
    rec.iteration = ordinal;
    if (write) {
      records << record_to_json(rec, ev).dump() << '\n' << std::flush;
    }
    report.history.push_back(std::move(rec));
  };

  BoOptions opts;
  opts.budget = static_cast<std::size_t>(
    std::min<std::uint64_t>(cfg.budget, ev.space().grid().cardinality()));
  opts.init_count = std::min(cfg.init_count, opts.budget);
  opts.seed = cfg.seed;
  opts.retune_every = cfg.retune_every;
  opts.features = cfg.features;
  opts.failure_value = cfg.caps.for_kind(cfg.metric);

  run(objective, ev.space().grid(), opts, hook);

  for (std::size_t i = 1; i < report.history.size(); ++i) {
    if (report.history[i].metric.value < report.history[report.incumbent].metric.value) {
      report.incumbent = i;
    }
  }
  if (write) {
    auto out = open_output(out_dir / "report.json");
    out << report.to_json(ev).dump(2) << '\n';
  }
  return report;
}

std::vector<EvaluationRecord> grid_oracle(
  const RunConfig & cfg, const std::vector<std::size_t> & strides, unsigned jobs, bool write)
{
  RunConfig strided = cfg;
  if (!strides.empty()) {
    const LogicalScenario scenario = load_run_scenario(cfg);
    if (strides.size() != scenario.grid.size()) {
      throw ConfigError(
        "expected " + std::to_string(scenario.grid.size()) + " strides (one per scenario dim)");
    }
    strided.strides.clear();
    for (std::size_t i = 0; i < strides.size(); ++i) {
      strided.strides[scenario.grid.dims()[i].name] = std::max<std::size_t>(1, strides[i]);
    }
  }
  const Evaluator ev(strided);
  const std::uint64_t n = ev.space().grid().cardinality();
  std::vector<EvaluationRecord> table(static_cast<std::size_t>(n));

  if (jobs == 0) {
    jobs = std::max(1U, std::thread::hardware_concurrency());
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t f = next++; f < n; f = next++) {
      auto rec = ev.evaluate(ev.space().grid().unflat(f));
      rec.iteration = static_cast<std::size_t>(f);
      table[static_cast<std::size_t>(f)] = std::move(rec);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) {
      pool.emplace_back(worker);
    }
    worker();
  }

  if (write) {
    const auto out_dir = prepare_output_dir(strided);
    auto out = open_output(out_dir / "oracle.jsonl");
    out << records_header(ev, "oracle").dump() << '\n';
    for (const auto & rec : table) {
      out << record_to_json(rec, ev).dump() << '\n';
    }
  }
  return table;
}

ReplayResult replay(const RunConfig & cfg, std::span<const double> values, bool write)
{
  RunConfig full = cfg;
  full.strides.clear();
  const Evaluator ev(full);
  const IndexVector index = ev.space().locate(values);

  ReplayResult result;
  result.trace = ev.trace(index);
  result.record = ev.evaluate(index);
  result.region = find_region(ev.regions(), cfg.pair.first, cfg.pair.second);

  if (write) {
    const auto out_dir = prepare_output_dir(cfg);
    {
      auto csv = open_output(out_dir / "trace.csv");
      write_trace_csv(csv, result.trace);
    }
    json j = record_to_json(result.record, ev);
    j["type"] = "replay";
    j["samples"] = result.trace.samples();
    if (result.trace.collision) {
      j["collision"] = {result.trace.collision->first, result.trace.collision->second};
    }
    if (result.region) {
      j["region"] = {
        {result.region->actor_a, {{"entry", result.region->entry_a}, {"exit", result.region->exit_a}}},
        {result.region->actor_b, {{"entry", result.region->entry_b}, {"exit", result.region->exit_b}}}};
    }
    auto out = open_output(out_dir / "metrics.json");
    out << j.dump(2) << '\n';
  }
  return result;
}

void export_heatmap(
  std::istream & records, const std::string & x_dim, const std::string & y_dim, std::ostream & csv,
  std::optional<MetricKind> metric)
{
  std::string line;
  if (!std::getline(records, line)) {
    throw ConfigError("records file is empty");
  }
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error & e) {
    throw ConfigError(std::string("malformed records header: ") + e.what());
  }
  if (header.value("type", "") != "header") {
    throw ConfigError("records file does not start with a header line");
  }
  if (x_dim == y_dim) {
    throw ConfigError("heatmap axes must differ");
  }

  std::optional<std::size_t> xi;
  std::optional<std::size_t> yi;
  const auto & dims = header.at("dims");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto name = dims[i].at("name").get<std::string>();
    if (name == x_dim) xi = i;
    if (name == y_dim) yi = i;
  }
  if (!xi || !yi) {
    throw ConfigError("unknown heatmap dim '" + (!xi ? x_dim : y_dim) + "'");
  }
  const auto x_values = dims[*xi].at("values").get<std::vector<double>>();
  const auto y_values = dims[*yi].at("values").get<std::vector<double>>();

  std::vector<std::optional<double>> cells(x_values.size() * y_values.size());
  while (std::getline(records, line)) {
    if (line.empty()) {
      continue;
    }
    const json rec = json::parse(line);
    if (rec.value("type", "") != "record") {
      continue;
    }
    const auto index = rec.at("index").get<std::vector<std::size_t>>();
    const double v = metric
                       ? rec.at("metrics").at(std::string(to_string(*metric))).at("value").get<double>()
                       : rec.at("metric").get<double>();
    auto & cell = cells[index[*yi] * x_values.size() + index[*xi]];
    cell = cell ? std::min(*cell, v) : v;
  }

  csv << y_dim << '\\' << x_dim;
  for (double x : x_values) {
    csv << ',' << format_value(x);
  }
  csv << '\n';
  for (std::size_t r = 0; r < y_values.size(); ++r) {
    csv << format_value(y_values[r]);
    for (std::size_t c = 0; c < x_values.size(); ++c) {
      csv << ',';
      if (const auto & cell = cells[r * x_values.size() + c]) {
        csv << format_value(*cell);
      }
    }
    csv << '\n';
  }
}

}  // namespace scenex
