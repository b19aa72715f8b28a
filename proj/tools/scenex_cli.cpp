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
#include "scenex/explorer.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitFit = 3;

void print_record(const scenex::EvaluationRecord & rec, const scenex::Evaluator & ev)
{
  const auto & dims = ev.scenario().grid.dims();
  for (std::size_t i = 0; i < rec.values.size(); ++i) {
    std::cout << (i ? " " : "") << dims[i].name << '=' << rec.values[i];
  }
  std::cout << "  " << scenex::to_string(rec.metric.kind) << '=' << rec.metric.value
            << (rec.metric.capped ? " (capped)" : "") << "  termination="
            << scenex::to_string(rec.termination) << '\n';
}

int run_explore(const std::string & config)
{
  const auto cfg = scenex::parse_config(config);
  const auto report = scenex::explore(cfg);
  const scenex::Evaluator ev(cfg);
  std::cout << "evaluations: " << report.history.size() << '\n' << "incumbent: ";
  print_record(report.history[report.incumbent], ev);
  std::cout << "output: " << cfg.resolved_output_dir().string() << '\n';
  return 0;
}

int run_oracle(const std::string & config, const std::vector<std::size_t> & strides, unsigned jobs)
{
  const auto cfg = scenex::parse_config(config);
  const auto table = scenex::grid_oracle(cfg, strides, jobs);
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].metric.value < table[best].metric.value) {
      best = i;
    }
  }
  std::cout << "cells: " << table.size() << '\n' << "minimum: ";
  print_record(table[best], scenex::Evaluator(cfg));
  std::cout << "output: " << cfg.resolved_output_dir().string() << '\n';
  return 0;
}

int run_replay(const std::string & config, const std::vector<double> & at)
{
  const auto cfg = scenex::parse_config(config);
  const auto result = scenex::replay(cfg, at);
  std::cout << "samples: " << result.trace.samples() << '\n';
  for (std::size_t i = 0; i < scenex::kAllMetrics.size(); ++i) {
    const auto & m = result.record.breakdown[i];
    std::cout << scenex::to_string(m.kind) << ": " << m.value << (m.capped ? " (capped)" : "")
              << '\n';
  }
  std::cout << "termination: " << scenex::to_string(result.trace.termination) << '\n';
  std::cout << "output: " << cfg.resolved_output_dir().string() << '\n';
  return 0;
}

int run_heatmap(
  const std::string & records, const std::string & x, const std::string & y,
  const std::string & metric, const std::string & output)
{
  std::ifstream in(records);
  if (!in) {
    throw scenex::ConfigError("cannot open records file " + records);
  }
  std::optional<scenex::MetricKind> kind;
  if (!metric.empty()) {
    kind = scenex::parse_metric(metric);
  }
  if (output.empty() || output == "-") {
    scenex::export_heatmap(in, x, y, std::cout, kind);
    return 0;
  }
  std::ofstream out(output);
  if (!out) {
    throw std::runtime_error("cannot write " + output);
  }
  scenex::export_heatmap(in, x, y, out, kind);
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Bayesian exploration of logical traffic scenarios"};
  app.require_subcommand(1);

  std::string config;
  auto * explore = app.add_subcommand("explore", "Search a scenario for critical concrete cases");
  explore->add_option("config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);

  std::vector<std::size_t> strides;
  unsigned jobs = 0;
  auto * oracle = app.add_subcommand("oracle", "Evaluate every cell of a strided lattice");
  oracle->add_option("config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--stride", strides, "Stride per scenario dim")->delimiter(',');
  oracle->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::vector<double> at;
  auto * replay = app.add_subcommand("replay", "Simulate one cell and dump its trace");
  replay->add_option("config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  replay->add_option("--at", at, "Values of the searched dims")->required()->delimiter(',');

  std::string records;
  std::string x_dim;
  std::string y_dim;
  std::string metric;
  std::string output;
  auto * heatmap = app.add_subcommand("heatmap", "Min-reduce a records file onto two dims");
  heatmap->add_option("records", records, "records.jsonl or oracle.jsonl")
    ->required()
    ->check(CLI::ExistingFile);
  heatmap->add_option("--x", x_dim, "Column dim")->required();
  heatmap->add_option("--y", y_dim, "Row dim")->required();
  heatmap->add_option("--metric", metric, "Metric to map instead of the searched one");
  heatmap->add_option("-o,--output", output, "CSV destination (default stdout)");

  auto * list = app.add_subcommand("scenarios", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*explore) return run_explore(config);
    if (*oracle) return run_oracle(config, strides, jobs);
    if (*replay) return run_replay(config, at);
    if (*heatmap) return run_heatmap(records, x_dim, y_dim, metric, output);
    if (*list) {
      for (const auto & id : scenex::scenario_library_ids()) {
        std::cout << id << '\n';
      }
      return 0;
    }
  } catch (const scenex::ConfigError & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const scenex::FitError & e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitFit;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
