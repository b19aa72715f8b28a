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
#include "scenex/scenario.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

using scenex::ConfigError;
using scenex::IndexVector;
using scenex::ParameterDim;
using scenex::ParameterGrid;

namespace
{

ParameterGrid paper_grid()
{
  return scenex::build_parameter_grid(
    {{"ped_delay", 0.0, 7.0, 50}, {"ego_s", 27.99, 77.99, 250}, {"car_v", 12.5, 30.0, 50}});
}

}  // namespace

TEST(ParameterGrid, PaperCardinality)
{
  EXPECT_EQ(paper_grid().cardinality(), 625000U);
}

TEST(ParameterGrid, SingleSampleDim)
{
  const auto g = scenex::build_parameter_grid({{"x", 5.0, 5.0, 1}});
  EXPECT_EQ(g.cardinality(), 1U);
  EXPECT_DOUBLE_EQ(g.dims()[0].value(0), 5.0);
}

TEST(ParameterGrid, RowMajorMatchesHandEnumeration)
{
  const auto g = scenex::build_parameter_grid({{"a", 0.0, 1.0, 3}, {"b", 0.0, 10.0, 2}});
  // first dim slowest: (0,0) (0,1) (1,0) (1,1) (2,0) (2,1)
  std::vector<IndexVector> expected;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      expected.push_back({i, j});
    }
  }
  for (std::uint64_t f = 0; f < g.cardinality(); ++f) {
    EXPECT_EQ(g.unflat(f), expected[f]);
    EXPECT_EQ(g.flat(expected[f]), f);
  }
  EXPECT_EQ(g.unflat(4), (IndexVector{2, 0}));
  EXPECT_EQ(scenex::grid_values(g, {2, 0}), (std::vector<double>{1.0, 0.0}));
}

TEST(ParameterDim, DelayLatticeValues)
{
  const ParameterDim d{"ped_delay", 0.0, 7.0, 50};
  EXPECT_EQ(d.value(0), 0.0);
  EXPECT_EQ(d.value(49), 7.0);
  EXPECT_NEAR(d.value(1), 7.0 / 49.0, 1e-15);
  EXPECT_THROW(d.value(50), std::out_of_range);
}

TEST(ParameterDim, InvalidDimsRejected)
{
  EXPECT_THROW((ParameterDim{"x", 0.0, 1.0, 0}.validate()), ConfigError);
  EXPECT_THROW((ParameterDim{"x", 2.0, 1.0, 3}.validate()), ConfigError);
  EXPECT_THROW((ParameterDim{"x", 1.0, 1.0, 3}.validate()), ConfigError);
  EXPECT_THROW(scenex::build_parameter_grid({}), ConfigError);
}

TEST(ParameterGrid, RoundTripProperty)
{
  const auto g = paper_grid();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> pick(0, g.cardinality() - 1);
  for (int i = 0; i < 2000; ++i) {
    const auto f = pick(rng);
    const auto idx = g.unflat(f);
    EXPECT_EQ(g.flat(idx), f);
    EXPECT_EQ(g.quantize(scenex::grid_values(g, idx)), idx);
  }
  EXPECT_EQ(g.flat(g.unflat(g.cardinality() - 1)), g.cardinality() - 1);
  EXPECT_THROW(g.unflat(g.cardinality()), std::out_of_range);
  EXPECT_THROW(g.flat({50, 0, 0}), std::out_of_range);
}

TEST(Library, BundledScenariosHavePaperGrids)
{
  for (const auto * id : {"A", "B", "A3", "B3"}) {
    const auto s = scenex::load_scenario_library(id);
    EXPECT_EQ(s.grid.cardinality(), 625000U) << id;
    EXPECT_NO_THROW(s.validate());
  }
  const auto a3 = scenex::load_scenario_library("A3");
  ASSERT_EQ(a3.grid.size(), 3U);
  EXPECT_EQ(a3.grid.dims()[0].name, "ego_s");
  EXPECT_EQ(a3.grid.dims()[1].name, "car_v");
  EXPECT_EQ(a3.grid.dims()[2].name, "car_y");
  EXPECT_EQ(a3.grid.dims()[2].samples, 50U);
  EXPECT_DOUBLE_EQ(a3.grid.dims()[2].min, 15.0);
  EXPECT_DOUBLE_EQ(a3.grid.dims()[2].max, 50.0);
  EXPECT_THROW(scenex::load_scenario_library("C"), ConfigError);
}

TEST(Library, InstantiateBindsValues)
{
  const auto a = scenex::load_scenario_library("A");
  const auto c = scenex::instantiate(a, {0, 10, 3});
  EXPECT_EQ(c.actor("ped").start_delay, 0.0);
  EXPECT_DOUBLE_EQ(c.actor("ego").start_s, a.grid.dims()[1].value(10));
  EXPECT_DOUBLE_EQ(c.actor("car").target_speed, a.grid.dims()[2].value(3));
  EXPECT_EQ(c.index, (IndexVector{0, 10, 3}));

  const std::vector<double> exp1{0.0, 60.0, 15.0};
  const auto e = scenex::instantiate_values(a, exp1);
  EXPECT_EQ(e.actor("ego").start_s, 60.0);
  EXPECT_EQ(e.actor("car").target_speed, 15.0);

  const auto b = scenex::load_scenario_library("B");
  const std::vector<double> exp1b{0.0, 67.0, 15.0};
  EXPECT_EQ(scenex::instantiate_values(b, exp1b).actor("ego").start_s, 67.0);
}

TEST(Library, CarStartFromYCoordinate)
{
  const auto a3 = scenex::load_scenario_library("A3");
  const std::vector<double> v{60.0, 15.0, 15.0};
  const auto c = scenex::instantiate_values(a3, v);
  const auto & car = c.actor("car");
  // start_s = 50 - y on a route starting at y = 50 heading south
  EXPECT_DOUBLE_EQ(car.start_s, 35.0);
  EXPECT_NEAR(car.route->point_at(car.start_s).y, 15.0, 1e-12);
}

TEST(Library, ConflictRegionsWithEgo)
{
  const auto a = scenex::load_scenario_library("A");
  const auto ra = scenex::conflict_regions(a.actors);
  EXPECT_FALSE(scenex::find_region(ra, "ego", "car").has_value());
  EXPECT_TRUE(scenex::find_region(ra, "ego", "ped").has_value());

  const auto b = scenex::load_scenario_library("B");
  const auto rb = scenex::conflict_regions(b.actors);
  int with_ego = 0;
  for (const auto & r : rb) {
    with_ego += (r.actor_a == "ego" || r.actor_b == "ego") ? 1 : 0;
  }
  EXPECT_EQ(with_ego, 3);
  for (const auto * other : {"ped", "car", "truck"}) {
    const auto r = scenex::find_region(rb, "ego", other);
    ASSERT_TRUE(r.has_value()) << other;
    EXPECT_LT(r->entry_for("ego"), r->exit_for("ego"));
    EXPECT_LT(r->entry_for(other), r->exit_for(other));
  }
}

TEST(Library, DocumentValidation)
{
  const auto base = nlohmann::json::parse(R"({
    "schema_version": 1, "id": "T",
    "actors": [
      {"id": "ego", "kind": "ego", "behavior": "idm_controlled",
       "route": {"points": [[0, 0], [100, 0]]}, "target_speed": 10, "footprint_radius": 1,
       "max_accel": 3},
      {"id": "ped", "kind": "pedestrian", "behavior": "scripted",
       "route": {"points": [[50, 5], [50, -5]]}, "target_speed": 1.4, "footprint_radius": 0.3,
       "max_accel": 1.5}
    ],
    "dims": [{"name": "d", "min": 0, "max": 5, "samples": 6}],
    "bindings": [{"param": "d", "actor": "ped", "field": "start_delay"}]
  })");
  EXPECT_NO_THROW(scenex::parse_scenario_document(base));

  auto two_egos = base;
  two_egos["actors"][1]["kind"] = "ego";
  two_egos["actors"][1]["behavior"] = "idm_controlled";
  EXPECT_THROW(scenex::parse_scenario_document(two_egos), ConfigError);

  auto unbound = base;
  unbound["bindings"] = nlohmann::json::array();
  EXPECT_THROW(scenex::parse_scenario_document(unbound), ConfigError);

  auto bad_actor = base;
  bad_actor["bindings"][0]["actor"] = "nobody";
  EXPECT_THROW(scenex::parse_scenario_document(bad_actor), ConfigError);

  auto start_past_end = base;
  start_past_end["bindings"][0]["field"] = "start_s";
  start_past_end["dims"][0]["max"] = 50.0;
  EXPECT_THROW(scenex::parse_scenario_document(start_past_end), ConfigError);
}
