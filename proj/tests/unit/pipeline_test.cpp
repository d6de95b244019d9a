// Copyright 2026 The swarminit Authors.
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

#include "swarminit/pipeline.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "swarminit/serialization.hpp"

namespace swarminit {
namespace {

Config Deterministic() {
  Config c;
  c.pipeline.record_wall_times = false;
  return c;
}

TEST(RunInitTest, TwoDronesSingleSolve) {
  Config c = Deterministic();
  c.world.n_drones = 2;
  c.world.seed = 4;
  c.pipeline.min_num_observations = 1;
  const RunReport r = RunInit(c);
  EXPECT_EQ(r.status, "converged");
  ASSERT_EQ(r.iterations.size(), 1u);
  EXPECT_EQ(r.epochs, 1);
  EXPECT_LT(r.yaw_mae, 1e-6);
  EXPECT_LT(r.translation_rmse, 1e-6);
  EXPECT_EQ(r.matches.wrong, 0);
  EXPECT_EQ(r.matches.correct, r.matches.true_observations);
}

TEST(RunInitTest, RankDescends) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Config c = Deterministic();
    c.world.n_drones = 4;
    c.world.obs_noise_sigma = 0.02;
    c.world.seed = seed;
    c.pipeline.max_epochs = 6;
    const RunReport r = RunInit(c);
    ASSERT_FALSE(r.iterations.empty());
    EXPECT_EQ(r.iterations.front().epochs, c.pipeline.min_num_observations);
    for (std::size_t k = 1; k < r.iterations.size(); ++k) {
      EXPECT_EQ(r.iterations[k].epochs, r.iterations[k - 1].epochs + 1);
    }
    EXPECT_LE(r.iterations.front().numeric_rank, 8);
    if (r.iterations.back().numeric_rank <= 5) ++ok;
  }
  EXPECT_GE(ok, 9);
}

TEST(RunInitTest, BreaksRotationSymmetry) {
  int complete = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Config c = Deterministic();
    c.world.n_drones = 4;
    c.world.formation = Formation::kRotationSymmetric;
    c.world.formation_radius = 2.5;
    c.world.seed = seed;
    const RunReport r = RunInit(c);
    if (!r.iterations.empty() && r.iterations.back().complete) ++complete;
  }
  EXPECT_GE(complete, 4);
}

TEST(RunInitTest, EpochCapReportsPartialResults) {
  Config c = Deterministic();
  c.world.n_drones = 5;
  c.world.obs_noise_sigma = 0.2;
  c.world.seed = 2;
  c.pipeline.max_epochs = 3;
  const RunReport r = RunInit(c);
  EXPECT_EQ(r.status, "max_epochs_exceeded");
  EXPECT_FALSE(r.reason.empty());
  EXPECT_EQ(r.epochs, 3);
  EXPECT_EQ(r.iterations.size(), 2u);
  EXPECT_EQ(r.rotations.size(), 5u);
}

TEST(RunInitTest, DeterministicReport) {
  Config c = Deterministic();
  c.world.n_drones = 5;
  c.world.obs_noise_sigma = 0.05;
  c.world.seed = 9;
  c.pipeline.false_positives_per_epoch = 1;
  EXPECT_EQ(ToJson(RunInit(c)).dump(), ToJson(RunInit(c)).dump());
}

TEST(RunInitTest, StageTimesWithinTotal) {
  Config c;
  c.world.n_drones = 4;
  c.world.seed = 3;
  c.world.obs_noise_sigma = 0.02;
  const RunReport r = RunInit(c);
  const StageTimes& t = r.times;
  EXPECT_GT(t.total, 0.0);
  EXPECT_LE(t.scan + t.rotation + t.correspondence + t.planning, t.total);
}

TEST(RunInitTest, InvalidConfig) {
  Config c;
  c.pipeline.max_epochs = 0;
  EXPECT_THROW(RunInit(c), Error);
}

TEST(DropNonMutualTest, RemovesUnpairedDetections) {
  WorldConfig wc;
  wc.n_drones = 4;
  wc.seed = 5;
  wc.obs_noise_sigma = 0.02;
  auto [world, truth] = Spawn(wc);
  const EpochRecord clean = ScanEpoch(world, 0);
  const double tol = 6 * std::sqrt(2.0) * 0.02 + 1e-6;
  EXPECT_EQ(DropNonMutual(clean, tol).observations.size(), clean.observations.size());
  const EpochRecord dirty = InjectFalsePositive(clean, 1, {0.3, 0.3, 7.5});
  const EpochRecord kept = DropNonMutual(dirty, tol);
  EXPECT_EQ(kept.observations.size(), clean.observations.size());
}

TEST(ReplayTest, TraceRoundTripReproducesRun) {
  Config c = Deterministic();
  c.world.n_drones = 4;
  c.world.obs_noise_sigma = 0.02;
  c.world.seed = 12;
  std::vector<EpochRecord> trace;
  const RunReport live = RunInit(c, &trace);
  ASSERT_EQ(static_cast<int>(trace.size()), live.epochs);

  std::stringstream buffer;
  WriteTrace(buffer, trace);
  const std::vector<EpochRecord> loaded = ReadTrace(buffer);
  ASSERT_EQ(loaded.size(), trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    EXPECT_EQ(ToJson(loaded[k]).dump(), ToJson(trace[k]).dump());
  }

  const RunReport replayed = Replay(loaded, c);
  EXPECT_EQ(replayed.status, live.status);
  ASSERT_EQ(replayed.iterations.size(), live.iterations.size());
  EXPECT_LT(YawMae(replayed.rotations, live.rotations), 1e-12);
  EXPECT_EQ(replayed.graph.edges.size(), live.graph.edges.size());
}

TEST(ConfigTest, JsonRoundTrip) {
  Config c;
  c.world.n_drones = 6;
  c.world.obstacles = {{{1, 2}, 0.5}};
  c.world.formation = Formation::kRotationSymmetric;
  c.planner.p_explore = 0.25;
  c.pipeline.tau = 5e-4;
  c.benchmark.sigmas = {0.01, 0.3};
  c.benchmark.seed = 77;
  const Json j = ToJson(c);
  EXPECT_EQ(ToJson(ConfigFromJson(j)).dump(), j.dump());
  EXPECT_EQ(ToJson(ConfigFromJson(Json::object())).dump(), ToJson(Config{}).dump());
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  Json j = ToJson(Config{});
  j["world"]["n_drone"] = 3;
  try {
    ConfigFromJson(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
  j = ToJson(Config{});
  j["planner"]["move_cap_ratio"] = 0.7;
  EXPECT_THROW(ConfigFromJson(j), Error);
  j = ToJson(Config{});
  j["world"]["formation"] = "hexagon";
  EXPECT_THROW(ConfigFromJson(j), Error);
}

TEST(BenchmarkTest, SmallestGrid) {
  Config c = Deterministic();
  c.benchmark.n_drones = {2};
  c.benchmark.sigmas = {0.0};
  c.benchmark.trials = 1;
  const auto rows = ToRows(RunBenchmarkTrials(c));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, "SDP");
  EXPECT_EQ(rows[1].method, "LM");
  EXPECT_EQ(rows[2].method, "GN");
  for (const auto& r : rows) {
    EXPECT_LT(r.yaw_mae, 1e-6) << r.method;
    EXPECT_EQ(r.n_drones, 2);
    EXPECT_EQ(r.solve_time, 0.0);
  }
  const std::string csv = ToCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,n_drones,sigma,trial,yaw_mae,solve_time,converged");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(BenchmarkTest, ThreadsDoNotChangeResults) {
  Config c = Deterministic();
  c.benchmark.n_drones = {3, 5};
  c.benchmark.sigmas = {0.05};
  c.benchmark.trials = 4;
  const std::string serial = ToCsv(ToRows(RunBenchmarkTrials(c)));
  c.benchmark.threads = 3;
  EXPECT_EQ(ToCsv(ToRows(RunBenchmarkTrials(c))), serial);
  EXPECT_EQ(ToCsv(ToRows(RunBenchmarkTrials(c))), serial);
}

TEST(SerializationTest, SolutionAndQ) {
  const auto scene = MakeBenchmarkScene(Config{}, 3, 0.0, 1);
  const QMatrix q = BuildQ(scene.records);
  const Json jq = ToJson(q);
  EXPECT_EQ(jq["n"], 3);
  EXPECT_EQ(jq["q"].size(), 6u);
  EXPECT_EQ(jq["q"][0].size(), 6u);
  const Json js = ToJson(SolveSdp(q));
  for (const char* key : {"z", "objective", "numeric_rank", "complete", "rotations"}) {
    EXPECT_TRUE(js.contains(key)) << key;
  }
}

}  // namespace
}  // namespace swarminit
