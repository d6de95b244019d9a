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

#include "swarminit/baselines.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swarminit/pipeline.hpp"

namespace swarminit {
namespace {

BenchmarkScene Scene(int n, double sigma, std::uint64_t seed) {
  Config config;
  return MakeBenchmarkScene(config, n, sigma, seed);
}

YawVector RandomYaws(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  YawVector out(n);
  for (int i = 1; i < n; ++i) out[i] = Rotation2(angle(rng));
  return out;
}

using Solver = LocalSolveReport (*)(const QMatrix&, const YawVector&, const LocalSolveOptions&);

// Parameterized by name so test ids stay stable.
class LocalSolverTest : public ::testing::TestWithParam<std::string> {
 protected:
  LocalSolveReport Solve(const QMatrix& q, const YawVector& init,
                         const LocalSolveOptions& options = {}) const {
    const Solver solver = GetParam() == "Gn" ? &SolveGn : &SolveLm;
    return solver(q, init, options);
  }
};

TEST(ObjectiveAndJacobianTest, ZeroCost) {
  const auto [f, g] = ObjectiveAndJacobian(YawsFromAngles({0, 1, 2}), QMatrix::Zero(3));
  EXPECT_EQ(f, 0.0);
  EXPECT_TRUE(g.isZero(0));
}

TEST(ObjectiveAndJacobianTest, TwoDroneMinimumAtTruth) {
  const auto scene = Scene(2, 0.0, 6);
  const QMatrix q = BuildQ(scene.records);
  const auto [f, g] = ObjectiveAndJacobian(scene.truth.yaws(), q);
  EXPECT_LT(f, 1e-18 * (1 + q.q.norm()));
  EXPECT_LT(g.norm(), 1e-9);
}

TEST(ObjectiveAndJacobianTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const auto scene = Scene(n, 0.1, trial);
    const QMatrix q = BuildQ(scene.records);
    std::vector<double> theta = AnglesOf(RandomYaws(n, rng));
    theta[0] = 0.3;
    const auto [f, g] = ObjectiveAndJacobian(YawsFromAngles(theta), q);
    EXPECT_NEAR(f, RotationObjective(q, YawsFromAngles(theta)), 1e-9 * (1 + std::abs(f)));
    Eigen::VectorXd fd(n);
    for (int i = 0; i < n; ++i) {
      auto plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      fd(i) = (ObjectiveAndJacobian(YawsFromAngles(plus), q).first -
               ObjectiveAndJacobian(YawsFromAngles(minus), q).first) /
              (2 * h);
    }
    EXPECT_LE((fd - g).norm(), 1e-5 * std::max(1.0, g.norm())) << "trial " << trial;
  }
}

TEST(ObjectiveAndJacobianTest, LengthMismatch) {
  EXPECT_THROW(ObjectiveAndJacobian(YawsFromAngles({0, 1}), QMatrix::Zero(3)), Error);
}

TEST_P(LocalSolverTest, ZeroCostConverges) {
  const LocalSolveReport r = Solve(QMatrix::Zero(3), YawsFromAngles({0, 1, 2}));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.objective, 0.0);
}

TEST_P(LocalSolverTest, StaysAtTruth) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto scene = Scene(2 + seed % 7, 0.0, seed);
    const LocalSolveReport r = Solve(BuildQ(scene.records), scene.truth.yaws());
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 2);
    EXPECT_LT(YawMae(r.yaws, scene.truth.yaws()), 1e-8);
    EXPECT_EQ(r.yaws[0].theta(), 0.0);
  }
}

TEST_P(LocalSolverTest, NeverBelowRelaxation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto scene = Scene(3, 0.0, seed);
    const QMatrix q = BuildQ(scene.records);
    const LocalSolveReport r = Solve(q, YawVector(3));
    EXPECT_GE(r.objective, SolveSdp(q).objective - 1e-9);
  }
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 2 + seed % 7;
    const auto scene = Scene(n, 0.1, seed);
    const QMatrix q = BuildQ(scene.records);
    const LocalSolveReport r = Solve(q, RandomYaws(n, rng));
    EXPECT_GE(r.objective, SolveSdp(q).objective - 1e-6);
  }
}

TEST_P(LocalSolverTest, GetsStuckSometimes) {
  std::mt19937_64 rng(8);
  int stuck = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto scene = Scene(8, 0.10, 1000 + trial);
    const QMatrix q = BuildQ(scene.records);
    const LocalSolveReport r = Solve(q, RandomYaws(8, rng));
    if (r.objective > 1.01 * SolveSdp(q).objective) ++stuck;
  }
  EXPECT_GE(stuck, 1);
}

// Every solver run is deterministic, so the objective after k iterations is
// the k-th point of the trajectory.
TEST_P(LocalSolverTest, ObjectiveNeverIncreases) {
  std::mt19937_64 rng(12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 3 + seed % 6;
    const auto scene = Scene(n, 0.05, seed);
    const QMatrix q = BuildQ(scene.records);
    const YawVector init = RandomYaws(n, rng);
    double previous = RotationObjective(q, init);
    for (int k = 1; k <= 30; ++k) {
      LocalSolveOptions options;
      options.max_iterations = k;
      const double f = Solve(q, init, options).objective;
      EXPECT_LE(f, previous + 1e-12 * (1 + previous));
      previous = f;
    }
  }
}

TEST_P(LocalSolverTest, LengthMismatch) {
  EXPECT_THROW(Solve(QMatrix::Zero(3), YawVector(2)), Error);
}

INSTANTIATE_TEST_SUITE_P(Solvers, LocalSolverTest, ::testing::Values("Gn", "Lm"),
                         [](const auto& info) { return info.param; });

}  // namespace
}  // namespace swarminit
