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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "swarminit/hungarian.hpp"
#include "swarminit/pipeline.hpp"
#include "swarminit/serialization.hpp"

namespace swarminit {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

int failures = 0;

void Report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Scene layout shared by the benchmark criteria: 8 m square arena, 2 m random
// moves between 2N scans.
Config BenchConfig() {
  Config c;
  c.world.arena.min = {-4, -4, 1};
  c.world.arena.max = {4, 4, 2};
  c.world.sensor_range = 8;
  c.benchmark.move_distance = 2.0;
  return c;
}

void NoiselessExactness() {
  const auto start = Clock::now();
  Config c = BenchConfig();
  c.world.sensor_range = 100;  // every drone sees every other
  double worst_yaw = 0, worst_rmse = 0;
  int wrong = 0, unmatched = 0, scenes = 0;
  for (int n = 2; n <= 8; ++n) {
    for (int s = 0; s < 20; ++s, ++scenes) {
      const auto scene = MakeBenchmarkScene(c, n, 0.0, DeriveSeed(101, 1000 * n + s));
      const SolveOutcome out = SolveEpochs(scene.records, 0.0, c.pipeline);
      worst_yaw = std::max(worst_yaw, YawMae(out.sdp.rotations, scene.truth.yaws()));
      double sq = 0;
      for (int i = 0; i < n; ++i) {
        const auto& t = out.recovery.translations[i];
        sq += t ? (*t - scene.truth.poses_t0[i].position).squaredNorm()
                : std::numeric_limits<double>::infinity();
      }
      worst_rmse = std::max(worst_rmse, std::sqrt(sq / n));
      for (const auto& m : out.correspondences.matrices) {
        for (int r = 0; r < static_cast<int>(m.rows.size()); ++r) {
          const auto id = m.IdentityOf(r);
          if (!id) {
            ++unmatched;
          } else if (*id != scene.identities[m.epoch][m.owner][m.rows[r].track]) {
            ++wrong;
          }
        }
      }
    }
  }
  const double secs = Since(start);
  Report(1,
         worst_yaw < 1e-6 && worst_rmse < 1e-6 && wrong == 0 && unmatched == 0 && secs < 60,
         Fmt("%d scenes, worst yaw MAE %.3g rad, worst translation RMSE %.3g m, "
             "%d wrong / %d unmatched correspondences, %.2f s",
             scenes, worst_yaw, worst_rmse, wrong, unmatched, secs));
}

void GridOracle() {
  const auto start = Clock::now();
  Config c = BenchConfig();
  c.world.sensor_range = 100;
  double worst = -std::numeric_limits<double>::infinity();
  const double step = kPi / 360;
  for (int s = 0; s < 10; ++s) {
    const auto scene = MakeBenchmarkScene(c, 3, 0.0, DeriveSeed(202, s));
    const QMatrix q = BuildQ(scene.records);
    const SdpSolution sol = SolveSdp(q);
    double grid = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 720; ++a) {
      for (int b = 0; b < 720; ++b) {
        grid = std::min(grid, RotationObjective(q, YawsFromAngles({0, a * step, b * step})));
      }
    }
    worst = std::max(worst, sol.objective - grid);
  }
  const double secs = Since(start);
  Report(2, worst <= 1e-6 && secs < 300,
         Fmt("max(SDP objective - grid minimum) = %.3g over 10 scenes, %.1f s", worst, secs));
}

void RelaxationBound(const std::vector<BenchmarkTrial>& trials) {
  int violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    const double d = t.sdp.objective - std::min(t.lm.objective, t.gn.objective);
    worst = std::max(worst, d);
    if (t.sdp.objective > t.lm.objective + 1e-6 || t.sdp.objective > t.gn.objective + 1e-6) {
      ++violations;
    }
  }
  Report(3, violations == 0,
         Fmt("%zu trials, %d violations, max(SDP - best local objective) = %.3g",
             trials.size(), violations, worst));
}

std::vector<double> Cell(const std::vector<BenchmarkTrial>& trials, int n, double sigma,
                         double (*field)(const BenchmarkTrial&)) {
  std::vector<double> out;
  for (const auto& t : trials) {
    if (t.n_drones == n && t.sigma == sigma) out.push_back(field(t));
  }
  return out;
}

void NoiseTrend(const std::vector<BenchmarkTrial>& trials) {
  auto cell = [&](int n, double sigma, double (*field)(const BenchmarkTrial&)) {
    return Cell(trials, n, sigma, field);
  };
  const auto sdp_mae = [](const BenchmarkTrial& t) { return t.sdp.yaw_mae; };
  const auto lm_mae = [](const BenchmarkTrial& t) { return t.lm.yaw_mae; };
  const auto gn_mae = [](const BenchmarkTrial& t) { return t.gn.yaw_mae; };
  const double sdp4 = Median(cell(4, 0.05, sdp_mae));
  const double sdp8 = Median(cell(8, 0.05, sdp_mae));
  const double lm8 = Median(cell(8, 0.05, lm_mae));
  const double gn8 = Median(cell(8, 0.05, gn_mae));
  const bool trend = sdp8 <= 1.5 * sdp4;
  const bool local = std::max(lm8, gn8) >= 2 * sdp8;
  Report(5, trend && local,
         Fmt("median SDP MAE N=8 %.4g vs 1.5 x N=4 %.4g (%s); median LM %.4g / GN %.4g vs "
             "2 x SDP %.4g (%s)",
             sdp8, 1.5 * sdp4, trend ? "ok" : "fails", lm8, gn8, 2 * sdp8,
             local ? "ok" : "fails"));
}

void TimingOrder(const std::vector<BenchmarkTrial>& trials) {
  auto cell = [&](int n, double sigma, double (*field)(const BenchmarkTrial&)) {
    return Cell(trials, n, sigma, field);
  };
  const double t_sdp = Mean(cell(8, 0.05, [](const BenchmarkTrial& t) { return t.sdp.solve_time; }));
  const double t_lm = Mean(cell(8, 0.05, [](const BenchmarkTrial& t) { return t.lm.solve_time; }));
  const double t_gn = Mean(cell(8, 0.05, [](const BenchmarkTrial& t) { return t.gn.solve_time; }));
  Report(6, t_sdp < t_lm && t_sdp < t_gn && t_sdp < 1.0,
         Fmt("mean solve time at N=8, sigma 0.05: SDP %.3g s, LM %.3g s, GN %.3g s", t_sdp,
             t_lm, t_gn));
}

void RankDescent() {
  Config c;
  c.benchmark.epochs = 3;
  const int empty_rank = SolveSdp(QMatrix::Zero(4)).numeric_rank;
  int ok = 0;
  std::vector<int> ranks;
  for (int s = 0; s < 20; ++s) {
    const auto scene = MakeBenchmarkScene(c, 4, 0.02, DeriveSeed(404, s));
    const int rank = SolveSdp(BuildQ(scene.records)).numeric_rank;
    ranks.push_back(rank);
    if (empty_rank == 8 && rank <= 5) ++ok;
  }
  std::string trace;
  for (int r : ranks) trace += std::to_string(r);
  Report(4, ok >= 18,
         Fmt("rank with 0 epochs %d; rank <= 5 after 3 epochs in %d/20 trials (%s)", empty_rank,
             ok, trace.c_str()));
}

// Gated assignment by exhaustive enumeration.
double GatedBruteForce(const Eigen::MatrixXd& cost, double gate) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  std::vector<char> used(cols, 0);
  std::function<double(int)> best = [&](int r) -> double {
    if (r == rows) return 0.0;
    double out = gate + best(r + 1);
    for (int col = 0; col < cols; ++col) {
      if (used[col] || !(cost(r, col) <= gate)) continue;
      used[col] = 1;
      out = std::min(out, cost(r, col) + best(r + 1));
      used[col] = 0;
    }
    return out;
  };
  return best(0);
}

void HungarianCriterion() {
  Config c = BenchConfig();
  double slowest = 0;
  for (int s = 0; s < 20; ++s) {
    const auto scene = MakeBenchmarkScene(c, 4, 0.02, DeriveSeed(707, s));
    const YawVector yaws = scene.truth.yaws();
    for (const auto& r : scene.records) {
      const std::vector<EpochRecord> one{r};
      const auto t0 = Clock::now();
      const auto m = MatchObservations(one, yaws, 0.5);
      slowest = std::max(slowest, Since(t0));
    }
  }

  std::mt19937_64 rng(7007);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> u(0, 2);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int rows = dim(rng), cols = dim(rng);
    if (rows > cols) std::swap(rows, cols);
    Eigen::MatrixXd cost(rows, cols);
    for (int i = 0; i < cost.size(); ++i) cost.data()[i] = u(rng);
    // Full assignment against every column permutation.
    const auto choice = MinCostAssignment(cost);
    double got = 0;
    for (int r = 0; r < rows; ++r) got += cost(r, choice[r]);
    std::vector<int> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double v = 0;
      for (int r = 0; r < rows; ++r) v += cost(r, perm[r]);
      best = std::min(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (std::abs(got - best) > 1e-9) ++mismatches;
    // Gated variant, including unmatched rows.
    const double gate = 0.5 + 0.5 * (trial % 3);
    if (std::abs(Assign(cost, gate).total_cost - GatedBruteForce(cost, gate)) > 1e-9) {
      ++mismatches;
    }
  }
  Report(7, slowest < 0.010 && mismatches == 0,
         Fmt("slowest N=4 epoch match %.3f ms; %d oracle mismatches in 1000 trials",
             1e3 * slowest, mismatches));
}

void SymmetryBreaking() {
  int reached = 0, first_fails = 0;
  for (int s = 0; s < 20; ++s) {
    Config c;
    c.world.n_drones = 4;
    c.world.formation = Formation::kRotationSymmetric;
    c.world.formation_radius = 3.0;
    c.world.seed = DeriveSeed(808, s);
    c.pipeline.max_epochs = 30;
    c.pipeline.record_wall_times = false;
    std::vector<EpochRecord> trace;
    const RunReport r = RunInit(c, &trace);
    const bool complete = std::any_of(r.iterations.begin(), r.iterations.end(),
                                      [](const IterationRecord& it) { return it.complete; });
    if (complete) ++reached;
    if (!SolveSdp(BuildQ(std::span(trace).first(1))).complete) ++first_fails;
  }
  Report(8, reached >= 18 && first_fails >= 18,
         Fmt("complete within 30 epochs in %d/20; first-epoch certificate fails in %d/20",
             reached, first_fails));
}

void GradientCheck() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 7;
    QMatrix q = QMatrix::Zero(n);
    for (int k = 0; k < 1 + trial % 5; ++k) {
      Eigen::VectorXd v(2 * n);
      for (int i = 0; i < v.size(); ++i) v(i) = u(rng);
      q.q += v * v.transpose();
    }
    std::vector<double> theta(n);
    for (auto& t : theta) t = angle(rng);
    const auto [f, g] = ObjectiveAndJacobian(YawsFromAngles(theta), q);
    Eigen::VectorXd fd(n);
    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
      auto plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      fd(i) = (ObjectiveAndJacobian(YawsFromAngles(plus), q).first -
               ObjectiveAndJacobian(YawsFromAngles(minus), q).first) /
              (2 * h);
    }
    worst = std::max(worst, (fd - g).norm() / std::max(1.0, g.norm()));
  }
  Report(9, worst <= 1e-5, Fmt("worst relative gradient error %.3g over 1000 instances", worst));
}

void FalsePositives() {
  int ok = 0;
  for (int s = 0; s < 20; ++s) {
    Config c;
    c.world.n_drones = 4;
    c.world.obs_noise_sigma = 0.02;
    c.world.seed = DeriveSeed(1010, s);
    c.pipeline.record_wall_times = false;
    const RunReport clean = RunInit(c);
    c.pipeline.false_positives_per_epoch = 1;
    const RunReport dirty = RunInit(c);
    const bool mae_ok = dirty.yaw_mae < 2 * clean.yaw_mae;
    const bool matches_ok = dirty.matches.wrong == 0 &&
                            dirty.matches.correct == dirty.matches.true_observations;
    if (mae_ok && matches_ok) ++ok;
  }
  Report(10, ok >= 16, Fmt("clean-equivalent runs with one spurious detection per epoch: %d/20", ok));
}

void Determinism() {
  Config c;
  c.world.n_drones = 5;
  c.world.obs_noise_sigma = 0.05;
  c.world.seed = 1111;
  c.pipeline.record_wall_times = false;
  c.pipeline.false_positives_per_epoch = 1;
  const bool report_same = ToJson(RunInit(c)).dump() == ToJson(RunInit(c)).dump();
  c.benchmark.n_drones = {3, 6};
  c.benchmark.trials = 3;
  c.benchmark.threads = 2;
  const bool csv_same =
      ToCsv(ToRows(RunBenchmarkTrials(c))) == ToCsv(ToRows(RunBenchmarkTrials(c)));
  Report(11, report_same && csv_same,
         Fmt("report JSON %s, benchmark CSV %s", report_same ? "identical" : "differs",
             csv_same ? "identical" : "differs"));
}

}  // namespace
}  // namespace swarminit

int main() {
  using namespace swarminit;
  NoiselessExactness();
  GridOracle();
  const auto trials = RunBenchmarkTrials(BenchConfig());
  RelaxationBound(trials);
  RankDescent();
  NoiseTrend(trials);
  TimingOrder(trials);
  HungarianCriterion();
  SymmetryBreaking();
  GradientCheck();
  FalsePositives();
  Determinism();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
