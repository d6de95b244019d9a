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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <tuple>

namespace swarminit {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Streams split off the world seed.
constexpr std::uint64_t kPlanStream = 1;
constexpr std::uint64_t kFalsePositiveStream = 2;
constexpr std::uint64_t kBenchMoveStream = 3;
constexpr std::uint64_t kBenchInitStream = 4;

double MutualTolerance(double sigma) { return 6.0 * std::sqrt(2.0) * sigma + 1e-6; }

// Keeps observations whose assigned identity assigned the observer back at
// the same epoch.
std::vector<EpochRecord> KeepMutuallyMatched(const std::vector<EpochRecord>& records,
                                             const Correspondences& corr) {
  std::map<ObservationRef, int> identity;
  std::set<std::tuple<int, int, int>> claims;  // (epoch, observer, identity)
  for (const auto& m : corr.matrices) {
    for (int r = 0; r < static_cast<int>(m.rows.size()); ++r) {
      if (auto id = m.IdentityOf(r)) {
        identity[m.rows[r]] = *id;
        claims.emplace(m.epoch, m.owner, *id);
      }
    }
  }
  std::vector<EpochRecord> out;
  for (const auto& rec : records) {
    EpochRecord kept = rec;
    kept.observations.clear();
    for (const auto& o : rec.observations) {
      auto it = identity.find(ObservationRef{o.epoch, o.observer, o.track});
      if (it != identity.end() && claims.count({o.epoch, it->second, o.observer})) {
        kept.observations.push_back(o);
      }
    }
    out.push_back(std::move(kept));
  }
  return out;
}

std::size_t CountObservations(const std::vector<EpochRecord>& records) {
  std::size_t n = 0;
  for (const auto& r : records) n += r.observations.size();
  return n;
}

bool StopRuleFires(const SolveOutcome& out, const PipelineParams& params) {
  return out.sdp.complete && out.recovery.unreachable.empty() &&
         out.sdp.objective <= params.tau * static_cast<double>(out.used.size());
}

void FillFinal(RunReport& report, const SolveOutcome& out) {
  report.rotations = out.sdp.rotations;
  report.translations = out.recovery.translations;
  report.graph = out.recovery.graph;
  report.unreachable = out.recovery.unreachable;
}

EpochRecord AddFalsePositives(EpochRecord rec, int count, double range,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = rec.n_drones();
  for (int f = 0; f < count; ++f) {
    const int observer = std::min(n - 1, static_cast<int>(unit(rng) * n));
    const double azimuth = -kPi + 2.0 * kPi * unit(rng);
    const double dist = 1.0 + (std::max(range, 1.0) - 1.0) * unit(rng);
    const double height = -1.0 + 2.0 * unit(rng);
    const Eigen::Vector3d v(dist * std::cos(azimuth), dist * std::sin(azimuth), height);
    rec = InjectFalsePositive(std::move(rec), observer, v);
  }
  return rec;
}

void PlanAndMove(World& world, const EpochRecord& seen, const PlannerParams& params,
                 std::mt19937_64& rng) {
  for (int i = 0; i < world.size(); ++i) {
    PlanContext ctx;
    ctx.self_position = seen.odometry.positions[i];
    ctx.params = params;
    ctx.obstacles = world.LocalObstacles(i);
    for (const auto& o : seen.ObservationsOf(i)) {
      ctx.local_observations.push_back(ApplyYaw(seen.odometry.yaws[i], o.vector));
    }
    Eigen::Vector3d target = SelectTarget(ctx, rng);
    if ((target - ctx.self_position).norm() == 0.0) continue;
    try {
      target = AdjustForObstacles(target, ctx.obstacles, params.clearance, ctx.self_position);
    } catch (const Error&) {
      continue;
    }
    const bool unsafe = std::any_of(
        ctx.local_observations.begin(), ctx.local_observations.end(),
        [&](const Eigen::Vector3d& o) {
          return (target - ctx.self_position - o).head<2>().norm() < params.d_safe;
        });
    if (unsafe) continue;
    std::vector<Eigen::Vector3d> path;
    try {
      path = PlanPath(ctx.self_position, target, ctx.obstacles, params.clearance);
    } catch (const Error&) {
      continue;
    }
    MoveDrone(world, i, path);
  }
}

MatchStats ScoreMatches(const World& world, const std::vector<EpochRecord>& raw,
                        const Correspondences& corr) {
  MatchStats stats;
  for (const auto& rec : raw) {
    for (const auto& ids : world.TrackIdentities(rec.epoch)) {
      stats.true_observations += static_cast<int>(ids.size());
    }
  }
  for (const auto& m : corr.matrices) {
    const auto& ids = world.TrackIdentities(m.epoch)[m.owner];
    for (int r = 0; r < static_cast<int>(m.rows.size()); ++r) {
      const auto id = m.IdentityOf(r);
      if (!id) continue;
      const int track = m.rows[r].track;
      if (track >= static_cast<int>(ids.size())) {
        ++stats.spurious_matched;
      } else if (ids[track] == *id) {
        ++stats.correct;
      } else {
        ++stats.wrong;
      }
    }
  }
  return stats;
}

double TranslationRmse(const std::vector<std::optional<Eigen::Vector3d>>& estimate,
                       const std::vector<Eigen::Vector3d>& truth) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < estimate.size() && i < truth.size(); ++i) {
    if (!estimate[i]) continue;
    sum += (*estimate[i] - truth[i]).squaredNorm();
    ++count;
  }
  return count ? std::sqrt(sum / count) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void Validate(const Config& config) {
  Validate(config.world);
  Validate(config.planner);
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  const auto& p = config.pipeline;
  if (p.min_num_observations < 1) fail("min_num_observations must be at least 1");
  if (p.max_epochs < 1) fail("max_epochs must be at least 1");
  if (!(p.tau >= 0)) fail("tau must be non-negative");
  if (!(p.rank_tolerance > 0 && p.rank_tolerance < 1)) fail("rank_tolerance must be in (0, 1)");
  if (!(p.solver_tolerance > 0)) fail("solver_tolerance must be positive");
  if (!(p.gate_min >= 0)) fail("gate_min must be non-negative");
  if (p.false_positives_per_epoch < 0) fail("false_positives_per_epoch must be >= 0");
  const auto& b = config.benchmark;
  if (b.n_drones.empty() || b.sigmas.empty()) fail("benchmark grid is empty");
  for (int n : b.n_drones) {
    if (n < 2 || n > 64) fail("benchmark n_drones must be in [2, 64]");
  }
  for (double s : b.sigmas) {
    if (!(s >= 0)) fail("benchmark sigmas must be non-negative");
  }
  if (b.trials < 1) fail("benchmark trials must be at least 1");
  if (b.epochs < 0) fail("benchmark epochs must be >= 0");
  if (!(b.move_distance >= 0)) fail("benchmark move_distance must be >= 0");
  if (b.threads < 1) fail("benchmark threads must be at least 1");
}

EpochRecord DropNonMutual(const EpochRecord& record, double tolerance) {
  EpochRecord out = record;
  out.observations.clear();
  for (const auto& o : record.observations) {
    const double range = o.vector.norm();
    const bool partner = std::any_of(
        record.observations.begin(), record.observations.end(), [&](const Observation& q) {
          return q.observer != o.observer &&
                 std::abs(q.vector.norm() - range) <= tolerance &&
                 std::abs(q.vector.z() + o.vector.z()) <= tolerance;
        });
    if (partner) out.observations.push_back(o);
  }
  return out;
}

SolveOutcome SolveEpochs(const std::vector<EpochRecord>& records, double sigma,
                         const PipelineParams& params) {
  SolveOutcome out;
  SdpOptions options;
  options.tolerance = params.solver_tolerance;
  options.rank_tolerance = params.rank_tolerance;

  if (params.reject_outliers) {
    for (const auto& r : records) out.used.push_back(DropNonMutual(r, MutualTolerance(sigma)));
  } else {
    out.used = records;
  }

  auto solve = [&] {
    auto t0 = Clock::now();
    out.sdp = SolveSdp(BuildQ(out.used), options);
    out.rotation_time += Seconds(t0);
    t0 = Clock::now();
    const double gate = DefaultGate(sigma, out.sdp, out.used, params.gate_min);
    out.correspondences = MatchObservations(out.used, out.sdp.rotations, gate);
    out.correspondence_time += Seconds(t0);
  };
  solve();

  if (params.reject_outliers) {
    auto kept = KeepMutuallyMatched(out.used, out.correspondences);
    const std::size_t before = CountObservations(out.used);
    const std::size_t after = CountObservations(kept);
    if (after < before && 2 * after >= before) {
      // A thinned problem can leave the top eigenspace degenerate; the first
      // solve stands in that case.
      SolveOutcome first = out;
      out.used = std::move(kept);
      try {
        solve();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateBlock) throw;
        first.rotation_time = out.rotation_time;
        first.correspondence_time = out.correspondence_time;
        out = std::move(first);
      }
    }
  }

  const auto t0 = Clock::now();
  try {
    out.recovery = FuseAndRecover(out.correspondences, out.used, out.sdp.rotations);
  } catch (const DisconnectedGraph& e) {
    out.recovery = e.partial();
  }
  out.correspondence_time += Seconds(t0);
  return out;
}

namespace {

// An iteration whose relaxed solution has no usable rotation for some drone
// is skipped; the loop carries on with the next epoch.
std::optional<SolveOutcome> TrySolve(const std::vector<EpochRecord>& records, double sigma,
                                     const PipelineParams& params) {
  try {
    return SolveEpochs(records, sigma, params);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateBlock) throw;
    return std::nullopt;
  }
}

}  // namespace

RunReport RunInit(const Config& config, std::vector<EpochRecord>* trace) {
  Validate(config);
  const auto start = Clock::now();
  const auto& params = config.pipeline;
  auto [world, truth] = Spawn(config.world);
  std::mt19937_64 plan_rng(DeriveSeed(config.world.seed, kPlanStream));
  std::mt19937_64 fp_rng(DeriveSeed(config.world.seed, kFalsePositiveStream));
  const double sigma = config.world.obs_noise_sigma;

  RunReport report;
  std::vector<EpochRecord> raw;
  std::optional<SolveOutcome> last;
  bool stopped = false;
  for (int e = 0; e < params.max_epochs && !stopped; ++e) {
    auto t0 = Clock::now();
    EpochRecord rec = ScanEpoch(world, e);
    rec = AddFalsePositives(std::move(rec), params.false_positives_per_epoch,
                            config.world.sensor_range, fp_rng);
    report.times.scan += Seconds(t0);
    raw.push_back(rec);
    if (trace) trace->push_back(rec);

    if (static_cast<int>(raw.size()) >= params.min_num_observations) {
      if (auto out = TrySolve(raw, sigma, params)) {
        last = std::move(out);
        report.times.rotation += last->rotation_time;
        report.times.correspondence += last->correspondence_time;
        report.iterations.push_back({static_cast<int>(raw.size()), last->sdp.objective,
                                     last->sdp.numeric_rank, last->sdp.complete});
        stopped = StopRuleFires(*last, params);
      }
    }
    if (stopped || e + 1 == params.max_epochs) break;

    t0 = Clock::now();
    const EpochRecord seen =
        params.reject_outliers ? DropNonMutual(rec, MutualTolerance(sigma)) : rec;
    PlanAndMove(world, seen, config.planner, plan_rng);
    report.times.planning += Seconds(t0);
  }

  report.epochs = static_cast<int>(raw.size());
  if (last) {
    FillFinal(report, *last);
    report.yaw_mae = YawMae(GaugeFix(report.rotations), truth.yaws());
    report.translation_rmse = TranslationRmse(report.translations, truth.translations());
    report.matches = ScoreMatches(world, raw, last->correspondences);
  }
  if (stopped) {
    report.status = "converged";
  } else {
    report.status = "max_epochs_exceeded";
    report.reason = !last ? "fewer epochs than min_num_observations"
                          : "stopping rule did not fire within " +
                                std::to_string(params.max_epochs) + " epochs";
  }
  report.times.total = Seconds(start);
  if (!params.record_wall_times) report.times = StageTimes{};
  return report;
}

RunReport Replay(const std::vector<EpochRecord>& trace, const Config& config) {
  if (trace.empty()) throw Error(ErrorCode::kEmptyInput, "empty trace");
  const auto start = Clock::now();
  const auto& params = config.pipeline;
  RunReport report;
  std::optional<SolveOutcome> last;
  bool stopped = false;
  std::vector<EpochRecord> prefix;
  for (const auto& rec : trace) {
    prefix.push_back(rec);
    if (static_cast<int>(prefix.size()) < params.min_num_observations) continue;
    auto out = TrySolve(prefix, config.world.obs_noise_sigma, params);
    if (!out) continue;
    last = std::move(out);
    report.times.rotation += last->rotation_time;
    report.times.correspondence += last->correspondence_time;
    report.iterations.push_back({static_cast<int>(prefix.size()), last->sdp.objective,
                                 last->sdp.numeric_rank, last->sdp.complete});
    if ((stopped = StopRuleFires(*last, params))) break;
  }
  report.epochs = static_cast<int>(prefix.size());
  if (last) FillFinal(report, *last);
  report.status = stopped ? "converged" : "max_epochs_exceeded";
  if (!stopped) report.reason = "stopping rule did not fire on the recorded trace";
  report.times.total = Seconds(start);
  if (!params.record_wall_times) report.times = StageTimes{};
  return report;
}

BenchmarkScene MakeBenchmarkScene(const Config& config, int n_drones, double sigma,
                                  std::uint64_t seed) {
  WorldConfig wc = config.world;
  wc.n_drones = n_drones;
  wc.obs_noise_sigma = sigma;
  wc.seed = seed;
  wc.formation = Formation::kRandom;
  auto [world, truth] = Spawn(wc);
  std::mt19937_64 rng(DeriveSeed(seed, kBenchMoveStream));
  std::uniform_real_distribution<double> heading(-kPi, kPi);
  const int epochs = config.benchmark.epochs > 0 ? config.benchmark.epochs : 2 * n_drones;
  const double step = config.benchmark.move_distance;

  BenchmarkScene scene;
  scene.truth = truth;
  for (int e = 0; e < epochs; ++e) {
    scene.records.push_back(ScanEpoch(world, e));
    scene.identities.push_back(world.TrackIdentities(e));
    if (e + 1 == epochs) break;
    for (int i = 0; i < n_drones; ++i) {
      const Eigen::Vector3d here = world.arena_pose(i).position;
      for (int attempt = 0; attempt < 20; ++attempt) {
        const double a = heading(rng);
        const Eigen::Vector3d there = here + step * Eigen::Vector3d(std::cos(a), std::sin(a), 0);
        const bool in_arena = there.x() >= wc.arena.min.x() && there.x() <= wc.arena.max.x() &&
                              there.y() >= wc.arena.min.y() && there.y() <= wc.arena.max.y();
        if (!in_arena) continue;
        bool ok = true;
        for (const auto& c : wc.obstacles) {
          ok = ok && (there.head<2>() - c.center).norm() > c.radius;
        }
        for (int k = 0; k < n_drones && ok; ++k) {
          if (k == i) continue;
          ok = (world.arena_pose(k).position - there).head<2>().norm() >=
               wc.min_spawn_separation;
        }
        if (!ok) continue;
        const Eigen::Vector3d waypoint = world.ArenaToOdometry(i, there);
        MoveDrone(world, i, std::span<const Eigen::Vector3d>(&waypoint, 1));
        break;
      }
    }
  }
  return scene;
}

std::vector<BenchmarkTrial> RunBenchmarkTrials(const Config& config) {
  Validate(config);
  const auto& bench = config.benchmark;
  const bool timed = config.pipeline.record_wall_times;

  std::vector<BenchmarkTrial> trials;
  for (int n : bench.n_drones) {
    for (double sigma : bench.sigmas) {
      for (int t = 0; t < bench.trials; ++t) {
        BenchmarkTrial trial;
        trial.n_drones = n;
        trial.sigma = sigma;
        trial.trial = t;
        trials.push_back(trial);
      }
    }
  }

  SdpOptions sdp_options;
  sdp_options.tolerance = config.pipeline.solver_tolerance;
  sdp_options.rank_tolerance = config.pipeline.rank_tolerance;

  auto run = [&](BenchmarkTrial& trial) {
    // The scene depends on (n, trial) only, so every sigma replays the same
    // trajectories.
    const std::uint64_t seed =
        DeriveSeed(bench.seed, static_cast<std::uint64_t>(trial.n_drones) * 100000u +
                                   static_cast<std::uint64_t>(trial.trial));
    const BenchmarkScene scene = MakeBenchmarkScene(config, trial.n_drones, trial.sigma, seed);
    const QMatrix q = BuildQ(scene.records);
    const YawVector truth = scene.truth.yaws();

    auto t0 = Clock::now();
    const SdpSolution sol = SolveSdp(q, sdp_options);
    trial.sdp.solve_time = timed ? Seconds(t0) : 0.0;
    trial.sdp.yaw_mae = YawMae(sol.rotations, truth);
    trial.sdp.converged = sol.converged;
    trial.sdp.objective = sol.objective;
    trial.sdp_rank = sol.numeric_rank;

    std::mt19937_64 init_rng(DeriveSeed(seed, kBenchInitStream));
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    YawVector init(trial.n_drones);
    for (int i = 1; i < trial.n_drones; ++i) init[i] = Rotation2(angle(init_rng));

    auto local = [&](MethodResult& res, auto&& solver) {
      const auto t1 = Clock::now();
      const LocalSolveReport rep = solver(q, init, LocalSolveOptions{});
      res.solve_time = timed ? Seconds(t1) : 0.0;
      res.yaw_mae = YawMae(rep.yaws, truth);
      res.converged = rep.converged;
      res.objective = rep.objective;
    };
    local(trial.lm, [](auto&&... a) { return SolveLm(a...); });
    local(trial.gn, [](auto&&... a) { return SolveGn(a...); });
  };

  const int threads = std::min<int>(bench.threads, static_cast<int>(trials.size()));
  if (threads <= 1) {
    for (auto& t : trials) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < trials.size();) run(trials[i]);
      });
    }
    for (auto& th : pool) th.join();
  }
  return trials;
}

std::vector<BenchmarkRow> ToRows(const std::vector<BenchmarkTrial>& trials) {
  std::vector<BenchmarkRow> rows;
  for (const auto& t : trials) {
    for (const auto& [name, res] : {std::pair<const char*, const MethodResult&>{"SDP", t.sdp},
                                    {"LM", t.lm},
                                    {"GN", t.gn}}) {
      rows.push_back({name, t.n_drones, t.sigma, t.trial, res.yaw_mae, res.solve_time,
                      res.converged});
    }
  }
  return rows;
}

}  // namespace swarminit
