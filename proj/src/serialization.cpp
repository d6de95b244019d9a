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

#include "swarminit/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace swarminit {
namespace {

[[noreturn]] void ParseFail(const std::string& what) {
  throw Error(ErrorCode::kParseError, what);
}

using FieldSetter = std::function<void(const Json&)>;

// Applies each key of `j` through its setter; unknown keys are errors.
void ReadFields(const Json& j, const std::string& section,
                const std::map<std::string, FieldSetter>& fields) {
  if (!j.is_object()) ParseFail(section + " must be an object");
  for (const auto& [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) ParseFail("unknown key " + section + "." + key);
    try {
      it->second(value);
    } catch (const Json::exception& e) {
      ParseFail("bad value for " + section + "." + key + ": " + e.what());
    }
  }
}

template <typename T>
FieldSetter Into(T& field) {
  return [&field](const Json& v) { field = v.get<T>(); };
}

Eigen::Vector3d Vec3(const Json& v) {
  const auto a = v.get<std::vector<double>>();
  if (a.size() != 3) ParseFail("expected a 3-vector");
  return {a[0], a[1], a[2]};
}

Eigen::Vector2d Vec2(const Json& v) {
  const auto a = v.get<std::vector<double>>();
  if (a.size() != 2) ParseFail("expected a 2-vector");
  return {a[0], a[1]};
}

Json Arr(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json Arr(const Eigen::Vector2d& v) { return Json::array({v.x(), v.y()}); }

// NaN has no JSON spelling.
Json Num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json Matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Num(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json Angles(const YawVector& yaws) {
  Json out = Json::array();
  for (const auto& r : yaws) out.push_back(r.theta());
  return out;
}

const char* FormationName(Formation f) {
  return f == Formation::kRotationSymmetric ? "rotation_symmetric" : "random";
}

}  // namespace

Config ConfigFromJson(const Json& j) {
  Config c;
  std::map<std::string, FieldSetter> sections;
  auto& w = c.world;
  sections["world"] = [&](const Json& s) {
    ReadFields(s, "world",
               {{"n_drones", Into(w.n_drones)},
                {"arena",
                 [&](const Json& a) {
                   ReadFields(a, "world.arena",
                              {{"min", [&](const Json& v) { w.arena.min = Vec3(v); }},
                               {"max", [&](const Json& v) { w.arena.max = Vec3(v); }}});
                 }},
                {"min_spawn_separation", Into(w.min_spawn_separation)},
                {"sensor_range", Into(w.sensor_range)},
                {"obs_noise_sigma", Into(w.obs_noise_sigma)},
                {"odom_yaw_drift_sigma", Into(w.odom_yaw_drift_sigma)},
                {"odom_position_sigma", Into(w.odom_position_sigma)},
                {"seed", Into(w.seed)},
                {"obstacles",
                 [&](const Json& list) {
                   w.obstacles.clear();
                   for (const auto& o : list) {
                     Circle circle;
                     ReadFields(o, "world.obstacles[]",
                                {{"center", [&](const Json& v) { circle.center = Vec2(v); }},
                                 {"radius", Into(circle.radius)}});
                     w.obstacles.push_back(circle);
                   }
                 }},
                {"formation",
                 [&](const Json& v) {
                   const auto name = v.get<std::string>();
                   if (name == "random") {
                     w.formation = Formation::kRandom;
                   } else if (name == "rotation_symmetric") {
                     w.formation = Formation::kRotationSymmetric;
                   } else {
                     ParseFail("unknown formation " + name);
                   }
                 }},
                {"formation_radius", Into(w.formation_radius)}});
  };
  auto& p = c.planner;
  sections["planner"] = [&](const Json& s) {
    ReadFields(s, "planner",
               {{"d_safe", Into(p.d_safe)},
                {"move_cap_ratio", Into(p.move_cap_ratio)},
                {"p_explore", Into(p.p_explore)},
                {"clearance", Into(p.clearance)},
                {"max_step", Into(p.max_step)},
                {"min_step", Into(p.min_step)}});
  };
  auto& pl = c.pipeline;
  sections["pipeline"] = [&](const Json& s) {
    ReadFields(s, "pipeline",
               {{"min_num_observations", Into(pl.min_num_observations)},
                {"max_epochs", Into(pl.max_epochs)},
                {"tau", Into(pl.tau)},
                {"rank_tolerance", Into(pl.rank_tolerance)},
                {"solver_tolerance", Into(pl.solver_tolerance)},
                {"gate_min", Into(pl.gate_min)},
                {"reject_outliers", Into(pl.reject_outliers)},
                {"false_positives_per_epoch", Into(pl.false_positives_per_epoch)},
                {"record_wall_times", Into(pl.record_wall_times)}});
  };
  auto& b = c.benchmark;
  sections["benchmark"] = [&](const Json& s) {
    ReadFields(s, "benchmark",
               {{"n_drones", Into(b.n_drones)},
                {"sigmas", Into(b.sigmas)},
                {"trials", Into(b.trials)},
                {"epochs", Into(b.epochs)},
                {"move_distance", Into(b.move_distance)},
                {"seed", Into(b.seed)},
                {"threads", Into(b.threads)}});
  };
  ReadFields(j, "config", sections);
  Validate(c);
  return c;
}

Config LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) ParseFail("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    ParseFail(path + ": " + e.what());
  }
  return ConfigFromJson(j);
}

Json ToJson(const Config& c) {
  Json obstacles = Json::array();
  for (const auto& o : c.world.obstacles) {
    obstacles.push_back({{"center", Arr(o.center)}, {"radius", o.radius}});
  }
  const auto& w = c.world;
  const auto& p = c.planner;
  const auto& pl = c.pipeline;
  const auto& b = c.benchmark;
  return {
      {"world",
       {{"n_drones", w.n_drones},
        {"arena", {{"min", Arr(w.arena.min)}, {"max", Arr(w.arena.max)}}},
        {"min_spawn_separation", w.min_spawn_separation},
        {"sensor_range", w.sensor_range},
        {"obs_noise_sigma", w.obs_noise_sigma},
        {"odom_yaw_drift_sigma", w.odom_yaw_drift_sigma},
        {"odom_position_sigma", w.odom_position_sigma},
        {"seed", w.seed},
        {"obstacles", obstacles},
        {"formation", FormationName(w.formation)},
        {"formation_radius", w.formation_radius}}},
      {"planner",
       {{"d_safe", p.d_safe},
        {"move_cap_ratio", p.move_cap_ratio},
        {"p_explore", p.p_explore},
        {"clearance", p.clearance},
        {"max_step", p.max_step},
        {"min_step", p.min_step}}},
      {"pipeline",
       {{"min_num_observations", pl.min_num_observations},
        {"max_epochs", pl.max_epochs},
        {"tau", pl.tau},
        {"rank_tolerance", pl.rank_tolerance},
        {"solver_tolerance", pl.solver_tolerance},
        {"gate_min", pl.gate_min},
        {"reject_outliers", pl.reject_outliers},
        {"false_positives_per_epoch", pl.false_positives_per_epoch},
        {"record_wall_times", pl.record_wall_times}}},
      {"benchmark",
       {{"n_drones", b.n_drones},
        {"sigmas", b.sigmas},
        {"trials", b.trials},
        {"epochs", b.epochs},
        {"move_distance", b.move_distance},
        {"seed", b.seed},
        {"threads", b.threads}}}};
}

Json ToJson(const EpochRecord& r) {
  Json positions = Json::array();
  for (const auto& p : r.odometry.positions) positions.push_back(Arr(p));
  Json observations = Json::array();
  for (const auto& o : r.observations) {
    observations.push_back({{"observer", o.observer},
                            {"epoch", o.epoch},
                            {"vector", Arr(o.vector)},
                            {"track", o.track}});
  }
  return {{"epoch", r.epoch},
          {"odometry", {{"yaws", Angles(r.odometry.yaws)}, {"positions", positions}}},
          {"observations", observations}};
}

EpochRecord EpochRecordFromJson(const Json& j) {
  EpochRecord r;
  try {
    r.epoch = j.at("epoch").get<int>();
    r.odometry.yaws = YawsFromAngles(j.at("odometry").at("yaws").get<std::vector<double>>());
    for (const auto& p : j.at("odometry").at("positions")) {
      r.odometry.positions.push_back(Vec3(p));
    }
    for (const auto& o : j.at("observations")) {
      r.observations.push_back(Observation{o.at("observer").get<int>(), o.at("epoch").get<int>(),
                                           Vec3(o.at("vector")), o.at("track").get<int>()});
    }
  } catch (const Json::exception& e) {
    ParseFail(std::string("bad epoch record: ") + e.what());
  }
  if (r.odometry.positions.size() != r.odometry.yaws.size()) {
    throw Error(ErrorCode::kLengthMismatch, "odometry yaws and positions differ in length");
  }
  return r;
}

void WriteTrace(std::ostream& out, const std::vector<EpochRecord>& records) {
  for (const auto& r : records) out << ToJson(r).dump() << '\n';
}

std::vector<EpochRecord> ReadTrace(std::istream& in) {
  std::vector<EpochRecord> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      ParseFail("trace line " + std::to_string(number) + ": " + e.what());
    }
    out.push_back(EpochRecordFromJson(j));
  }
  return out;
}

Json ToJson(const QMatrix& q) {
  return {{"q", Matrix(q.q)}, {"n", q.n}, {"n_epochs", q.n_epochs}};
}

Json ToJson(const SdpSolution& s) {
  return {{"z", Matrix(s.z)},
          {"objective", Num(s.objective)},
          {"numeric_rank", s.numeric_rank},
          {"complete", s.complete},
          {"rotations", Angles(s.rotations)},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"duality_gap", Num(s.duality_gap)},
          {"primal_residual", Num(s.primal_residual)},
          {"dual_residual", Num(s.dual_residual)}};
}

Json ToJson(const CorrespondenceGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"vector", Arr(e.vector)},
                     {"cost", Num(e.cost)},
                     {"spread", Num(e.spread)},
                     {"support", e.support}});
  }
  return {{"n_nodes", g.n_nodes}, {"edges", edges}};
}

Json ToJson(const RunReport& r) {
  Json iterations = Json::array();
  for (const auto& it : r.iterations) {
    iterations.push_back({{"epochs", it.epochs},
                          {"objective", Num(it.objective)},
                          {"numeric_rank", it.numeric_rank},
                          {"complete", it.complete}});
  }
  Json translations = Json::array();
  for (const auto& t : r.translations) {
    translations.push_back(t ? Arr(*t) : Json(nullptr));
  }
  return {{"iterations", iterations},
          {"rotations", Angles(r.rotations)},
          {"translations", translations},
          {"graph", ToJson(r.graph)},
          {"unreachable", r.unreachable},
          {"yaw_mae", Num(r.yaw_mae)},
          {"translation_rmse", Num(r.translation_rmse)},
          {"matches",
           {{"true_observations", r.matches.true_observations},
            {"correct", r.matches.correct},
            {"wrong", r.matches.wrong},
            {"spurious_matched", r.matches.spurious_matched}}},
          {"times",
           {{"scan", r.times.scan},
            {"rotation", r.times.rotation},
            {"correspondence", r.times.correspondence},
            {"planning", r.times.planning},
            {"total", r.times.total}}},
          {"epochs", r.epochs},
          {"status", r.status},
          {"reason", r.reason}};
}

std::string ToCsv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "method,n_drones,sigma,trial,yaw_mae,solve_time,converged\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.6g,%d,%.10e,%.9f,%s\n", r.method.c_str(),
                  r.n_drones, r.sigma, r.trial, r.yaw_mae, r.solve_time,
                  r.converged ? "true" : "false");
    out << buf;
  }
  return out.str();
}

}  // namespace swarminit
