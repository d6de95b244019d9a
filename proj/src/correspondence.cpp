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

#include "swarminit/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "swarminit/hungarian.hpp"

namespace swarminit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::map<int, const EpochRecord*> IndexByEpoch(std::span<const EpochRecord> records) {
  std::map<int, const EpochRecord*> out;
  for (const auto& r : records) out[r.epoch] = &r;
  return out;
}

const Observation& Lookup(const EpochRecord& record, const ObservationRef& ref) {
  for (const auto& o : record.observations) {
    if (o.observer == ref.observer && o.track == ref.track) return o;
  }
  throw Error(ErrorCode::kEmptyInput, "observation not found in record");
}

double MaxPairwiseDistance(const std::vector<Eigen::Vector3d>& points) {
  double out = 0.0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      out = std::max(out, (points[a] - points[b]).norm());
    }
  }
  return out;
}

Eigen::Vector3d Mean(const std::vector<Eigen::Vector3d>& points) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

std::string JoinIds(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

double MatchCost(const Rotation2& world_yaw_i, const Eigen::Vector3d& p_i,
                 const Rotation2& world_yaw_x, const Eigen::Vector3d& p_x) {
  return (ApplyYaw(world_yaw_i, p_i) + ApplyYaw(world_yaw_x, p_x)).norm();
}

std::vector<CostBlock> BuildCostBlocks(std::span<const EpochRecord> records,
                                       const YawVector& rotations) {
  std::vector<CostBlock> blocks;
  for (const auto& record : records) {
    const int n = record.n_drones();
    if (static_cast<int>(rotations.size()) != n) {
      throw Error(ErrorCode::kLengthMismatch, "rotations do not match the swarm size");
    }
    YawVector world_yaw;
    for (int j = 0; j < n; ++j) {
      world_yaw.push_back(Compose(rotations[j], record.odometry.yaws[j]));
    }
    std::vector<ObservationRef> columns;
    for (const auto& o : record.observations) {
      columns.push_back({record.epoch, o.observer, o.track});
    }
    for (int i = 0; i < n; ++i) {
      CostBlock block;
      block.epoch = record.epoch;
      block.observer = i;
      std::vector<const Observation*> own;
      for (const auto& o : record.observations) {
        if (o.observer == i) {
          own.push_back(&o);
          block.rows.push_back({record.epoch, i, o.track});
        }
      }
      if (own.empty()) continue;
      block.columns = columns;
      block.cost.resize(static_cast<Eigen::Index>(own.size()),
                        static_cast<Eigen::Index>(columns.size()));
      for (std::size_t r = 0; r < own.size(); ++r) {
        for (std::size_t c = 0; c < record.observations.size(); ++c) {
          const auto& other = record.observations[c];
          block.cost(r, c) =
              other.observer == i
                  ? kInf
                  : MatchCost(world_yaw[i], own[r]->vector, world_yaw[other.observer],
                              other.vector);
        }
      }
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

AssignmentSlice Assign(const Eigen::MatrixXd& cost, double gate) {
  if (!(gate >= 0) || !std::isfinite(gate)) {
    throw Error(ErrorCode::kInvalidConfig, "gate must be finite and non-negative");
  }
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  AssignmentSlice slice;
  slice.row_to_col.assign(rows, -1);
  if (rows == 0) return slice;

  // One private dummy column per row, priced at the gate. Any cell above the
  // gate is clamped to a value the dummy always beats.
  const double above_gate = 2.0 * gate + 1.0;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Constant(rows, cols + rows, above_gate);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = cost(r, c);
      if (std::isfinite(v) && v <= gate) padded(r, c) = v;
    }
    padded(r, cols + r) = gate;
  }

  const std::vector<int> choice = MinCostAssignment(padded);
  for (int r = 0; r < rows; ++r) {
    if (choice[r] < cols && padded(r, choice[r]) <= gate) {
      slice.row_to_col[r] = choice[r];
      slice.total_cost += cost(r, choice[r]);
    } else {
      slice.total_cost += gate;
    }
  }
  return slice;
}

std::optional<int> AssignmentMatrix::RowFor(int identity) const {
  for (int r = 0; r < entries.rows(); ++r) {
    if (entries(r, identity) == 1) return r;
  }
  return std::nullopt;
}

std::optional<int> AssignmentMatrix::IdentityOf(int row) const {
  for (int c = 0; c < entries.cols(); ++c) {
    if (entries(row, c) == 1) return c;
  }
  return std::nullopt;
}

Correspondences MatchObservations(std::span<const EpochRecord> records,
                                  const YawVector& rotations, double gate) {
  Correspondences out;
  out.gate = gate;
  out.blocks = BuildCostBlocks(records, rotations);
  const int n = static_cast<int>(rotations.size());

  struct Ballot {
    std::map<int, int> votes;
    std::map<int, double> best_cost;
  };
  std::map<ObservationRef, Ballot> ballots;
  auto cast = [&](const ObservationRef& obs, int identity, double cost) {
    auto& b = ballots[obs];
    ++b.votes[identity];
    auto it = b.best_cost.find(identity);
    if (it == b.best_cost.end() || cost < it->second) b.best_cost[identity] = cost;
  };

  for (const auto& block : out.blocks) {
    AssignmentSlice slice = Assign(block.cost, gate);
    for (std::size_t r = 0; r < slice.row_to_col.size(); ++r) {
      const int c = slice.row_to_col[r];
      if (c < 0) continue;
      const double cost = block.cost(r, c);
      cast(block.rows[r], block.columns[c].observer, cost);
      cast(block.columns[c], block.observer, cost);
    }
    out.slices.push_back(std::move(slice));
  }

  for (const auto& block : out.blocks) {
    AssignmentMatrix m;
    m.owner = block.observer;
    m.epoch = block.epoch;
    m.rows = block.rows;
    m.entries = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(block.rows.size()), n);
    m.costs.assign(block.rows.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < block.rows.size(); ++r) {
      auto it = ballots.find(block.rows[r]);
      if (it == ballots.end()) continue;
      int total = 0;
      for (const auto& [id, count] : it->second.votes) total += count;
      for (const auto& [id, count] : it->second.votes) {
        if (2 * count <= total || id == block.observer) continue;
        const double cost = it->second.best_cost.at(id);
        // Keep column sums <= 1: the cheaper claim on an identity wins.
        if (auto prev = m.RowFor(id)) {
          if (m.costs[*prev] <= cost) continue;
          m.entries(*prev, id) = 0;
          m.costs[*prev] = std::numeric_limits<double>::quiet_NaN();
        }
        m.entries(static_cast<Eigen::Index>(r), id) = 1;
        m.costs[r] = cost;
      }
    }
    out.matrices.push_back(std::move(m));
  }
  return out;
}

double DefaultGate(double sigma, const SdpSolution& solution,
                   std::span<const EpochRecord> records, double floor) {
  double d_max = 0.0;
  double d_sum = 0.0;
  int count = 0;
  for (const auto& r : records) {
    for (const auto& o : r.observations) {
      const double d = o.vector.norm();
      d_max = std::max(d_max, d);
      d_sum += d;
      ++count;
    }
  }
  if (count == 0 || records.empty()) return floor;
  const double d_mean = d_sum / count;
  const double theta_err =
      d_mean > 0 ? std::sqrt(std::max(solution.objective, 0.0) /
                             static_cast<double>(records.size())) /
                       d_mean
                 : 0.0;
  return std::max(floor, 5.0 * sigma + 2.0 * d_max * theta_err);
}

const GraphEdge* CorrespondenceGraph::Find(int from, int to) const {
  for (const auto& e : edges) {
    if (e.from == from && e.to == to) return &e;
  }
  return nullptr;
}

DisconnectedGraph::DisconnectedGraph(TranslationRecovery partial)
    : Error(ErrorCode::kDisconnectedGraph,
            "unreachable drones: " + JoinIds(partial.unreachable)),
      partial_(std::move(partial)) {}

TranslationRecovery FuseAndRecover(const Correspondences& assignments,
                                   std::span<const EpochRecord> records,
                                   const YawVector& rotations) {
  const int n = static_cast<int>(rotations.size());
  const auto by_epoch = IndexByEpoch(records);

  struct Evidence {
    std::vector<Eigen::Vector3d> vectors;
    double cost_sum = 0.0;
  };
  std::map<std::pair<int, int>, Evidence> evidence;
  for (const auto& m : assignments.matrices) {
    auto rec_it = by_epoch.find(m.epoch);
    if (rec_it == by_epoch.end()) continue;
    const EpochRecord& record = *rec_it->second;
    const int i = m.owner;
    for (int r = 0; r < static_cast<int>(m.rows.size()); ++r) {
      const auto identity = m.IdentityOf(r);
      if (!identity) continue;
      const int y = *identity;
      const Observation& obs = Lookup(record, m.rows[r]);
      // t_y - t_i from observer i's odometry-compensated view.
      const Eigen::Vector3d in_own_frame =
          ApplyYaw(record.odometry.yaws[i], obs.vector) + record.odometry.positions[i];
      const Eigen::Vector3d d = ApplyYaw(rotations[i], in_own_frame) -
                                ApplyYaw(rotations[y], record.odometry.positions[y]);
      auto& ev = evidence[{i, y}];
      ev.vectors.push_back(d);
      ev.cost_sum += m.costs[r];
    }
  }

  TranslationRecovery out;
  out.graph.n_nodes = n;
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& [key, ev] : evidence) {
    GraphEdge e;
    e.from = key.first;
    e.to = key.second;
    e.vector = Mean(ev.vectors);
    e.cost = ev.cost_sum / static_cast<double>(ev.vectors.size());
    e.spread = MaxPairwiseDistance(ev.vectors);
    e.support = static_cast<int>(ev.vectors.size());
    out.graph.edges.push_back(e);
    adjacency[e.from].push_back(e.to);
  }

  out.translations.assign(n, std::nullopt);
  out.spread.assign(n, 0.0);
  if (n == 0) return out;

  // Depth-first preorder from drone 0, smaller ids first.
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    order.push_back(v);
    for (auto it = adjacency[v].rbegin(); it != adjacency[v].rend(); ++it) {
      if (!seen[*it]) stack.push_back(*it);
    }
  }

  out.translations[0] = Eigen::Vector3d::Zero();
  for (std::size_t k = 1; k < order.size(); ++k) {
    const int v = order[k];
    std::vector<Eigen::Vector3d> estimates;
    for (const auto& e : out.graph.edges) {
      if (e.to == v && out.translations[e.from]) {
        estimates.push_back(*out.translations[e.from] + e.vector);
      }
    }
    out.translations[v] = Mean(estimates);
    out.spread[v] = MaxPairwiseDistance(estimates);
  }

  for (int v = 0; v < n; ++v) {
    if (!seen[v]) out.unreachable.push_back(v);
  }
  if (!out.unreachable.empty()) throw DisconnectedGraph(std::move(out));
  return out;
}

}  // namespace swarminit
