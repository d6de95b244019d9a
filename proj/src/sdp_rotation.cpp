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

#include "swarminit/sdp_rotation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "swarminit/ipm.hpp"

namespace swarminit {

QMatrix QMatrix::Zero(int n_drones) {
  return QMatrix{Eigen::MatrixXd::Zero(2 * n_drones, 2 * n_drones), n_drones, 0};
}

QMatrix BuildQ(std::span<const EpochRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no epoch records");
  const int n = records.front().n_drones();
  QMatrix out = QMatrix::Zero(n);
  out.n_epochs = static_cast<int>(records.size());

  for (const auto& record : records) {
    if (record.n_drones() != n) {
      throw Error(ErrorCode::kLengthMismatch,
                  "epoch " + std::to_string(record.epoch) + " has " +
                      std::to_string(record.n_drones()) + " odometry entries, expected " +
                      std::to_string(n));
    }
    std::vector<std::vector<std::array<double, 2>>> planar(n);
    for (const auto& o : record.observations) {
      if (o.observer < 0 || o.observer >= n) {
        throw Error(ErrorCode::kLengthMismatch, "observer index out of range");
      }
      planar[o.observer].push_back({o.vector.x(), o.vector.y()});
    }
    Eigen::VectorXd v(2 * n);
    for (int j = 0; j < n; ++j) {
      auto& list = planar[j];
      std::sort(list.begin(), list.end());
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      for (const auto& p : list) sum += Eigen::Vector2d(p[0], p[1]);
      v.segment<2>(2 * j) = record.odometry.yaws[j].matrix() * sum;
    }
    out.q.noalias() += v * v.transpose();
  }
  return out;
}

int NumericRank(const Eigen::MatrixXd& z, double tol) {
  if (z.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  if (lmax <= 0) return 0;
  return static_cast<int>((ev.array() > tol * lmax).count());
}

YawVector ExtractRotations(const Eigen::MatrixXd& z) {
  const int dim = static_cast<int>(z.rows());
  const int n = dim / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z);
  const auto& ev = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();
  // Rows of the 2 x 2N factor W with Z ~= W^T W.
  Eigen::MatrixXd factor(2, dim);
  factor.row(0) = std::sqrt(std::max(ev(dim - 1), 0.0)) * vecs.col(dim - 1).transpose();
  factor.row(1) = std::sqrt(std::max(ev(dim - 2), 0.0)) * vecs.col(dim - 2).transpose();
  // The factor is defined up to O(2); pick the branch where block 0 is proper.
  if (factor.block<2, 2>(0, 0).determinant() < 0) factor.row(1) *= -1.0;

  YawVector raw;
  raw.reserve(n);
  for (int j = 0; j < n; ++j) {
    raw.push_back(ProjectToSo2(factor.block<2, 2>(0, 2 * j)));
  }
  return GaugeFix(raw);
}

Eigen::MatrixXd GramFromYaws(const YawVector& yaws) {
  const int n = static_cast<int>(yaws.size());
  Eigen::MatrixXd y(2, 2 * n);
  for (int j = 0; j < n; ++j) y.block<2, 2>(0, 2 * j) = yaws[j].matrix();
  return y.transpose() * y;
}

double RotationObjective(const QMatrix& q, const YawVector& yaws) {
  if (static_cast<int>(yaws.size()) != q.n) {
    throw Error(ErrorCode::kLengthMismatch, "yaw vector does not match q");
  }
  return (q.q.array() * GramFromYaws(yaws).array()).sum();
}

SdpSolution SolveSdp(const QMatrix& q, const SdpOptions& options) {
  const int n = q.n;
  SdpSolution sol;
  if (q.q.isZero(0.0)) {
    sol.z = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    sol.objective = 0.0;
    sol.numeric_rank = 2 * n;
    sol.complete = false;
    sol.rotations.assign(n, Rotation2::Identity());
    sol.converged = true;
    return sol;
  }

  // Drones with no cost terms (nothing observed yet) are unconstrained: they
  // keep an identity block with zero coupling, as in the all-zero case, and
  // the interior point runs on the rest.
  std::vector<int> active;
  for (int j = 0; j < n; ++j) {
    if (!q.q.middleRows<2>(2 * j).isZero(0.0)) active.push_back(j);
  }
  const int m = static_cast<int>(active.size());
  Eigen::MatrixXd sub(2 * m, 2 * m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      sub.block<2, 2>(2 * a, 2 * b) = q.q.block<2, 2>(2 * active[a], 2 * active[b]);
    }
  }

  IpmOptions ipm;
  ipm.tolerance = options.tolerance;
  ipm.max_iterations = options.max_iterations;
  const IpmResult r = SolveBlockIdentitySdp(sub, ipm);
  if (!r.converged) {
    // Accept a stall just short of the target (typically a failed Cholesky
    // factorization of a numerically singular iterate).
    const double loose = 100.0 * options.tolerance;
    const bool close_enough = r.primal_residual <= loose && r.dual_residual <= loose &&
                              r.relative_gap <= loose;
    if (!close_enough) {
      throw Error(ErrorCode::kSolverDiverged,
                  "interior point stopped after " + std::to_string(r.iterations) +
                      " iterations with gap " + std::to_string(r.relative_gap));
    }
  }

  sol.z = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      sol.z.block<2, 2>(2 * active[a], 2 * active[b]) = r.x.block<2, 2>(2 * a, 2 * b);
    }
  }
  sol.objective = (q.q.array() * sol.z.array()).sum();
  sol.numeric_rank = NumericRank(sol.z, options.rank_tolerance);
  sol.complete = sol.numeric_rank <= n + 1;
  sol.rotations.assign(n, Rotation2::Identity());
  const YawVector found = ExtractRotations(r.x);
  for (int a = 0; a < m; ++a) sol.rotations[active[a]] = found[a];
  sol.iterations = r.iterations;
  sol.converged = r.converged;
  sol.duality_gap = r.primal_objective - r.dual_objective;
  sol.primal_residual = r.primal_residual;
  sol.dual_residual = r.dual_residual;
  return sol;
}

}  // namespace swarminit
