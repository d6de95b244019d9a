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

#pragma once

#include <Eigen/Core>
#include <span>

#include "swarminit/geometry.hpp"
#include "swarminit/simulator.hpp"

namespace swarminit {

/// Constant 2N x 2N cost of the rotation problem: the yaw objective equals
/// tr(q * Z) with Z the Gram matrix of the stacked 2x2 rotations.
struct QMatrix {
  Eigen::MatrixXd q;
  int n = 0;
  int n_epochs = 0;

  static QMatrix Zero(int n_drones);
};

struct SdpOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double rank_tolerance = 1e-6;
};

struct SdpSolution {
  Eigen::MatrixXd z;
  double objective = 0.0;
  int numeric_rank = 0;
  // numeric_rank <= N + 1
  bool complete = false;
  // Gauge-fixed, rotations[0] is identity.
  YawVector rotations;

  // Solver diagnostics.
  int iterations = 0;
  // Interior point met the tolerance (otherwise it stalled within 100x).
  bool converged = false;
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

/// Accumulates the per-epoch, per-observer summed observation vectors into q.
/// Observation order within an observer does not affect the result (the
/// summation order is canonicalized). Throws ErrorCode::kEmptyInput and
/// ErrorCode::kLengthMismatch.
QMatrix BuildQ(std::span<const EpochRecord> records);

/// Solves the block-identity relaxation of the yaw problem and extracts
/// gauge-fixed rotations from the top two eigenpairs of the solution.
/// q == 0 returns the identity solution flagged incomplete.
/// Throws ErrorCode::kSolverDiverged and ErrorCode::kDegenerateBlock.
SdpSolution SolveSdp(const QMatrix& q, const SdpOptions& options = {});

/// Number of eigenvalues above tol * lambda_max.
int NumericRank(const Eigen::MatrixXd& z, double tol = 1e-6);

/// Rank-2 rounding of a feasible Z into gauge-fixed rotations.
YawVector ExtractRotations(const Eigen::MatrixXd& z);

/// Z(yaws) = Y^T Y with Y = [R(theta_0) ... R(theta_{N-1})].
Eigen::MatrixXd GramFromYaws(const YawVector& yaws);

/// tr(q * Z(yaws)), the unrelaxed objective.
double RotationObjective(const QMatrix& q, const YawVector& yaws);

}  // namespace swarminit
