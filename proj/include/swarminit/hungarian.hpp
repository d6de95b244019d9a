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
#include <vector>

namespace swarminit {

/// Minimum-cost assignment of every row to a distinct column of a finite
/// rows x cols matrix with rows <= cols (Kuhn-Munkres with potentials,
/// O(rows^2 * cols)). Returns the column chosen for each row.
std::vector<int> MinCostAssignment(const Eigen::MatrixXd& cost);

}  // namespace swarminit
