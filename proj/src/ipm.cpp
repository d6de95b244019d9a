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

#include "swarminit/ipm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace swarminit {
namespace {

// Internal precision. Extended precision buys the extra digits the
// rounding step needs on ill-conditioned cost matrices.
using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr Real kSqrt2 = 1.41421356237309504880L;

// A_a is either e_u e_u^T (diagonal, b = 1) or (e_u e_v^T + e_v e_u^T)/sqrt2
// (off-diagonal, b = 0).
struct Constraint {
  int u;
  int v;
  bool off;
};

std::vector<Constraint> BlockConstraints(int blocks) {
  std::vector<Constraint> out;
  out.reserve(3 * blocks);
  for (int i = 0; i < blocks; ++i) {
    out.push_back({2 * i, 2 * i, false});
    out.push_back({2 * i + 1, 2 * i + 1, false});
    out.push_back({2 * i, 2 * i + 1, true});
  }
  return out;
}

Vec ApplyA(const std::vector<Constraint>& cons, const Mat& x) {
  Vec out(cons.size());
  for (std::size_t a = 0; a < cons.size(); ++a) {
    const auto& c = cons[a];
    out(a) = c.off ? kSqrt2 * x(c.u, c.v) : x(c.u, c.u);
  }
  return out;
}

Mat ApplyAdjoint(const std::vector<Constraint>& cons, const Vec& y,
                             int n) {
  Mat out = Mat::Zero(n, n);
  for (std::size_t a = 0; a < cons.size(); ++a) {
    const auto& c = cons[a];
    if (c.off) {
      out(c.u, c.v) += y(a) / kSqrt2;
      out(c.v, c.u) += y(a) / kSqrt2;
    } else {
      out(c.u, c.u) += y(a);
    }
  }
  return out;
}

Vec RightHandSide(const std::vector<Constraint>& cons) {
  Vec b(cons.size());
  for (std::size_t a = 0; a < cons.size(); ++a) b(a) = cons[a].off ? 0.0 : 1.0;
  return b;
}

// M_ab = <A_a, W A_b W>.
Mat SchurComplement(const std::vector<Constraint>& cons, const Mat& w) {
  const int m = static_cast<int>(cons.size());
  Mat out(m, m);
  for (int a = 0; a < m; ++a) {
    const auto& ca = cons[a];
    for (int b = a; b < m; ++b) {
      const auto& cb = cons[b];
      Real value;
      if (!ca.off && !cb.off) {
        value = w(ca.u, cb.u) * w(ca.u, cb.u);
      } else if (!ca.off) {
        value = kSqrt2 * w(ca.u, cb.u) * w(ca.u, cb.v);
      } else if (!cb.off) {
        value = kSqrt2 * w(ca.u, cb.u) * w(ca.v, cb.u);
      } else {
        value = w(ca.u, cb.u) * w(ca.v, cb.v) + w(ca.u, cb.v) * w(ca.v, cb.u);
      }
      out(a, b) = value;
      out(b, a) = value;
    }
  }
  return out;
}

Mat Sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Symmetric square root factor L (X = L L^T) and its inverse, from an
// eigendecomposition; more forgiving than Cholesky as X approaches the
// boundary of the cone.
struct Factor {
  Mat l;
  Mat l_inv;
  bool ok = false;
};

Factor FactorPsd(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(x);
  Factor f;
  const Vec ev = eig.eigenvalues();
  if (eig.info() != Eigen::Success || !(ev(0) > 0)) return f;
  const Vec root = ev.cwiseSqrt();
  f.l = eig.eigenvectors() * root.asDiagonal();
  f.l_inv = root.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  f.ok = true;
  return f;
}

// Largest alpha with x + alpha * dx still PSD (infinity if unbounded).
Real StepToBoundary(const Factor& f, const Mat& dx) {
  const Mat t = f.l_inv * dx * f.l_inv.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(Sym(t), Eigen::EigenvaluesOnly);
  const Real lmin = eig.eigenvalues()(0);
  if (lmin >= 0) return std::numeric_limits<Real>::infinity();
  return -1.0 / lmin;
}

// Congruence by the inverse square roots of the diagonal blocks: keeps X
// positive definite and makes every block exactly I_2, wiping out the
// primal residual that inexact Schur solves accumulate near the optimum.
void RestoreFeasibility(Mat& x) {
  const int blocks = static_cast<int>(x.rows()) / 2;
  Mat b = Mat::Zero(x.rows(), x.cols());
  for (int i = 0; i < blocks; ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Real, 2, 2>> eig(x.block<2, 2>(2 * i, 2 * i));
    b.block<2, 2>(2 * i, 2 * i) = eig.operatorInverseSqrt();
  }
  x = Sym(b * x * b);
}

}  // namespace

IpmResult SolveBlockIdentitySdp(const Eigen::MatrixXd& cost, const IpmOptions& options) {
  const int n = static_cast<int>(cost.rows());
  const auto cons = BlockConstraints(n / 2);
  const Vec b = RightHandSide(cons);

  // Work on a unit-norm copy of the cost; objectives are reported unscaled.
  const double scale = std::max(cost.norm(), std::numeric_limits<double>::min());
  const Mat c = Sym(cost.cast<Real>()) / static_cast<Real>(scale);

  Mat x = Mat::Identity(n, n);
  Vec y = Vec::Zero(cons.size());
  for (std::size_t a = 0; a < cons.size(); ++a) {
    if (!cons[a].off) y(a) = -1;
  }
  Mat s = c - ApplyAdjoint(cons, y, n);

  // Iterates keep improving past `tolerance` until `target_tolerance`, a
  // stall, or a factorization failure; the best accepted iterate is
  // returned. The extra digits matter: the rotation error of the rounded
  // solution decays only like the square root of the gap here.
  IpmResult r;
  std::optional<IpmResult> best;
  double best_error = std::numeric_limits<double>::infinity();
  int stalled = 0;
  auto snapshot = [&] {
    r.x = x.cast<double>();
    r.y = (y * static_cast<Real>(scale)).cast<double>();
    r.s = (s * static_cast<Real>(scale)).cast<double>();
  };
  for (r.iterations = 0; r.iterations <= options.max_iterations; ++r.iterations) {
    const Vec rp = b - ApplyA(cons, x);
    const Mat rd = c - s - ApplyAdjoint(cons, y, n);
    // Stopping measures use the normalized problem so they are scale free.
    const Real pobj = (c.array() * x.array()).sum();
    const Real dobj = b.dot(y);
    r.primal_objective = static_cast<double>(scale * pobj);
    r.dual_objective = static_cast<double>(scale * dobj);
    r.primal_residual = static_cast<double>(rp.norm() / (1 + b.norm()));
    r.dual_residual = static_cast<double>(rd.norm() / (1 + c.norm()));
    r.relative_gap =
        static_cast<double>(std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj)));
    const double error = std::max({r.primal_residual, r.dual_residual, r.relative_gap});
    if (error <= options.tolerance && error < best_error) {
      best_error = error;
      snapshot();
      best = r;
      best->converged = true;
      stalled = 0;
    } else if (best && ++stalled >= 3) {
      break;
    }
    if (error <= options.target_tolerance) break;
    if (r.iterations == options.max_iterations) break;

    const Factor fx = FactorPsd(x);
    const Factor fs = FactorPsd(s);
    if (!fx.ok || !fs.ok) break;

    // Nesterov-Todd scaling: G^{-1} X G^{-T} = G^T S G = D, W = G G^T.
    Eigen::JacobiSVD<Mat> svd(fs.l.transpose() * fx.l, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec d = svd.singularValues();
    if (!(d.minCoeff() > 0)) break;
    const Mat g = fx.l * svd.matrixV() * d.cwiseSqrt().cwiseInverse().asDiagonal();
    const Mat g_inv = d.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * fx.l_inv;
    const Mat w = g * g.transpose();

    // Pivoted LDLT plus one refinement step: near the optimum the Schur
    // matrix is too ill-conditioned for plain Cholesky.
    const Mat m = SchurComplement(cons, w);
    Eigen::LDLT<Mat> schur(m);
    if (schur.info() != Eigen::Success) break;

    const Real mu = (x.array() * s.array()).sum() / n;

    // Solves  A(dX) = rp,  A*(dy) + dS = rd,  dX + W dS W = K.
    auto direction = [&](const Mat& k, Mat& dx, Vec& dy, Mat& ds) {
      const Vec rhs = rp - ApplyA(cons, k - w * rd * w);
      dy = schur.solve(rhs);
      dy += schur.solve(rhs - m * dy);
      ds = Sym(rd - ApplyAdjoint(cons, dy, n));
      dx = Sym(k - w * ds * w);
    };

    // Predictor (affine scaling).
    Mat dx_aff, ds_aff;
    Vec dy_aff;
    direction(-x, dx_aff, dy_aff, ds_aff);
    const Real ap_aff = std::min<Real>(1, StepToBoundary(fx, dx_aff));
    const Real ad_aff = std::min<Real>(1, StepToBoundary(fs, ds_aff));
    const Real mu_aff = ((x + ap_aff * dx_aff).array() * (s + ad_aff * ds_aff).array()).sum() / n;
    const Real sigma = std::clamp<Real>(std::pow(mu_aff / mu, 3), 0, 1);

    // Corrector in the scaled space, where the scaled iterate is diag(d).
    const Mat dxt = g_inv * dx_aff * g_inv.transpose();
    const Mat dst = g.transpose() * ds_aff * g;
    Mat rc = -0.5 * (dxt * dst + dst * dxt);
    for (int i = 0; i < n; ++i) rc(i, i) += sigma * mu - d(i) * d(i);
    Mat rt(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) rt(i, j) = 2 * rc(i, j) / (d(i) + d(j));
    }
    Mat dx, ds;
    Vec dy;
    direction(Sym(g * rt * g.transpose()), dx, dy, ds);

    const Real fraction = options.step_fraction;
    const Real ap = std::min<Real>(1, fraction * StepToBoundary(fx, dx));
    const Real ad = std::min<Real>(1, fraction * StepToBoundary(fs, ds));
    x = Sym(x + ap * dx);
    RestoreFeasibility(x);
    y += ad * dy;
    s = Sym(s + ad * ds);
  }

  if (best) {
    const int iterations = r.iterations;
    r = *best;
    r.iterations = iterations;
  } else {
    snapshot();
  }
  return r;
}

}  // namespace swarminit
