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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

namespace swarminit {
namespace {

using Clock = std::chrono::steady_clock;

// Residual form of the yaw objective: f = |vec(Y(theta) L)|^2 with Q = L L^T.
class YawResiduals {
 public:
  explicit YawResiduals(const QMatrix& q) : n_(q.n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.q);
    const auto& ev = eig.eigenvalues();
    const double cutoff = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    int keep = 0;
    for (int i = 0; i < ev.size(); ++i) keep += ev(i) > cutoff ? 1 : 0;
    factor_.resize(2 * n_, keep);
    int col = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i) > cutoff) factor_.col(col++) = std::sqrt(ev(i)) * eig.eigenvectors().col(i);
    }
  }

  int rank() const { return static_cast<int>(factor_.cols()); }

  Eigen::VectorXd Residual(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd yl = Eigen::MatrixXd::Zero(2, rank());
    for (int j = 0; j < n_; ++j) {
      yl.noalias() += Rot(theta(j)) * factor_.middleRows<2>(2 * j);
    }
    return Eigen::Map<const Eigen::VectorXd>(yl.data(), yl.size());
  }

  // Columns for theta_1 .. theta_{N-1}; theta_0 is the gauge.
  Eigen::MatrixXd Jacobian(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd jac(2 * rank(), n_ - 1);
    for (int m = 1; m < n_; ++m) {
      const Eigen::MatrixXd block = DRot(theta(m)) * factor_.middleRows<2>(2 * m);
      jac.col(m - 1) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    }
    return jac;
  }

 private:
  static Eigen::Matrix2d Rot(double t) {
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
  }
  static Eigen::Matrix2d DRot(double t) {
    Eigen::Matrix2d r;
    r << -std::sin(t), -std::cos(t), std::cos(t), -std::sin(t);
    return r;
  }

  int n_;
  Eigen::MatrixXd factor_;
};

Eigen::VectorXd ToVector(const YawVector& yaws) {
  Eigen::VectorXd v(yaws.size());
  for (std::size_t i = 0; i < yaws.size(); ++i) v(i) = yaws[i].theta();
  return v;
}

YawVector ToYaws(const Eigen::VectorXd& v) {
  YawVector out;
  for (int i = 0; i < v.size(); ++i) out.emplace_back(v(i));
  return GaugeFix(out);
}

void CheckInit(const QMatrix& q, const YawVector& init) {
  if (static_cast<int>(init.size()) != q.n) {
    throw Error(ErrorCode::kLengthMismatch, "initial yaw vector does not match q");
  }
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::pair<double, Eigen::VectorXd> ObjectiveAndJacobian(const YawVector& thetas,
                                                        const QMatrix& q) {
  CheckInit(q, thetas);
  const int n = q.n;
  double f = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      const auto block = q.q.block<2, 2>(2 * j, 2 * l);
      const double a = block(0, 0) + block(1, 1);
      const double b = block(1, 0) - block(0, 1);
      if (j == l) {
        f += a;
        continue;
      }
      const double delta = thetas[l].theta() - thetas[j].theta();
      const double c = std::cos(delta);
      const double s = std::sin(delta);
      f += a * c + b * s;
      const double d_delta = -a * s + b * c;
      grad(l) += d_delta;
      grad(j) -= d_delta;
    }
  }
  return {f, grad};
}

LocalSolveReport SolveGn(const QMatrix& q, const YawVector& init,
                         const LocalSolveOptions& options) {
  CheckInit(q, init);
  const auto start = Clock::now();
  LocalSolveReport report;
  const YawResiduals model(q);
  Eigen::VectorXd theta = ToVector(init);
  Eigen::VectorXd r = model.Residual(theta);
  double f = r.squaredNorm();

  if (q.n > 1) {
    for (report.iterations = 0; report.iterations < options.max_iterations;
         ++report.iterations) {
      const Eigen::MatrixXd jac = model.Jacobian(theta);
      const Eigen::VectorXd g = jac.transpose() * r;
      if (2.0 * g.norm() < options.gradient_tolerance) {
        report.converged = true;
        break;
      }
      const Eigen::MatrixXd h = jac.transpose() * jac;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      Eigen::VectorXd step;
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-12) {
        report.singular_fallback = true;
        step = -g / std::max(h.trace(), 1e-300);
      } else {
        step = ldlt.solve(-g);
      }
      // Backtrack until the objective does not increase.
      double alpha = 1.0;
      Eigen::VectorXd trial = theta;
      Eigen::VectorXd r_trial;
      bool accepted = false;
      for (int k = 0; k < 40; ++k, alpha *= 0.5) {
        trial.tail(q.n - 1) = theta.tail(q.n - 1) + alpha * step;
        r_trial = model.Residual(trial);
        if (r_trial.squaredNorm() <= f) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      theta = trial;
      r = r_trial;
      f = r.squaredNorm();
      if (alpha * step.norm() < options.step_tolerance) {
        report.converged = true;
        ++report.iterations;
        break;
      }
    }
  } else {
    report.converged = true;
  }

  report.yaws = ToYaws(theta);
  report.objective = f;
  report.wall_time = Seconds(start);
  return report;
}

LocalSolveReport SolveLm(const QMatrix& q, const YawVector& init,
                         const LocalSolveOptions& options) {
  CheckInit(q, init);
  const auto start = Clock::now();
  LocalSolveReport report;
  const YawResiduals model(q);
  Eigen::VectorXd theta = ToVector(init);
  Eigen::VectorXd r = model.Residual(theta);
  double f = r.squaredNorm();
  double lambda = options.initial_damping;

  if (q.n > 1) {
    Eigen::MatrixXd jac = model.Jacobian(theta);
    for (report.iterations = 0; report.iterations < options.max_iterations;
         ++report.iterations) {
      const Eigen::VectorXd g = jac.transpose() * r;
      if (2.0 * g.norm() < options.gradient_tolerance) {
        report.converged = true;
        break;
      }
      const Eigen::MatrixXd h = jac.transpose() * jac;
      const double floor = 1e-12 * std::max(h.diagonal().maxCoeff(), 1e-300);
      Eigen::MatrixXd damped = h;
      for (int i = 0; i < h.rows(); ++i) damped(i, i) += lambda * std::max(h(i, i), floor);
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      if (step.norm() < options.step_tolerance) {
        report.converged = true;
        ++report.iterations;
        break;
      }
      Eigen::VectorXd trial = theta;
      trial.tail(q.n - 1) += step;
      const Eigen::VectorXd r_trial = model.Residual(trial);
      if (r_trial.squaredNorm() <= f) {
        theta = trial;
        r = r_trial;
        f = r.squaredNorm();
        jac = model.Jacobian(theta);
        lambda /= 10.0;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) break;
      }
    }
  } else {
    report.converged = true;
  }

  report.yaws = ToYaws(theta);
  report.objective = f;
  report.wall_time = Seconds(start);
  return report;
}

}  // namespace swarminit
