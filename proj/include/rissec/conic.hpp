#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rissec {

/// coef^T x + constant over a dense real variable vector.
struct AffineExpr {
  Eigen::VectorXd coef;
  double constant = 0.0;

  double operator()(const Eigen::VectorXd& x) const { return coef.dot(x) + constant; }

  static AffineExpr zero(int n) { return {Eigen::VectorXd::Zero(n), 0.0}; }
  static AffineExpr constant_value(int n, double c) { return {Eigen::VectorXd::Zero(n), c}; }
  static AffineExpr variable(int n, int index, double scale = 1.0) {
    AffineExpr e = zero(n);
    e.coef[index] = scale;
    return e;
  }
};

/// Rotated quadratic cone a(x) c(x) >= ||S x + s0||^2, a(x) >= 0, c(x) >= 0.
/// With c = 1 this is a convex quadratic constraint; with a = c it is a
/// second-order cone.
struct RotatedCone {
  AffineExpr a;
  AffineExpr c;
  Eigen::MatrixXd s_lin;
  Eigen::VectorXd s_const;
  std::string label;

  Eigen::VectorXd s(const Eigen::VectorXd& x) const { return s_lin * x + s_const; }
  /// a c - ||s||^2; positive in the interior.
  double slack(const Eigen::VectorXd& x) const { return a(x) * c(x) - s(x).squaredNorm(); }
};

/// expr(x) >= 0.
struct AffineInequality {
  AffineExpr expr;
  std::string label;
};

/// maximize  linear^T x + log_weight * log(1 + x[log_index])
/// subject to affine inequalities and rotated quadratic cones.
struct ConicSubproblem {
  int n_vars = 0;
  std::vector<std::string> names;
  Eigen::VectorXd linear;
  int log_index = -1;
  double log_weight = 0.0;
  std::vector<AffineInequality> inequalities;
  std::vector<RotatedCone> cones;
  /// Strictly feasible starting point.
  Eigen::VectorXd start;

  double objective(const Eigen::VectorXd& x) const;
  /// Largest constraint violation at `x` (0 when feasible).
  double max_violation(const Eigen::VectorXd& x) const;
  bool strictly_feasible(const Eigen::VectorXd& x) const;
  /// Self-concordance parameter of the log barrier.
  double barrier_parameter() const;
};

enum class SolveStatus { Optimal, MaxIterations, NoInteriorStart, Unbounded, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolverSettings {
  double gap_tolerance = 1e-9;
  double newton_tolerance = 1e-10;
  double barrier_growth = 12.0;
  int max_newton_steps = 600;
};

struct SolveResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
  int newton_steps = 0;
  /// Upper bound on optimum minus the returned objective.
  double gap_bound = 0.0;
  std::string diagnostic;
};

/// Log-barrier interior-point method started from `p.start`. Every returned
/// point lies strictly inside the feasible set.
SolveResult solve_subproblem(const ConicSubproblem& p, const SolverSettings& settings = {});

}  // namespace rissec
