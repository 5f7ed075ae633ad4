#include "rissec/conic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rissec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NoInteriorStart: return "no_interior_start";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

double ConicSubproblem::objective(const VectorXd& x) const {
  double v = linear.dot(x);
  if (log_index >= 0) v += log_weight * std::log1p(x[log_index]);
  return v;
}

double ConicSubproblem::max_violation(const VectorXd& x) const {
  double v = 0.0;
  for (const auto& ineq : inequalities) v = std::max(v, -ineq.expr(x));
  for (const auto& k : cones) {
    v = std::max(v, -k.a(x));
    v = std::max(v, -k.c(x));
    v = std::max(v, -k.slack(x));
  }
  return v;
}

bool ConicSubproblem::strictly_feasible(const VectorXd& x) const {
  if (!x.allFinite()) return false;
  if (log_index >= 0 && !(x[log_index] > -1.0)) return false;
  for (const auto& ineq : inequalities)
    if (!(ineq.expr(x) > 0.0)) return false;
  for (const auto& k : cones)
    if (!(k.a(x) > 0.0) || !(k.c(x) > 0.0) || !(k.slack(x) > 0.0)) return false;
  return true;
}

double ConicSubproblem::barrier_parameter() const {
  return static_cast<double>(inequalities.size()) + 2.0 * static_cast<double>(cones.size());
}

namespace {

// tau * (-objective) + barrier, with gradient and Hessian.
struct Centering {
  const ConicSubproblem& p;
  double tau;

  double value(const VectorXd& x) const {
    double v = -tau * p.objective(x);
    for (const auto& ineq : p.inequalities) v -= std::log(ineq.expr(x));
    for (const auto& k : p.cones) v -= std::log(k.slack(x));
    return v;
  }

  void derivatives(const VectorXd& x, VectorXd& g, MatrixXd& h) const {
    g = -tau * p.linear;
    h.setZero(p.n_vars, p.n_vars);
    if (p.log_index >= 0) {
      const double d = 1.0 + x[p.log_index];
      g[p.log_index] -= tau * p.log_weight / d;
      h(p.log_index, p.log_index) += tau * p.log_weight / (d * d);
    }
    for (const auto& ineq : p.inequalities) {
      const double s = ineq.expr(x);
      g -= ineq.expr.coef / s;
      h.noalias() += ineq.expr.coef * ineq.expr.coef.transpose() / (s * s);
    }
    for (const auto& k : p.cones) {
      const double a = k.a(x);
      const double c = k.c(x);
      const VectorXd s = k.s(x);
      const double f = a * c - s.squaredNorm();
      const VectorXd df = c * k.a.coef + a * k.c.coef - 2.0 * k.s_lin.transpose() * s;
      g -= df / f;
      MatrixXd d2f = k.a.coef * k.c.coef.transpose();
      d2f += d2f.transpose().eval();
      d2f.noalias() -= 2.0 * k.s_lin.transpose() * k.s_lin;
      h.noalias() += df * df.transpose() / (f * f);
      h.noalias() -= d2f / f;
    }
  }
};

}  // namespace

SolveResult solve_subproblem(const ConicSubproblem& p, const SolverSettings& settings) {
  SolveResult res;
  res.x = p.start;
  if (p.start.size() != p.n_vars || !p.strictly_feasible(p.start)) {
    res.status = SolveStatus::NoInteriorStart;
    std::ostringstream os;
    os << "starting point is not strictly feasible";
    for (const auto& ineq : p.inequalities)
      if (p.start.size() == p.n_vars && !(ineq.expr(p.start) > 0.0))
        os << "; " << ineq.label << " residual " << ineq.expr(p.start);
    for (const auto& k : p.cones)
      if (p.start.size() == p.n_vars && !(k.slack(p.start) > 0.0 && k.a(p.start) > 0.0 && k.c(p.start) > 0.0))
        os << "; cone " << k.label << " slack " << k.slack(p.start);
    res.diagnostic = os.str();
    res.objective = p.start.size() == p.n_vars ? p.objective(p.start) : 0.0;
    return res;
  }

  const double m = p.barrier_parameter();
  VectorXd x = p.start;
  // Start tau so that the objective and barrier terms are comparable.
  double tau = std::max(1.0, m / (1.0 + std::abs(p.objective(x))));
  VectorXd g;
  MatrixXd h;
  int steps = 0;
  bool budget_exhausted = false;

  while (true) {
    Centering cen{p, tau};
    double phi = cen.value(x);
    for (;;) {
      if (steps >= settings.max_newton_steps) {
        budget_exhausted = true;
        break;
      }
      cen.derivatives(x, g, h);
      Eigen::LDLT<MatrixXd> ldlt(h);
      VectorXd dx;
      if (ldlt.info() == Eigen::Success) dx = -ldlt.solve(g);
      double dec = dx.size() ? -g.dot(dx) : -1.0;
      if (!(dec > 0.0) || !dx.allFinite()) {
        // Indefinite from round-off: fall back to a regularized system.
        const double reg = 1e-10 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
        MatrixXd hr = h;
        hr.diagonal().array() += reg;
        dx = -hr.ldlt().solve(g);
        dec = -g.dot(dx);
        if (!(dec > 0.0) || !dx.allFinite()) break;
      }
      ++steps;
      if (dec / 2.0 <= settings.newton_tolerance) break;

      double step = 1.0;
      VectorXd xn = x + step * dx;
      int halvings = 0;
      while (!p.strictly_feasible(xn) && halvings < 80) {
        step *= 0.5;
        xn = x + step * dx;
        ++halvings;
      }
      double phin = p.strictly_feasible(xn) ? cen.value(xn) : std::numeric_limits<double>::infinity();
      while (!(phin <= phi - 0.25 * step * dec) && halvings < 80) {
        step *= 0.5;
        xn = x + step * dx;
        phin = cen.value(xn);
        ++halvings;
      }
      // No strict decrease left at this precision: treat the point as centered.
      if (!(phin < phi) || halvings >= 80 || step * dx.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + x.lpNorm<Eigen::Infinity>()))
        break;
      x = xn;
      phi = phin;
      if (x.lpNorm<Eigen::Infinity>() > 1e15) {
        res.x = x;
        res.objective = p.objective(x);
        res.status = SolveStatus::Unbounded;
        res.newton_steps = steps;
        res.diagnostic = "iterates diverged along an improving ray";
        return res;
      }
    }
    if (budget_exhausted) break;
    if (m / tau <= settings.gap_tolerance) break;
    tau *= settings.barrier_growth;
  }

  res.x = x;
  res.objective = p.objective(x);
  res.newton_steps = steps;
  res.gap_bound = m / tau;
  res.status = budget_exhausted ? SolveStatus::MaxIterations : SolveStatus::Optimal;
  if (budget_exhausted) res.diagnostic = "Newton step budget exhausted";
  return res;
}

}  // namespace rissec
