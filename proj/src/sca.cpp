#include "rissec/sca.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace rissec {

using Eigen::VectorXd;

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Rows and distortion weight expressed in normalized units.
struct Normalized {
  cvec d_user;  // b_q * u * w_scale / sigma
  cvec d_eve;
  rvec dist_user;  // kappa * |u_k|^2 * w_scale^2 / sigma^2
  rvec dist_eve;
  double w_scale;
};

Normalized normalize(const BeamformingProblem& prob) {
  if (!(prob.power > 0.0)) throw DomainError("transmit power must be positive");
  if (!(prob.noise.user > 0.0) || !(prob.noise.eve > 0.0)) throw DomainError("noise powers must be positive");
  if (prob.rows.user.size() != prob.rows.eve.size()) throw DimensionError("user and Eve rows differ in length");
  const auto& q = prob.quant;
  Normalized n;
  n.w_scale = std::sqrt(prob.power / q.b_q);
  const double su = n.w_scale / std::sqrt(prob.noise.user);
  const double se = n.w_scale / std::sqrt(prob.noise.eve);
  n.d_user = q.b_q * su * prob.rows.user;
  n.d_eve = q.b_q * se * prob.rows.eve;
  n.dist_user = q.distortion_weight() * su * su * prob.rows.user.cwiseAbs2();
  n.dist_eve = q.distortion_weight() * se * se * prob.rows.eve.cwiseAbs2();
  return n;
}

cvec to_complex(const VectorXd& x, const SCAVariables& v) {
  cvec w(v.n_rf);
  for (int k = 0; k < v.n_rf; ++k) w[k] = {x[v.re(k)], x[v.im(k)]};
  return w;
}

// Real-linear map x -> (Re(b.x), Im(b.x)) for b.x = sum_k b_k x_k.
Eigen::MatrixXd real_rows(const cvec& b, const SCAVariables& v) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, v.size());
  for (int k = 0; k < v.n_rf; ++k) {
    m(0, v.re(k)) = b[k].real();
    m(0, v.im(k)) = -b[k].imag();
    m(1, v.re(k)) = b[k].imag();
    m(1, v.im(k)) = b[k].real();
  }
  return m;
}

}  // namespace

cvec SCASubproblem::precoder(const VectorXd& x) const { return w_scale * to_complex(x, vars); }

SCASubproblem build_subproblem(const BeamformingProblem& prob, const cvec& w_anchor) {
  const Normalized nz = normalize(prob);
  const int n_rf = static_cast<int>(prob.rows.user.size());
  if (w_anchor.size() != n_rf) throw DimensionError("anchor precoder length disagrees with n_rf");

  SCASubproblem sp;
  sp.vars = SCAVariables{n_rf};
  sp.w_scale = nz.w_scale;
  const auto& v = sp.vars;
  const int n = v.size();

  const cvec xb = w_anchor / nz.w_scale;
  const cplx y = dotu(nz.d_user, xb);
  const cplx ye = dotu(nz.d_eve, xb);
  const rvec xb2 = xb.cwiseAbs2();

  auto& A = sp.anchors;
  A.w_bar = xb;
  A.z_bar = std::abs(y);
  A.omega_bar = nz.dist_user.dot(xb2) + 1.0;
  A.r_bar = std::abs(ye);
  const double omega_e_bar = nz.dist_eve.dot(xb2) + 1.0;
  A.t_bar = std::log1p(std::norm(ye) / omega_e_bar) / kLn2;
  if (!(A.z_bar > 0.0)) throw std::invalid_argument("anchor precoder delivers no signal to the user");

  auto& c = sp.conic;
  c.n_vars = n;
  c.names.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n_rf; ++k) {
    c.names[static_cast<std::size_t>(v.re(k))] = "re_w" + std::to_string(k);
    c.names[static_cast<std::size_t>(v.im(k))] = "im_w" + std::to_string(k);
  }
  c.names[static_cast<std::size_t>(v.rho())] = "rho";
  c.names[static_cast<std::size_t>(v.z())] = "z";
  c.names[static_cast<std::size_t>(v.omega())] = "omega";
  c.names[static_cast<std::size_t>(v.t())] = "t";
  c.names[static_cast<std::size_t>(v.r())] = "r";
  c.names[static_cast<std::size_t>(v.omega_e())] = "omega_e";

  // maximize log2(1 + rho) - t
  c.linear = VectorXd::Zero(n);
  c.linear[v.t()] = -1.0;
  c.log_index = v.rho();
  c.log_weight = 1.0 / kLn2;

  // rho <= (2 z_bar / omega_bar) z - (z_bar^2 / omega_bar^2) omega
  {
    AffineExpr e = AffineExpr::zero(n);
    e.coef[v.z()] = 2.0 * A.z_bar / A.omega_bar;
    e.coef[v.omega()] = -(A.z_bar * A.z_bar) / (A.omega_bar * A.omega_bar);
    e.coef[v.rho()] = -1.0;
    c.inequalities.push_back({e, "signal_ratio_tangent"});
  }
  // z^2 <= |D x_bar|^2 + 2 Re(conj(D x_bar) D (x - x_bar))
  {
    RotatedCone k;
    k.a = AffineExpr::zero(n);
    const cvec cc = std::conj(y) * nz.d_user;
    for (int j = 0; j < n_rf; ++j) {
      k.a.coef[v.re(j)] = 2.0 * cc[j].real();
      k.a.coef[v.im(j)] = -2.0 * cc[j].imag();
    }
    k.a.constant = -std::norm(y);
    k.c = AffineExpr::constant_value(n, 1.0);
    k.s_lin = Eigen::MatrixXd::Zero(1, n);
    k.s_lin(0, v.z()) = 1.0;
    k.s_const = VectorXd::Zero(1);
    k.label = "user_signal_linearized";
    c.cones.push_back(std::move(k));
  }
  // omega >= sum_k dist_k |x_k|^2 + 1
  {
    RotatedCone k;
    k.a = AffineExpr::variable(n, v.omega());
    k.a.constant = -1.0;
    k.c = AffineExpr::constant_value(n, 1.0);
    k.s_lin = Eigen::MatrixXd::Zero(2 * n_rf, n);
    for (int j = 0; j < n_rf; ++j) {
      const double s = std::sqrt(nz.dist_user[j]);
      k.s_lin(2 * j, v.re(j)) = s;
      k.s_lin(2 * j + 1, v.im(j)) = s;
    }
    k.s_const = VectorXd::Zero(2 * n_rf);
    k.label = "user_distortion";
    c.cones.push_back(std::move(k));
  }
  // ||x||^2 <= 1, i.e. b_q ||w||^2 <= P
  {
    RotatedCone k;
    k.a = AffineExpr::constant_value(n, 1.0);
    k.c = AffineExpr::constant_value(n, 1.0);
    k.s_lin = Eigen::MatrixXd::Zero(2 * n_rf, n);
    for (int j = 0; j < n_rf; ++j) {
      k.s_lin(2 * j, v.re(j)) = 1.0;
      k.s_lin(2 * j + 1, v.im(j)) = 1.0;
    }
    k.s_const = VectorXd::Zero(2 * n_rf);
    k.label = "power";
    c.cones.push_back(std::move(k));
  }
  // |D_e x| <= r
  {
    RotatedCone k;
    k.a = AffineExpr::variable(n, v.r());
    k.c = AffineExpr::variable(n, v.r());
    k.s_lin = real_rows(nz.d_eve, v);
    k.s_const = VectorXd::Zero(2);
    k.label = "eve_signal";
    c.cones.push_back(std::move(k));
  }
  // r^2 <= (2^t_bar (1 + ln2 (t - t_bar)) - 1) omega_e
  {
    RotatedCone k;
    const double p2 = std::exp2(A.t_bar);
    k.a = AffineExpr::variable(n, v.t(), p2 * kLn2);
    k.a.constant = p2 * (1.0 - kLn2 * A.t_bar) - 1.0;
    k.c = AffineExpr::variable(n, v.omega_e());
    k.s_lin = Eigen::MatrixXd::Zero(1, n);
    k.s_lin(0, v.r()) = 1.0;
    k.s_const = VectorXd::Zero(1);
    k.label = "eve_rate_tangent";
    c.cones.push_back(std::move(k));
  }
  // omega_e <= 1 + sum_k dist_e,k (2 Re(conj(x_bar_k) x_k) - |x_bar_k|^2)
  {
    AffineExpr e = AffineExpr::zero(n);
    e.constant = 1.0 - nz.dist_eve.dot(xb2);
    for (int j = 0; j < n_rf; ++j) {
      e.coef[v.re(j)] = 2.0 * nz.dist_eve[j] * xb[j].real();
      e.coef[v.im(j)] = 2.0 * nz.dist_eve[j] * xb[j].imag();
    }
    e.coef[v.omega_e()] = -1.0;
    c.inequalities.push_back({e, "eve_distortion_linearized"});
  }

  // Anchor point: every surrogate above holds with equality here.
  sp.anchor_point = VectorXd::Zero(n);
  for (int k = 0; k < n_rf; ++k) {
    sp.anchor_point[v.re(k)] = xb[k].real();
    sp.anchor_point[v.im(k)] = xb[k].imag();
  }
  sp.anchor_point[v.rho()] = A.z_bar * A.z_bar / A.omega_bar;
  sp.anchor_point[v.z()] = A.z_bar;
  sp.anchor_point[v.omega()] = A.omega_bar;
  sp.anchor_point[v.t()] = A.t_bar;
  sp.anchor_point[v.r()] = A.r_bar;
  sp.anchor_point[v.omega_e()] = omega_e_bar;

  // Strictly feasible start: shrink the precoder slightly and give every
  // auxiliary a small margin on the conservative side.
  constexpr double eps = 1e-3;
  const cvec x0 = (1.0 - eps) * xb;
  const rvec x02 = x0.cwiseAbs2();
  VectorXd s = sp.anchor_point;
  for (int k = 0; k < n_rf; ++k) {
    s[v.re(k)] = x0[k].real();
    s[v.im(k)] = x0[k].imag();
  }
  const double g0 = std::norm(y) * (1.0 - 2.0 * eps);
  s[v.z()] = std::sqrt(g0) * (1.0 - eps);
  s[v.omega()] = nz.dist_user.dot(x02) + 1.0 + eps * A.omega_bar;
  const double rhs = 2.0 * A.z_bar / A.omega_bar * s[v.z()] -
                     (A.z_bar * A.z_bar) / (A.omega_bar * A.omega_bar) * s[v.omega()];
  s[v.rho()] = rhs - eps * std::abs(rhs);
  const double ub_e = 1.0 + nz.dist_eve.dot(2.0 * xb.cwiseProduct(x0.conjugate()).real() - xb2);
  s[v.omega_e()] = ub_e - eps;
  const double e0 = std::abs(dotu(nz.d_eve, x0));
  s[v.r()] = e0 + eps * std::max(e0, 1e-3);
  const double a0 = s[v.r()] * s[v.r()] / s[v.omega_e()] * (1.0 + eps);
  const double p2 = std::exp2(A.t_bar);
  s[v.t()] = A.t_bar + (a0 + (1.0 - p2)) / p2 / kLn2;
  c.start = s;
  return sp;
}

// ---------------------------------------------------------------------------

double secrecy_gap(const BeamformingProblem& prob, const cvec& w) { return evaluate_rates(prob, w).gap(); }

namespace {

// d log2((S + I) / I) / d conj(w) for one receiver.
cvec rate_wirtinger(const cvec& row, double b_q, double kappa, double noise, const cvec& w) {
  const cvec d = b_q * row;
  const cplx dw = dotu(d, w);
  const double sig = std::norm(dw);
  const rvec row2 = row.cwiseAbs2();
  const double inter = kappa * row2.dot(w.cwiseAbs2()) + noise;
  const cvec d_sig = d.conjugate() * dw;
  const cvec d_int = kappa * row2.cast<cplx>().cwiseProduct(w);
  return ((d_sig + d_int) / (sig + inter) - d_int / inter) / kLn2;
}

}  // namespace

cvec secrecy_gradient(const BeamformingProblem& prob, const cvec& w) {
  const double kappa = prob.quant.distortion_weight();
  const double b_q = prob.quant.b_q;
  return 2.0 * (rate_wirtinger(prob.rows.user, b_q, kappa, prob.noise.user, w) -
                rate_wirtinger(prob.rows.eve, b_q, kappa, prob.noise.eve, w));
}

cvec project_power(const cvec& w, double b_q, double power) {
  const double p = b_q * w.squaredNorm();
  if (p <= power) return w;
  return w * std::sqrt(power / p);
}

cvec mrt_beamformer(const EffectiveLinks& links, const QuantizationModel& q, double power) {
  const double nd = links.d_user.norm();
  if (nd == 0.0) return cvec::Zero(links.d_user.size());
  return std::sqrt(power / q.b_q) * links.d_user.conjugate() / nd;
}

namespace {

cvec mrt_for(const BeamformingProblem& prob) {
  const cvec zero = cvec::Zero(prob.rows.user.size());
  return mrt_beamformer(effective_links(prob.rows, zero, prob.quant, prob.noise), prob.quant, prob.power);
}

}  // namespace

cvec pga_baseline(const BeamformingProblem& prob, const cvec& w0, const PGASettings& settings) {
  const double b_q = prob.quant.b_q;
  cvec w = (w0.size() == prob.rows.user.size() && w0.squaredNorm() > 0.0) ? w0 : mrt_for(prob);
  w = project_power(w, b_q, prob.power);
  double f = secrecy_gap(prob, w);
  const double radius = std::sqrt(prob.power / b_q);
  double step = 0.0;
  for (int it = 0; it < settings.max_iterations; ++it) {
    const cvec g = secrecy_gradient(prob, w);
    const double gn = g.norm();
    if (!(gn > 0.0)) break;
    if (step == 0.0) step = 0.1 * radius / gn;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const cvec wn = project_power(w + step * g, b_q, prob.power);
      const double fn = secrecy_gap(prob, wn);
      const double model = (g.conjugate().cwiseProduct(wn - w)).real().sum();
      if (fn >= f + 1e-4 * model && fn >= f) {
        const double gain = fn - f;
        const double moved = (wn - w).norm();
        w = wn;
        f = fn;
        improved = true;
        step *= 2.0;
        if (gain <= settings.tolerance * (1.0 + std::abs(f)) && moved <= 1e-12 * radius) return w;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return w;
}

// ---------------------------------------------------------------------------

SCAResult sca_solve(const BeamformingProblem& prob, const cvec& w0, const SCASettings& settings) {
  const Eigen::Index n_rf = prob.rows.user.size();
  SCAResult res;
  cvec w = (w0.size() == n_rf) ? project_power(w0, prob.quant.b_q, prob.power) : cvec::Zero(n_rf);
  if (!(std::norm(dotu(prob.rows.user, w)) > 0.0)) {
    w = mrt_for(prob);
    if (w0.size() == n_rf && w.squaredNorm() > 0.0) res.warnings.emplace_back("initial precoder replaced by MRT");
  }
  double obj = secrecy_gap(prob, w);
  res.trace.push_back({0, obj, transmit_power(prob.quant.b_q, w), "initial"});
  if (!(std::norm(dotu(prob.rows.user, w)) > 0.0)) {
    res.warnings.emplace_back("user composite channel is zero; nothing to optimize");
    res.w = cvec::Zero(n_rf);
    res.trace.back().objective = secrecy_gap(prob, res.w);
    res.trace.back().power = 0.0;
    res.converged = true;
    return res;
  }

  for (int it = 1; it <= settings.max_iterations; ++it) {
    const SCASubproblem sp = build_subproblem(prob, w);
    const SolveResult sol = solve_subproblem(sp.conic, settings.solver);
    if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::MaxIterations) {
      res.warnings.push_back(std::string("subproblem ") + to_string(sol.status) + ": " + sol.diagnostic);
      break;
    }
    if (sol.status == SolveStatus::MaxIterations) res.warnings.emplace_back("subproblem hit the Newton step budget");
    const cvec wn = project_power(sp.precoder(sol.x), prob.quant.b_q, prob.power);
    const double objn = secrecy_gap(prob, wn);
    if (objn < obj) {
      // The surrogate is conservative, so this only happens at round-off level.
      if (obj - objn > 1e-9) res.warnings.emplace_back("rejected a non-improving SCA step");
      res.converged = true;
      break;
    }
    const double delta = objn - obj;
    w = wn;
    obj = objn;
    res.trace.push_back({it, obj, transmit_power(prob.quant.b_q, w), to_string(sol.status)});
    if (std::abs(delta) < settings.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.w = w;
  return res;
}

SCAResult sca_solve(const ChannelSet& ch, const PhaseVector& phases, const BeamformerState& bf,
                    const QuantizationModel& q, const SystemConfig& cfg, const SCASettings& settings) {
  BeamformingProblem prob{cascade_rows(ch, phases, bf.f_rf), q, {cfg.noise_user_watts(), cfg.noise_eve_watts()},
                          cfg.power_watts};
  return sca_solve(prob, bf.w, settings);
}

void write_sca_trace_csv(const SCAResult& res, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "iteration,objective,power,status\n" << std::setprecision(9);
  for (const auto& t : res.trace) os << t.iteration << ',' << t.objective << ',' << t.power << ',' << t.status << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace rissec
