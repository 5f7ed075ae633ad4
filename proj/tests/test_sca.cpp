#include "doctest.h"
#include "support.hpp"

using namespace rissec;
using testsupport::random_bf_problem;
using testsupport::random_cvec;

namespace {

// Surrogate value at a fixed normalized precoder x for n_rf = 1, with every
// auxiliary at its best feasible value. Returns -inf outside the domain.
double surrogate_value(const BeamformingProblem& prob, const cvec& w_anchor, cplx x) {
  const double scale = std::sqrt(prob.power / prob.quant.b_q);
  const double kap = prob.quant.distortion_weight();
  const cplx d = prob.quant.b_q * prob.rows.user[0] * scale / std::sqrt(prob.noise.user);
  const cplx de = prob.quant.b_q * prob.rows.eve[0] * scale / std::sqrt(prob.noise.eve);
  const double ku = kap * std::norm(prob.rows.user[0]) * scale * scale / prob.noise.user;
  const double ke = kap * std::norm(prob.rows.eve[0]) * scale * scale / prob.noise.eve;
  const cplx xb = w_anchor[0] / scale;

  const cplx y = d * xb;
  const double zb = std::abs(y);
  const double ob = ku * std::norm(xb) + 1.0;
  const double teb = std::log2(1.0 + std::norm(de * xb) / (ke * std::norm(xb) + 1.0));

  const double lin = std::norm(y) + 2.0 * std::real(std::conj(y) * d * (x - xb));
  if (lin < 0.0 || std::norm(x) > 1.0) return -INFINITY;
  const double z = std::sqrt(lin);
  const double om = ku * std::norm(x) + 1.0;
  const double rho = 2.0 * zb / ob * z - zb * zb / (ob * ob) * om;
  if (rho <= -1.0) return -INFINITY;
  const double r2 = std::norm(de * x);
  const double ome = 1.0 + ke * (2.0 * std::real(std::conj(xb) * x) - std::norm(xb));
  if (ome <= 0.0) return -INFINITY;
  const double t = teb + ((r2 / ome + 1.0) / std::exp2(teb) - 1.0) / std::log(2.0);
  return std::log2(1.0 + rho) - t;
}

}  // namespace

TEST_CASE("rotated cone toy problem") {
  // maximize x s.t. x * 1 >= x^2, x >= 0
  ConicSubproblem p;
  p.n_vars = 1;
  p.linear = Eigen::VectorXd::Ones(1);
  RotatedCone k;
  k.a = AffineExpr::variable(1, 0);
  k.c = AffineExpr::constant_value(1, 1.0);
  k.s_lin = Eigen::MatrixXd::Ones(1, 1);
  k.s_const = Eigen::VectorXd::Zero(1);
  p.cones.push_back(k);
  p.inequalities.push_back({AffineExpr::variable(1, 0), "nonneg"});
  p.start = Eigen::VectorXd::Constant(1, 0.5);
  const SolveResult r = solve_subproblem(p);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.gap_bound <= 1e-9);
}

TEST_CASE("solver reports a bad start and an unbounded ray") {
  ConicSubproblem p;
  p.n_vars = 1;
  p.linear = Eigen::VectorXd::Ones(1);
  p.inequalities.push_back({AffineExpr::variable(1, 0), "nonneg"});
  p.start = Eigen::VectorXd::Constant(1, -1.0);
  SolveResult r = solve_subproblem(p);
  CHECK(r.status == SolveStatus::NoInteriorStart);
  CHECK(r.diagnostic.find("nonneg") != std::string::npos);

  p.start[0] = 1.0;
  r = solve_subproblem(p);
  CHECK(r.status == SolveStatus::Unbounded);
}

TEST_CASE("log objective is handled by the solver") {
  // maximize log(1 + x) - x/4 on x >= 0: optimum x = 3
  ConicSubproblem p;
  p.n_vars = 1;
  p.linear = Eigen::VectorXd::Constant(1, -0.25);
  p.log_index = 0;
  p.log_weight = 1.0;
  p.inequalities.push_back({AffineExpr::variable(1, 0), "nonneg"});
  p.start = Eigen::VectorXd::Constant(1, 1.0);
  const SolveResult r = solve_subproblem(p);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("subproblem is tight and feasible at its anchor") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const BeamformingProblem prob = random_bf_problem(4, rng, 5.0 + trial);
    const cvec w = project_power(random_cvec(4, rng), prob.quant.b_q, prob.power);
    const SCASubproblem sp = build_subproblem(prob, w);
    CHECK(sp.conic.max_violation(sp.anchor_point) < 1e-9);
    CHECK(sp.conic.strictly_feasible(sp.conic.start));
    CHECK(sp.conic.objective(sp.anchor_point) == doctest::Approx(secrecy_gap(prob, w)).epsilon(1e-10));
    CHECK((sp.precoder(sp.anchor_point) - w).norm() < 1e-12 * w.norm());

    const SolveResult r = solve_subproblem(sp.conic);
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.objective >= sp.conic.objective(sp.anchor_point) - 1e-8);
    // The surrogate never overstates the true objective.
    CHECK(secrecy_gap(prob, sp.precoder(r.x)) >= r.objective - 1e-8);
    CHECK(sp.conic.max_violation(r.x) <= 1e-9);
  }
}

TEST_CASE("subproblem without a user signal is rejected") {
  Rng rng(22);
  const BeamformingProblem prob = random_bf_problem(3, rng);
  CHECK_THROWS_AS(build_subproblem(prob, cvec::Zero(3)), std::invalid_argument);
}

TEST_CASE("subproblem optimum matches a grid search on a one-antenna slice") {
  Rng rng(23);
  for (int trial = 0; trial < 3; ++trial) {
    const BeamformingProblem prob = random_bf_problem(1, rng, 4.0, 1, 0.6);
    const cvec w = cvec::Constant(1, std::polar(0.5 * std::sqrt(prob.power / prob.quant.b_q), 0.3));
    const SCASubproblem sp = build_subproblem(prob, w);
    const SolveResult r = solve_subproblem(sp.conic);
    REQUIRE(r.status == SolveStatus::Optimal);

    const int n = 801;
    double best = -INFINITY;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const cplx x(-1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1));
        best = std::max(best, surrogate_value(prob, w, x));
      }
    CHECK(r.objective >= best - 1e-9);
    CHECK(r.objective <= best + 1e-3);
    CHECK(surrogate_value(prob, w, sp.precoder(r.x)[0] / sp.w_scale) == doctest::Approx(r.objective).epsilon(1e-6));
  }
}

TEST_CASE("without an eavesdropper the optimum spends full power") {
  Rng rng(24);
  BeamformingProblem prob = random_bf_problem(4, rng, 20.0);
  prob.rows.eve.setZero();

  // From a low-power start the iterates climb to the power limit.
  const cvec w = 0.3 * project_power(random_cvec(4, rng), prob.quant.b_q, prob.power);
  const SCAResult res = sca_solve(prob, w);
  CHECK(prob.quant.b_q * res.w.squaredNorm() == doctest::Approx(prob.power).epsilon(1e-6));

  // A full-power anchor is a fixed point of the subproblem.
  const SCASubproblem sp = build_subproblem(prob, res.w);
  const SolveResult r = solve_subproblem(sp.conic);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(prob.quant.b_q * sp.precoder(r.x).squaredNorm() == doctest::Approx(prob.power).epsilon(1e-6));
}

TEST_CASE("vanishing power gives a vanishing objective") {
  Rng rng(25);
  const BeamformingProblem prob = random_bf_problem(4, rng, 1e-12);
  const SCAResult res = sca_solve(prob, cvec());
  CHECK(std::abs(res.objective()) < 1e-10);
}

TEST_CASE("sca trace is non-decreasing and power-feasible") {
  Rng rng(26);
  for (int trial = 0; trial < 8; ++trial) {
    const BeamformingProblem prob = random_bf_problem(4, rng, 50.0, 1 + trial % 3, 0.8);
    const SCAResult res = sca_solve(prob, cvec());
    CHECK(res.converged);
    CHECK(res.warnings.empty());
    for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i].objective >= res.trace[i - 1].objective - 1e-6);
    for (const auto& it : res.trace) CHECK(it.power <= prob.power * (1.0 + 1e-6));
    CHECK(res.objective() == doctest::Approx(secrecy_gap(prob, res.w)).epsilon(1e-12));
  }
}

TEST_CASE("sca on the default deployment is monotone") {
  const SystemConfig cfg;
  Rng rng(27);
  const ChannelSet ch = gen_channels(cfg, rng);
  const PhaseVector ph = random_phases(cfg.n_ris, cfg.phase_levels, rng);
  const BeamformerState bf{build_codebook(cfg.n_tx, cfg.n_rf), cvec()};
  const SCAResult res = sca_solve(ch, ph, bf, QuantizationModel::from_bits(cfg.dac_bits), cfg);
  REQUIRE(res.trace.size() >= 2);
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i].objective >= res.trace[i - 1].objective - 1e-6);
  CHECK(res.objective() > res.trace.front().objective);
}

TEST_CASE("already optimal no-Eve scalar start stays put") {
  BeamformingProblem prob{LinkRows{cvec::Constant(1, cplx(0.8, -0.3)), cvec::Zero(1)}, QuantizationModel::from_bits(2),
                          NoisePowers{1.0, 1.0}, 3.0};
  const cvec w_full = mrt_beamformer(effective_links(prob.rows, cvec::Zero(1), prob.quant, prob.noise), prob.quant, prob.power);
  const SCAResult res = sca_solve(prob, w_full);
  CHECK(res.trace.size() <= 3);
  CHECK(res.objective() == doctest::Approx(res.trace.front().objective).epsilon(1e-9));
}

TEST_CASE("sca matches random sampling over the power ball for two RF chains") {
  Rng rng(28);
  for (int trial = 0; trial < 3; ++trial) {
    const BeamformingProblem prob = random_bf_problem(2, rng, 30.0, 1, 0.9);
    const SCAResult res = sca_solve(prob, cvec());
    const double radius = std::sqrt(prob.power / prob.quant.b_q);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u;
    double best = -INFINITY;
    for (int s = 0; s < 10000; ++s) {
      Eigen::Vector4d v(g(rng), g(rng), g(rng), g(rng));
      v *= std::pow(u(rng), 0.25) / v.norm();
      cvec w(2);
      w << cplx(v[0], v[1]), cplx(v[2], v[3]);
      best = std::max(best, secrecy_gap(prob, radius * w));
    }
    CHECK(res.objective() >= best - 0.02 * std::abs(best));
    CHECK(res.objective() <= best + 0.02 * std::abs(best));
  }
}

TEST_CASE("secrecy gradient matches central differences") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const BeamformingProblem prob = random_bf_problem(3, rng, 10.0, 1 + trial % 4, 0.8);
    const cvec w = random_cvec(3, rng);
    const cvec g = secrecy_gradient(prob, w);
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      cvec e = cvec::Zero(3);
      e[k] = h;
      const double dre = (secrecy_gap(prob, w + e) - secrecy_gap(prob, w - e)) / (2 * h);
      e[k] = cplx(0, h);
      const double dim = (secrecy_gap(prob, w + e) - secrecy_gap(prob, w - e)) / (2 * h);
      const double scale = std::max(1e-3, g.cwiseAbs().maxCoeff());
      CHECK(std::abs(g[k].real() - dre) <= 1e-5 * scale);
      CHECK(std::abs(g[k].imag() - dim) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("power projection") {
  Rng rng(30);
  const cvec w = random_cvec(5, rng) * 10.0;
  const cvec p = project_power(w, 0.6, 2.0);
  CHECK(0.6 * p.squaredNorm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK((p.normalized() - w.normalized()).norm() < 1e-14);
  const cvec small = w * 1e-3;
  CHECK(project_power(small, 0.6, 2.0) == small);
}

TEST_CASE("sca and projected gradient ascent agree") {
  Rng rng(31);
  std::vector<double> diffs;
  for (int trial = 0; trial < 20; ++trial) {
    const BeamformingProblem prob = random_bf_problem(3, rng, 20.0, 1, 0.8);
    const double a = std::max(0.0, sca_solve(prob, cvec()).objective());
    const double b = std::max(0.0, secrecy_gap(prob, pga_baseline(prob, cvec())));
    diffs.push_back(std::abs(a - b));
  }
  std::nth_element(diffs.begin(), diffs.begin() + 10, diffs.end());
  CHECK(diffs[10] <= 0.1);
}

TEST_CASE("mrt beamformer") {
  EffectiveLinks links;
  links.d_user = cvec::Zero(2);
  links.d_user[0] = 1.0;
  const cvec w = mrt_beamformer(links, QuantizationModel::ideal(), 1.0);
  CHECK(std::abs(w[0] - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(w[1]) == 0.0);

  Rng rng(32);
  const auto q = QuantizationModel::from_bits(1);
  for (int i = 0; i < 10; ++i) {
    links.d_user = random_cvec(1 + i, rng);
    const cvec v = mrt_beamformer(links, q, 7.5);
    CHECK(q.b_q * v.squaredNorm() == doctest::Approx(7.5).epsilon(1e-14));
  }
  links.d_user = cvec::Zero(3);
  CHECK(mrt_beamformer(links, q, 1.0).isZero());
}

TEST_CASE("scalar no-Eve sca matches full-power mrt") {
  BeamformingProblem prob{LinkRows{cvec::Constant(1, cplx(0.2, 0.9)), cvec::Zero(1)}, QuantizationModel::from_bits(1),
                          NoisePowers{1.0, 1.0}, 4.0};
  const cvec mrt = mrt_beamformer(effective_links(prob.rows, cvec::Zero(1), prob.quant, prob.noise), prob.quant, prob.power);
  const SCAResult res = sca_solve(prob, 0.1 * mrt);
  CHECK(res.objective() == doctest::Approx(secrecy_gap(prob, mrt)).epsilon(0.01));
}
