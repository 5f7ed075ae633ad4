#include "doctest.h"
#include "support.hpp"

using namespace rissec;
using testsupport::random_cvec;
using testsupport::random_phase_problem;

namespace {

BCDCoefficients random_coefficients(Rng& rng) {
  std::uniform_int_distribution<int> n(2, 8);
  const PhaseProblem pp = random_phase_problem(n(rng), 3, rng);
  const PhaseVector ph = random_phases(static_cast<int>(pp.n_ris()), 0, rng);
  return bcd_coefficients(pp, ph, 0);
}

double grid_max(const BCDCoefficients& k, int n) {
  double best = -INFINITY;
  for (int j = 0; j < n; ++j) best = std::max(best, ratio_objective(k, kTwoPi * j / n));
  return best;
}

}  // namespace

TEST_CASE("ratio objective equals 2^(R - R_e) from the rate model") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    SystemConfig cfg = testsupport::small_config();
    cfg.n_ris = 2 + trial % 7;
    cfg.dac_bits = 1 + trial % 3;
    cfg.noise_eve_dbm = -112.0;
    const ChannelSet ch = gen_channels(cfg, rng);
    const cmat f = build_codebook(cfg.n_tx, cfg.n_rf);
    const auto q = QuantizationModel::from_bits(cfg.dac_bits);
    const cvec w = random_cvec(cfg.n_rf, rng) * 3e4;
    const NoisePowers noise{cfg.noise_user_watts(), cfg.noise_eve_watts()};
    const PhaseVector ph = random_phases(cfg.n_ris, 0, rng);
    const PhaseProblem pp = make_phase_problem(ch, f, w, q, noise);
    const RateTriple r = evaluate_rates(cascade_rows(ch, ph, f), w, q, noise);
    const double target = std::exp2(r.gap());
    for (std::size_t i = 0; i < ph.size(); ++i) {
      const BCDCoefficients k = bcd_coefficients(pp, ph, i);
      CHECK(std::abs(ratio_objective(k, ph[i]) / target - 1.0) < 1e-10);
    }
    CHECK(phase_gap(pp, ph) == doctest::Approx(r.gap()).epsilon(1e-10));
  }
}

TEST_CASE("single element has no cross terms") {
  Rng rng(42);
  const PhaseProblem pp = random_phase_problem(1, 3, rng);
  const BCDCoefficients k = bcd_coefficients(pp, PhaseVector::continuous({0.4}), 0);
  CHECK(k.mu_bar == 0.0);
  CHECK(k.mu_tilde == 0.0);
  CHECK(k.eta_bar == 0.0);
  CHECK(k.eta_tilde == 0.0);
  CHECK(k.lambda_bar == 0.0);
  CHECK(k.lambda_tilde == 0.0);
  CHECK(k.rho_bar == 0.0);
  CHECK(k.rho_tilde == 0.0);
  CHECK(ratio_objective(k, 0.0) == doctest::Approx(ratio_objective(k, 2.0)).epsilon(1e-14));
}

TEST_CASE("zero precoder makes the objective identically one") {
  Rng rng(43);
  const SystemConfig cfg = testsupport::small_config();
  const ChannelSet ch = gen_channels(cfg, rng);
  const PhaseProblem pp = make_phase_problem(ch, build_codebook(cfg.n_tx, cfg.n_rf), cvec::Zero(cfg.n_rf),
                                             QuantizationModel::from_bits(1), {1e-14, 1e-14});
  const PhaseVector ph = random_phases(cfg.n_ris, 4, rng);
  for (std::size_t i = 0; i < ph.size(); ++i) {
    const BCDCoefficients k = bcd_coefficients(pp, ph, i);
    for (double phi : {0.0, 1.0, 3.0, 5.5}) CHECK(ratio_objective(k, phi) == 1.0);
  }
}

TEST_CASE("flat coefficients") {
  BCDCoefficients k;
  k.mu = 3.0;
  k.eta = 2.0;
  k.lambda = 1.5;
  k.rho = 1.2;
  for (double phi : {0.0, 0.7, 3.14, 6.0}) CHECK(ratio_objective(k, phi) == doctest::Approx(3.0 * 1.5 / (2.0 * 1.2)));
  CHECK(optimal_element_phase(k) == 0.0);
}

TEST_CASE("trigonometric and half-angle forms agree") {
  Rng rng(44);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int i = 0; i < 200; ++i) {
    const BCDCoefficients k = random_coefficients(rng);
    double phi = u(rng);
    if (std::abs(phi - std::numbers::pi) < 1e-3) phi += 0.01;
    CHECK(std::abs(ratio_objective(k, phi) / ratio_objective_tan(k, std::tan(phi / 2)) - 1.0) < 1e-12);
    const double at0 = (k.mu + k.mu_bar) * (k.lambda + k.lambda_bar) / ((k.eta + k.eta_bar) * (k.rho + k.rho_bar));
    CHECK(ratio_objective(k, 0.0) == doctest::Approx(at0).epsilon(1e-14));
  }
}

TEST_CASE("log-derivative matches finite differences") {
  Rng rng(45);
  for (int i = 0; i < 50; ++i) {
    const BCDCoefficients k = random_coefficients(rng);
    const double phi = 0.1 + 0.12 * i;
    const double h = 1e-6;
    const double fd = (std::log(ratio_objective(k, phi + h)) - std::log(ratio_objective(k, phi - h))) / (2 * h);
    CHECK(log_ratio_derivative(k, phi) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("element optimum is stationary and matches a dense grid") {
  Rng rng(46);
  for (int i = 0; i < 5; ++i) {
    const BCDCoefficients k = random_coefficients(rng);
    const double phi = optimal_element_phase(k);
    const double best = grid_max(k, 1000000);
    const double f = ratio_objective(k, phi);
    CHECK(f >= best - 1e-8 * best);
    if (std::abs(phi - std::numbers::pi) > 1e-6) CHECK(stationarity_residual(k, std::tan(phi / 2)).normalized() < 1e-6);
    CHECK(std::abs(log_ratio_derivative(k, phi)) < 1e-6);
  }
}

TEST_CASE("discrete projection") {
  const double step = kTwoPi / 4;
  CHECK(project_discrete(0.9 * step, 4) == doctest::Approx(step));
  CHECK(project_discrete(kTwoPi - step / 4, 4) == 0.0);
  CHECK(nearest_level(step / 2, 4) == 0);
  CHECK(nearest_level(1.5 * step, 4) == 1);
  CHECK(nearest_level(3.5 * step, 4) == 0);
  CHECK(nearest_level(-0.1, 4) == 0);
  CHECK(nearest_level(2.0 * step, 4) == 2);
  CHECK_THROWS_AS(nearest_level(0.0, 1), DomainError);
}

TEST_CASE("bcd never decreases the objective and stays on the grid") {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const PhaseProblem pp = random_phase_problem(6, 3, rng);
    const PhaseVector init = random_phases(6, 4, rng);
    const BCDResult res = bcd_sweep(pp, init, 4);
    CHECK(res.converged);
    CHECK(res.phases.levels() == 4);
    CHECK(phase_gap(pp, res.phases) >= phase_gap(pp, init) - 1e-12);
    double prev = -INFINITY;
    for (const auto& e : res.trace) {
      CHECK(e.secrecy >= prev - 1e-12);
      prev = e.secrecy;
    }
  }
}

TEST_CASE("fine discrete grid tracks continuous bcd") {
  Rng rng(48);
  for (int trial = 0; trial < 5; ++trial) {
    const PhaseProblem pp = random_phase_problem(5, 3, rng);
    const PhaseVector init = PhaseVector::continuous(std::vector<double>(5, 0.0));
    const BCDResult cont = bcd_sweep(pp, init, 0);
    const BCDResult fine = bcd_sweep(pp, init, 1 << 20);
    CHECK(std::abs(phase_gap(pp, cont.phases) - phase_gap(pp, fine.phases)) < 1e-6);
  }
}

TEST_CASE("a converged configuration is a fixed point") {
  Rng rng(49);
  const PhaseProblem pp = random_phase_problem(7, 3, rng);
  const BCDResult first = bcd_sweep(pp, random_phases(7, 4, rng), 4);
  const BCDResult again = bcd_sweep(pp, first.phases, 4);
  CHECK(again.sweeps == 1);
  CHECK(again.converged);
  CHECK(again.phases == first.phases);
}

TEST_CASE("exhaustive search on tiny surfaces") {
  Rng rng(50);
  {
    const PhaseProblem pp = random_phase_problem(1, 2, rng);
    double best = -INFINITY;
    int arg = -1;
    for (int k = 0; k < 4; ++k) {
      const double g = phase_gap(pp, PhaseVector::discrete({k}, 4));
      if (g > best) {
        best = g;
        arg = k;
      }
    }
    CHECK(exhaustive_phase_search(pp, 4) == PhaseVector::discrete({arg}, 4));
  }
  {
    const PhaseProblem pp = random_phase_problem(2, 2, rng);
    double best = -INFINITY;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) best = std::max(best, phase_gap(pp, PhaseVector::discrete({a, b}, 2)));
    CHECK(phase_gap(pp, exhaustive_phase_search(pp, 2)) == best);
  }
  const PhaseProblem big = random_phase_problem(11, 2, rng);
  CHECK_THROWS_AS(exhaustive_phase_search(big, 4), std::invalid_argument);
}

TEST_CASE("bcd is bounded by exhaustive search") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const PhaseProblem pp = random_phase_problem(3, 3, rng);
    const PhaseVector init = random_phases(3, 4, rng);
    const double bcd = phase_gap(pp, bcd_sweep(pp, init, 4).phases);
    const double ex = phase_gap(pp, exhaustive_phase_search(pp, 4));
    CHECK(bcd <= ex + 1e-9);
  }
}

TEST_CASE("off-grid start is projected in discrete mode") {
  Rng rng(52);
  const PhaseProblem pp = random_phase_problem(4, 2, rng);
  const BCDResult res = bcd_sweep(pp, PhaseVector::continuous({0.1, 1.7, 3.0, 4.9}), 4);
  CHECK(res.phases.is_discrete());
  CHECK_THROWS_AS(bcd_sweep(pp, random_phases(3, 4, rng), 4), DimensionError);
  CHECK_THROWS_AS(bcd_sweep(pp, random_phases(4, 4, rng), 1), DomainError);
}
