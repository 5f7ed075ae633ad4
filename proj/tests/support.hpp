#pragma once

#include <cmath>

#include "rissec/ao.hpp"

namespace testsupport {

using namespace rissec;

inline cvec random_cvec(Eigen::Index n, Rng& rng) {
  cvec v(n);
  for (auto& x : v) x = complex_normal(rng);
  return v;
}

/// Small deployment that keeps the unit tests fast.
inline SystemConfig small_config() {
  SystemConfig cfg;
  cfg.n_tx = 16;
  cfg.n_ris = 8;
  cfg.n_rf = 4;
  return cfg;
}

/// Unit-noise beamforming problem with random rows.
inline BeamformingProblem random_bf_problem(int n_rf, Rng& rng, double power = 10.0, int bits = 1,
                                            double eve_scale = 0.5) {
  LinkRows rows{random_cvec(n_rf, rng), eve_scale * random_cvec(n_rf, rng)};
  return BeamformingProblem{rows, QuantizationModel::from_bits(bits), NoisePowers{1.0, 1.0}, power};
}

/// Phase subproblem with i.i.d. entries; consistent by construction.
inline PhaseProblem random_phase_problem(int n_ris, int n_rf, Rng& rng, double eve_scale = 0.7) {
  PhaseProblem pp;
  pp.c = random_cvec(n_ris, rng);
  pp.d = eve_scale * random_cvec(n_ris, rng);
  pp.a = 0.4 * cmat::NullaryExpr(n_ris, n_rf, [&] { return complex_normal(rng); });
  pp.b = 0.4 * eve_scale * cmat::NullaryExpr(n_ris, n_rf, [&] { return complex_normal(rng); });
  pp.noise = {1.0, 0.8};
  return pp;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace testsupport
