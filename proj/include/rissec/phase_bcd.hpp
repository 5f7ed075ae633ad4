#pragma once

#include <string>
#include <vector>

#include "rissec/rates.hpp"

namespace rissec {

/// Scalars describing the objective as a function of one RIS phase phi with
/// all other phases fixed:
///
///   f(phi) = (mu + mu_bar cos - mu_tilde sin) / (eta + eta_bar cos - eta_tilde sin)
///          * (lambda + lambda_bar cos - lambda_tilde sin) / (rho + rho_bar cos - rho_tilde sin)
///
/// f equals (1 + SINR_user) / (1 + SINR_eve) = 2^(R - R_e). The four affine
/// trigonometric terms are, in order, user signal-plus-interference, Eve
/// signal-plus-interference, Eve interference and user interference.
struct BCDCoefficients {
  double mu = 0, mu_bar = 0, mu_tilde = 0;
  double eta = 0, eta_bar = 0, eta_tilde = 0;
  double lambda = 0, lambda_bar = 0, lambda_tilde = 0;
  double rho = 0, rho_bar = 0, rho_tilde = 0;
};

/// Per-element quantities of the phase subproblem for a fixed precoder w.
///
///   c_i  = b_q conj(h_i) (G F_RF w)_i         d_i  = same with h_e
///   a_ik = sqrt(b_q(1-b_q)) conj(h_i) (G F_RF)_ik w_k,   b_ik = same with h_e
///
/// so that sum_i theta_i c_i = D w and ||sum_i theta_i a_i||^2 is the user's
/// distortion power.
struct PhaseProblem {
  cvec c;
  cvec d;
  cmat a;  // n_ris x n_rf
  cmat b;
  NoisePowers noise;

  std::size_t n_ris() const { return static_cast<std::size_t>(c.size()); }
};

PhaseProblem make_phase_problem(const ChannelSet& ch, const cmat& f_rf, const cvec& w, const QuantizationModel& q,
                                const NoisePowers& noise);

/// R - R_e for the given phases (unclamped).
double phase_gap(const PhaseProblem& pp, const PhaseVector& phases);

/// Coefficients for element `i` with the remaining phases taken from `phases`.
BCDCoefficients bcd_coefficients(const PhaseProblem& pp, const PhaseVector& phases, std::size_t i);

/// f(phi) in trigonometric form. Throws std::logic_error when a denominator is
/// not positive, which can only come from inconsistent coefficients.
double ratio_objective(const BCDCoefficients& k, double phi);

/// f expressed in t = tan(phi/2).
double ratio_objective_tan(const BCDCoefficients& k, double t);

/// d log f / d phi.
double log_ratio_derivative(const BCDCoefficients& k, double phi);

/// Stationarity equation in t = tan(phi/2): the signed sum of the four terms
/// ((x - x_bar) t - x_tilde) / (x (1+t^2) + x_bar (1-t^2) - 2 x_tilde t).
struct StationarityResidual {
  double sum = 0.0;
  double abs_sum = 0.0;
  /// |sum| / abs_sum, or 0 when every term vanishes.
  double normalized() const { return abs_sum > 0.0 ? std::abs(sum) / abs_sum : 0.0; }
};

StationarityResidual stationarity_residual(const BCDCoefficients& k, double t);

/// Global maximizer of f over [0, 2pi): 2048-point grid, golden-section
/// refinement of the best grid brackets, then a bisection on d log f / d phi to
/// land on the stationary point. Returns 0 for a flat objective.
double optimal_element_phase(const BCDCoefficients& k);

/// Index of the level of {0, 2pi/L, ..., (L-1) 2pi/L} closest to `phi` in
/// circular distance; ties go to the smaller index.
int nearest_level(double phi, int levels);
double project_discrete(double phi, int levels);

struct BCDSettings {
  int max_sweeps = 50;
};

struct BCDTraceEntry {
  int sweep = 0;
  int element = 0;
  double phi = 0.0;
  double secrecy = 0.0;  // clamped secrecy rate after the element update
};

struct BCDResult {
  PhaseVector phases;
  int sweeps = 0;
  bool converged = false;
  std::vector<BCDTraceEntry> trace;
};

/// Element-wise block coordinate ascent. For each element the continuous
/// optimum is computed, projected onto the discrete set (skipped when
/// `levels` is 0) and kept only when it strictly improves the objective.
/// Stops after a sweep that changes nothing.
BCDResult bcd_sweep(const PhaseProblem& pp, const PhaseVector& initial, int levels, const BCDSettings& settings = {});

/// Brute-force optimum over all L^n_ris discrete configurations. Refuses
/// instances with more than 10^6 configurations.
PhaseVector exhaustive_phase_search(const PhaseProblem& pp, int levels);

void write_bcd_trace_csv(const BCDResult& res, const std::string& path);

}  // namespace rissec
