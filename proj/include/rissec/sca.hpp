#pragma once

#include <string>
#include <vector>

#include "rissec/conic.hpp"
#include "rissec/rates.hpp"

namespace rissec {

/// Linearization point of one SCA iteration, in noise- and power-normalized
/// units (see SCASubproblem).
struct SCAAnchors {
  cvec w_bar;          // normalized precoder, ||w_bar|| <= 1
  double z_bar = 0.0;  // |D w_bar|
  double omega_bar = 0.0;
  double r_bar = 0.0;  // |D_e w_bar|
  double t_bar = 0.0;  // Eve rate at w_bar
};

/// Index layout of the real decision vector of the convexified subproblem:
/// [Re w (n), Im w (n), rho, z, omega, t, r, omega_e].
struct SCAVariables {
  int n_rf;
  int re(int k) const { return k; }
  int im(int k) const { return n_rf + k; }
  int rho() const { return 2 * n_rf; }
  int z() const { return 2 * n_rf + 1; }
  int omega() const { return 2 * n_rf + 2; }
  int t() const { return 2 * n_rf + 3; }
  int r() const { return 2 * n_rf + 4; }
  int omega_e() const { return 2 * n_rf + 5; }
  int size() const { return 2 * n_rf + 6; }
};

/// Convex inner approximation of the beamforming subproblem at an anchor.
///
/// Internally the precoder is normalized as w = w_scale * x with
/// w_scale = sqrt(P / b_q), so the power constraint reads ||x|| <= 1, and the
/// user and Eve rows are divided by their noise standard deviations.
struct SCASubproblem {
  ConicSubproblem conic;
  SCAAnchors anchors;
  SCAVariables vars;
  double w_scale = 0.0;
  /// Decision vector at the anchor (w_bar with its exact auxiliaries); every
  /// surrogate is tight here.
  Eigen::VectorXd anchor_point;

  /// Precoder (natural units) stored in a decision vector.
  cvec precoder(const Eigen::VectorXd& x) const;
};

/// Builds the convex subproblem around `w_anchor` (natural units).
/// Throws std::invalid_argument when D w_anchor = 0, where the user-side
/// linearization is vacuous.
SCASubproblem build_subproblem(const BeamformingProblem& prob, const cvec& w_anchor);

struct SCASettings {
  int max_iterations = 50;
  double tolerance = 1e-4;  // bits/s/Hz
  SolverSettings solver{};
};

struct SCAIterate {
  int iteration = 0;
  double objective = 0.0;  // R - R_e at this iterate
  double power = 0.0;      // b_q ||w||^2
  std::string status;
};

struct SCAResult {
  cvec w;
  std::vector<SCAIterate> trace;  // entry 0 is the initial point
  bool converged = false;
  std::vector<std::string> warnings;

  double objective() const { return trace.empty() ? 0.0 : trace.back().objective; }
};

/// Successive convex approximation for max_w R - R_e s.t. b_q ||w||^2 <= P.
/// Starts from `w0` (MRT when w0 is empty or carries no user signal) and
/// re-linearizes at each new iterate until the objective changes by less
/// than `settings.tolerance`.
SCAResult sca_solve(const BeamformingProblem& prob, const cvec& w0, const SCASettings& settings = {});

SCAResult sca_solve(const ChannelSet& ch, const PhaseVector& phases, const BeamformerState& bf,
                    const QuantizationModel& q, const SystemConfig& cfg, const SCASettings& settings = {});

/// Writes iteration,objective,power,status rows.
void write_sca_trace_csv(const SCAResult& res, const std::string& path);

// --- first-order cross-check -------------------------------------------------

/// R(w) - R_e(w), unclamped.
double secrecy_gap(const BeamformingProblem& prob, const cvec& w);

/// Steepest-ascent direction of secrecy_gap with respect to (Re w, Im w),
/// packed as a complex vector: d/dRe w_k + j d/dIm w_k.
cvec secrecy_gradient(const BeamformingProblem& prob, const cvec& w);

/// Scales `w` back onto the ball b_q ||w||^2 <= P when it lies outside.
cvec project_power(const cvec& w, double b_q, double power);

struct PGASettings {
  int max_iterations = 3000;
  double tolerance = 1e-12;
};

/// Projected gradient ascent with Armijo backtracking from `w0`.
cvec pga_baseline(const BeamformingProblem& prob, const cvec& w0, const PGASettings& settings = {});

/// MRT on the user's composite row, scaled to full power: sqrt(P/b_q) D^H/||D||.
/// Returns the zero vector when D = 0.
cvec mrt_beamformer(const EffectiveLinks& links, const QuantizationModel& q, double power);

}  // namespace rissec
