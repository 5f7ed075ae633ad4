#pragma once

#include "rissec/model.hpp"
#include "rissec/quantization.hpp"

namespace rissec {

/// Composite rows seen by the digital precoder, u = h^H Theta G F_RF for the
/// user and the same with h_e for Eve. The received amplitude is sum_k u_k w_k.
struct LinkRows {
  cvec user;
  cvec eve;
};

LinkRows cascade_rows(const ChannelSet& ch, const PhaseVector& phases, const cmat& f_rf);

/// Rows of the direct AP->receiver links, h_d^H F_RF.
LinkRows direct_rows(const ChannelSet& ch, const cmat& f_rf);

struct NoisePowers {
  double user;
  double eve;
};

/// Everything the digital-beamforming subproblem needs once the RIS phases
/// are fixed.
struct BeamformingProblem {
  LinkRows rows;
  QuantizationModel quant;
  NoisePowers noise;
  double power;
};

/// D = b_q u, and the rate denominators
/// omega = b_q (1 - b_q) ||u diag(w)||^2 + sigma^2 for both receivers.
struct EffectiveLinks {
  cvec d_user;
  cvec d_eve;
  double omega_user = 0.0;
  double omega_eve = 0.0;
};

EffectiveLinks effective_links(const LinkRows& rows, const cvec& w, const QuantizationModel& q,
                               const NoisePowers& noise);
EffectiveLinks effective_links(const ChannelSet& ch, const PhaseVector& phases, const BeamformerState& bf,
                               const QuantizationModel& q, double noise_user, double noise_eve);

/// sum_k a_k b_k, no conjugation.
inline cplx dotu(const cvec& a, const cvec& b) { return (a.array() * b.array()).sum(); }

/// log2(1 + |D w|^2 / omega).
double user_rate(const EffectiveLinks& links, const cvec& w);
double eve_rate(const EffectiveLinks& links, const cvec& w);

/// max(0, r_user - r_eve).
double secrecy_rate(double r_user, double r_eve);

struct RateTriple {
  double user = 0.0;
  double eve = 0.0;
  double secrecy = 0.0;
  /// Unclamped difference user - eve.
  double gap() const { return user - eve; }
};

RateTriple evaluate_rates(const LinkRows& rows, const cvec& w, const QuantizationModel& q, const NoisePowers& noise);
inline RateTriple evaluate_rates(const BeamformingProblem& p, const cvec& w) {
  return evaluate_rates(p.rows, w, p.quant, p.noise);
}

}  // namespace rissec
