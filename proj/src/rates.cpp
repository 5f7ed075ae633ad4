#include "rissec/rates.hpp"

#include <algorithm>
#include <cmath>

namespace rissec {

namespace {

void check_dims(const ChannelSet& ch, std::size_t n_phases, const cmat& f_rf) {
  const auto n_ris = ch.g.rows();
  if (ch.h.size() != n_ris || ch.h_e.size() != n_ris) throw DimensionError("RIS channel lengths disagree with G");
  if (static_cast<Eigen::Index>(n_phases) != n_ris) throw DimensionError("phase vector length disagrees with n_ris");
  if (f_rf.rows() != ch.g.cols()) throw DimensionError("codebook rows disagree with n_tx");
}

double rate_of(const cvec& d, double omega, const cvec& w) {
  if (d.size() != w.size()) throw DimensionError("precoder length disagrees with n_rf");
  return std::log1p(std::norm(dotu(d, w)) / omega) / std::numbers::ln2;
}

}  // namespace

LinkRows cascade_rows(const ChannelSet& ch, const PhaseVector& phases, const cmat& f_rf) {
  check_dims(ch, phases.size(), f_rf);
  const cvec theta = phases.theta();
  const cmat gf = ch.g * f_rf;
  LinkRows rows;
  rows.user = gf.transpose() * (ch.h.conjugate().cwiseProduct(theta));
  rows.eve = gf.transpose() * (ch.h_e.conjugate().cwiseProduct(theta));
  return rows;
}

LinkRows direct_rows(const ChannelSet& ch, const cmat& f_rf) {
  if (ch.h_direct.size() != f_rf.rows() || ch.h_direct_eve.size() != f_rf.rows())
    throw DimensionError("direct channel length disagrees with n_tx");
  return {f_rf.transpose() * ch.h_direct.conjugate(), f_rf.transpose() * ch.h_direct_eve.conjugate()};
}

EffectiveLinks effective_links(const LinkRows& rows, const cvec& w, const QuantizationModel& q,
                               const NoisePowers& noise) {
  if (rows.user.size() != w.size() || rows.eve.size() != w.size())
    throw DimensionError("precoder length disagrees with the effective rows");
  const double kappa = q.distortion_weight();
  const rvec w2 = w.cwiseAbs2();
  EffectiveLinks l;
  l.d_user = q.b_q * rows.user;
  l.d_eve = q.b_q * rows.eve;
  l.omega_user = kappa * rows.user.cwiseAbs2().dot(w2) + noise.user;
  l.omega_eve = kappa * rows.eve.cwiseAbs2().dot(w2) + noise.eve;
  return l;
}

EffectiveLinks effective_links(const ChannelSet& ch, const PhaseVector& phases, const BeamformerState& bf,
                               const QuantizationModel& q, double noise_user, double noise_eve) {
  return effective_links(cascade_rows(ch, phases, bf.f_rf), bf.w, q, {noise_user, noise_eve});
}

double user_rate(const EffectiveLinks& links, const cvec& w) { return rate_of(links.d_user, links.omega_user, w); }
double eve_rate(const EffectiveLinks& links, const cvec& w) { return rate_of(links.d_eve, links.omega_eve, w); }

double secrecy_rate(double r_user, double r_eve) { return std::max(0.0, r_user - r_eve); }

RateTriple evaluate_rates(const LinkRows& rows, const cvec& w, const QuantizationModel& q, const NoisePowers& noise) {
  const auto links = effective_links(rows, w, q, noise);
  RateTriple r;
  r.user = user_rate(links, w);
  r.eve = eve_rate(links, w);
  r.secrecy = secrecy_rate(r.user, r.eve);
  return r;
}

}  // namespace rissec
