#include "rissec/ao.hpp"

#include <cmath>
#include <stdexcept>

namespace rissec {

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Proposed: return "proposed";
    case SchemeKind::MrtBcd: return "mrt_bcd";
    case SchemeKind::NoRis: return "no_ris";
    case SchemeKind::UpperBound: return "upper_bound";
  }
  return "unknown";
}

SchemeKind parse_scheme(const std::string& name) {
  for (SchemeKind k : kAllSchemes)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

PhaseVector random_phases(int n, int levels, Rng& rng) {
  if (levels > 0) {
    std::uniform_int_distribution<int> pick(0, levels - 1);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (auto& k : idx) k = pick(rng);
    return PhaseVector::discrete(idx, levels);
  }
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::vector<double> phi(static_cast<std::size_t>(n));
  for (auto& p : phi) p = ang(rng);
  return PhaseVector::continuous(std::move(phi));
}

namespace {

NoisePowers noise_of(const SystemConfig& cfg) { return {cfg.noise_user_watts(), cfg.noise_eve_watts()}; }

cvec initial_mrt(const BeamformingProblem& prob) {
  const cvec zero = cvec::Zero(prob.rows.user.size());
  return mrt_beamformer(effective_links(prob.rows, zero, prob.quant, prob.noise), prob.quant, prob.power);
}

void start_trace(AOResult& res, const RateTriple& r) {
  res.trace.push_back(r.secrecy);
  res.gap_trace.push_back(r.gap());
  res.rates = r;
}

void append_warnings(AOResult& res, const std::vector<std::string>& w) {
  res.warnings.insert(res.warnings.end(), w.begin(), w.end());
}

}  // namespace

AOResult ao_optimize(const ChannelSet& ch, const SystemConfig& cfg, const QuantizationModel& q, int levels,
                     const PhaseVector& initial, const AOSettings& settings) {
  const cmat f_rf = build_codebook(cfg.n_tx, cfg.n_rf);
  const NoisePowers noise = noise_of(cfg);
  AOResult res;
  res.initial_phases = initial;
  PhaseVector phases = initial;
  BeamformingProblem prob{cascade_rows(ch, phases, f_rf), q, noise, cfg.power_watts};
  cvec w = initial_mrt(prob);
  if (w.squaredNorm() == 0.0) res.warnings.emplace_back("MRT: user composite channel is zero");
  start_trace(res, evaluate_rates(prob, w));

  for (int j = 1; j <= settings.max_outer; ++j) {
    const SCAResult sca = sca_solve(prob, w, settings.sca);
    append_warnings(res, sca.warnings);
    w = sca.w;

    const PhaseProblem pp = make_phase_problem(ch, f_rf, w, q, noise);
    const BCDResult bcd = bcd_sweep(pp, phases, levels, settings.bcd);
    phases = bcd.phases;
    prob.rows = cascade_rows(ch, phases, f_rf);

    const RateTriple r = evaluate_rates(prob, w);
    const double delta = r.gap() - res.gap_trace.back();
    start_trace(res, r);
    res.iterations = j;
    if (std::abs(delta) < settings.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.w = w;
  res.phases = phases;
  return res;
}

AOResult ao_optimize(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng, const AOSettings& settings) {
  const PhaseVector init = random_phases(cfg.n_ris, cfg.phase_levels, rng);
  return ao_optimize(ch, cfg, QuantizationModel::from_bits(cfg.dac_bits), cfg.phase_levels, init, settings);
}

AOResult run_scheme(SchemeKind kind, const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                    const AOSettings& settings) {
  require_valid(cfg);
  const PhaseVector init = random_phases(cfg.n_ris, cfg.phase_levels, rng);
  const QuantizationModel q = QuantizationModel::from_bits(cfg.dac_bits);
  switch (kind) {
    case SchemeKind::Proposed:
      return ao_optimize(ch, cfg, q, cfg.phase_levels, init, settings);
    case SchemeKind::UpperBound:
      return ao_optimize(ch, cfg, QuantizationModel::ideal(), 0, init, settings);
    case SchemeKind::MrtBcd: {
      const cmat f_rf = build_codebook(cfg.n_tx, cfg.n_rf);
      const NoisePowers noise = noise_of(cfg);
      AOResult res;
      res.initial_phases = init;
      BeamformingProblem prob{cascade_rows(ch, init, f_rf), q, noise, cfg.power_watts};
      const cvec w = initial_mrt(prob);
      if (w.squaredNorm() == 0.0) res.warnings.emplace_back("MRT: user composite channel is zero");
      start_trace(res, evaluate_rates(prob, w));
      const BCDResult bcd = bcd_sweep(make_phase_problem(ch, f_rf, w, q, noise), init, cfg.phase_levels, settings.bcd);
      prob.rows = cascade_rows(ch, bcd.phases, f_rf);
      start_trace(res, evaluate_rates(prob, w));
      res.w = w;
      res.phases = bcd.phases;
      res.iterations = 1;
      res.converged = bcd.converged;
      return res;
    }
    case SchemeKind::NoRis: {
      const cmat f_rf = build_codebook(cfg.n_tx, cfg.n_rf);
      AOResult res;
      res.initial_phases = init;
      const BeamformingProblem prob{direct_rows(ch, f_rf), q, noise_of(cfg), cfg.power_watts};
      const cvec w0 = initial_mrt(prob);
      start_trace(res, evaluate_rates(prob, w0));
      const SCAResult sca = sca_solve(prob, w0, settings.sca);
      append_warnings(res, sca.warnings);
      start_trace(res, evaluate_rates(prob, sca.w));
      res.w = sca.w;
      res.iterations = 1;
      res.converged = sca.converged;
      return res;
    }
  }
  throw std::invalid_argument("unhandled scheme");
}

}  // namespace rissec
