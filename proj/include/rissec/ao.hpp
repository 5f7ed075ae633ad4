#pragma once

#include <string>
#include <vector>

#include "rissec/channel.hpp"
#include "rissec/phase_bcd.hpp"
#include "rissec/sca.hpp"

namespace rissec {

enum class SchemeKind { Proposed, MrtBcd, NoRis, UpperBound };

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::Proposed, SchemeKind::MrtBcd, SchemeKind::NoRis,
                                             SchemeKind::UpperBound};

std::string to_string(SchemeKind k);
/// Accepts "proposed", "mrt_bcd", "no_ris", "upper_bound".
SchemeKind parse_scheme(const std::string& name);

struct AOSettings {
  int max_outer = 20;
  double tolerance = 1e-4;  // on R - R_e between outer iterations
  SCASettings sca{};
  BCDSettings bcd{};
};

struct AOResult {
  cvec w;
  PhaseVector phases;
  PhaseVector initial_phases;
  /// Secrecy rate after each outer iteration; entry 0 is the initial point.
  std::vector<double> trace;
  /// Unclamped R - R_e alongside `trace`.
  std::vector<double> gap_trace;
  RateTriple rates;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// L^-uniform draw from the discrete set (continuous draws when levels == 0).
PhaseVector random_phases(int n, int levels, Rng& rng);

/// Alternates SCA beamforming and element-wise BCD from the given phases and
/// an MRT precoder. `levels == 0` keeps the phases continuous.
AOResult ao_optimize(const ChannelSet& ch, const SystemConfig& cfg, const QuantizationModel& q, int levels,
                     const PhaseVector& initial, const AOSettings& settings = {});

/// Proposed scheme with initial phases drawn from `rng`.
AOResult ao_optimize(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng, const AOSettings& settings = {});

/// Runs one comparison scheme. Initial phases are always drawn from `rng` first,
/// so every scheme started from the same RNG state sees the same draw.
AOResult run_scheme(SchemeKind kind, const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                    const AOSettings& settings = {});

}  // namespace rissec
