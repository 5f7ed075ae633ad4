#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rissec {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when array or matrix dimensions disagree with the configuration.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a scalar argument lies outside the domain of a model formula.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Node positions in meters.
struct Geometry {
  Eigen::Vector3d ap_pos{0.0, 0.0, 0.0};
  Eigen::Vector3d ris_pos{0.0, 60.0, 20.0};
  Eigen::Vector3d user_pos{5.0, 60.0, 0.0};
  Eigen::Vector3d eve_pos{5.0, 80.0, 0.0};
};

/// Scalar parameters of one downlink scenario.
///
/// The defaults describe the reference deployment: a 64-antenna AP with 8 RF
/// chains and 1-bit DACs serving a single-antenna user through a 16-element
/// RIS with 2-bit phase shifters, with an eavesdropper 20 m further down the
/// street.
struct SystemConfig {
  int n_tx = 64;
  int n_ris = 16;
  int n_rf = 8;
  int dac_bits = 1;
  int phase_levels = 4;
  /// Large because the cascaded AP->RIS->user path loss is around 235 dB;
  /// this is where rates land in the few-bits/s/Hz range.
  double power_watts = 1.0e10;
  double noise_user_dbm = -110.0;
  double noise_eve_dbm = -110.0;
  double shadowing_std_db = 1.0;
  int n_paths_g = 3;
  int n_paths_h = 3;
  /// Extra attenuation applied to the blocked AP->user/Eve direct links,
  /// which only the NO-RIS baseline uses.
  double direct_blockage_db = 110.0;
  Geometry geometry{};
  std::uint64_t seed = 1;

  double noise_user_watts() const;
  double noise_eve_watts() const;
  double phase_step() const { return kTwoPi / phase_levels; }
};

/// Returns every violated invariant of `cfg` as a human-readable message.
/// An empty list means the configuration is usable.
std::vector<std::string> validate_config(const SystemConfig& cfg);

/// Throws std::invalid_argument listing all violations when `cfg` is invalid.
void require_valid(const SystemConfig& cfg);

double dbm_to_watts(double dbm);

/// Complex channels for one realization.
///
/// `g` is the AP->RIS matrix (n_ris x n_tx), `h`/`h_e` the RIS->user and
/// RIS->Eve vectors. The direct AP->user/Eve vectors (length n_tx) are heavily
/// attenuated and are only consumed by the NO-RIS baseline.
struct ChannelSet {
  cmat g;
  cvec h;
  cvec h_e;
  cvec h_direct;
  cvec h_direct_eve;
};

/// Fixed analog codebook plus digital precoder.
struct BeamformerState {
  cmat f_rf;
  cvec w;
};

/// RIS phase configuration. Angles are stored canonically in [0, 2pi); the
/// unit-modulus reflection vector is always derived from them.
class PhaseVector {
public:
  PhaseVector() = default;

  /// Continuous phases, wrapped into [0, 2pi).
  static PhaseVector continuous(std::vector<double> phi);
  /// Discrete phases phi_i = index_i * 2pi / levels.
  static PhaseVector discrete(const std::vector<int>& indices, int levels);
  /// Wraps `phi` and checks that every entry lies on the `levels`-point grid.
  static PhaseVector on_grid(std::vector<double> phi, int levels);

  std::size_t size() const { return phi_.size(); }
  const std::vector<double>& phi() const { return phi_; }
  double operator[](std::size_t i) const { return phi_[i]; }
  cvec theta() const;
  static constexpr double amplitude() { return 1.0; }

  /// 0 for continuous phases, otherwise the size L of the discrete set.
  int levels() const { return levels_; }
  bool is_discrete() const { return levels_ > 0; }

  /// Copy with element `i` replaced.
  PhaseVector with(std::size_t i, double phi) const;

  bool operator==(const PhaseVector&) const = default;

private:
  std::vector<double> phi_;
  int levels_ = 0;
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double phi);

/// First `n_rf` columns of the unitary `n_tx`-point DFT matrix.
cmat build_codebook(int n_tx, int n_rf);

}  // namespace rissec
