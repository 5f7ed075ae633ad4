#pragma once

#include <random>
#include <string>
#include <vector>

#include "rissec/model.hpp"

namespace rissec {

using Rng = std::mt19937_64;

/// One propagation path of the geometric model.
struct PathParams {
  cplx gain;          // small-scale coefficient, CN(0,1)
  double departure;   // radians
  double arrival;     // radians
};

/// Half-wavelength ULA response a_k = exp(j*pi*(k-1)*sin(angle)), k = 1..n.
cvec steering_vector(int n, double angle);

/// Large-scale loss 72 + 29.2 log10(d) + shadowing, in dB.
double path_loss_db(double distance_m, double shadowing_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

cplx complex_normal(Rng& rng);

/// Draws `n_paths` paths with CN(0,1) gains and angles uniform in [-pi/2, pi/2].
std::vector<PathParams> draw_paths(int n_paths, Rng& rng);

/// sqrt(1/(beta L)) * sum_l gain_l a(n_rx, arrival_l) a(n_tx, departure_l)^T.
cmat geometric_matrix(int n_rx, int n_tx, const std::vector<PathParams>& paths, double path_loss_linear);

/// sqrt(1/(beta L)) * sum_l gain_l a(n, arrival_l).
cvec geometric_vector(int n, const std::vector<PathParams>& paths, double path_loss_linear);

/// Draws one channel realization. Draw order is fixed (G, h, h_e, then the two
/// direct links), so a given RNG state always yields the same channels.
ChannelSet gen_channels(const SystemConfig& cfg, Rng& rng);

/// Writes each channel block as CSV, one row per matrix row with real and
/// imaginary parts interleaved.
void write_channels_csv(const ChannelSet& ch, const std::string& path);

}  // namespace rissec
