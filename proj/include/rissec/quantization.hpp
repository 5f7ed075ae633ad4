#pragma once

#include "rissec/model.hpp"

namespace rissec {

/// Linear (AQNM) surrogate of a b-bit DAC: Q(x) ~ b_q x + q with
/// distortion covariance b_q (1 - b_q) diag(x x^H).
struct QuantizationModel {
  int bits = 0;        // 0 denotes an ideal, unquantized transmitter
  double eta = 0.0;    // distortion factor
  double b_q = 1.0;    // linear gain, 1 - eta

  static QuantizationModel from_bits(int bits);
  static QuantizationModel ideal() { return {}; }

  /// b_q (1 - b_q), the weight of the distortion term.
  double distortion_weight() const { return b_q * (1.0 - b_q); }
};

/// Distortion factor: 0.3634 for one bit, (pi sqrt(3)/2) 2^(-2b) otherwise.
double distortion_factor(int bits);

/// Diagonal of the distortion covariance, b_q (1 - b_q) |w_i|^2.
rvec quant_covariance(double b_q, const cvec& w);

/// ||b_q w||^2 + tr(A_Q); equals b_q ||w||^2.
double transmit_power(double b_q, const cvec& w);

}  // namespace rissec
