#include "rissec/quantization.hpp"

#include <cmath>

namespace rissec {

namespace {
constexpr double kOneBitDistortion = 0.3634;
}

double distortion_factor(int bits) {
  if (bits <= 0) throw DomainError("DAC resolution must be at least one bit");
  if (bits == 1) return kOneBitDistortion;
  return std::numbers::pi * std::sqrt(3.0) / 2.0 * std::ldexp(1.0, -2 * bits);
}

QuantizationModel QuantizationModel::from_bits(int bits) {
  QuantizationModel q;
  q.bits = bits;
  q.eta = distortion_factor(bits);
  q.b_q = 1.0 - q.eta;
  return q;
}

rvec quant_covariance(double b_q, const cvec& w) {
  if (!(b_q > 0.0 && b_q <= 1.0)) throw DomainError("b_q must lie in (0, 1]");
  return b_q * (1.0 - b_q) * w.cwiseAbs2();
}

double transmit_power(double b_q, const cvec& w) {
  return (b_q * w).squaredNorm() + quant_covariance(b_q, w).sum();
}

}  // namespace rissec
