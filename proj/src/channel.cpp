#include "rissec/channel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace rissec {

cvec steering_vector(int n, double angle) {
  if (n <= 0) throw DimensionError("steering vector length must be positive");
  const double s = std::sin(angle);
  cvec a(n);
  for (int k = 0; k < n; ++k) a[k] = std::polar(1.0, std::numbers::pi * k * s);
  return a;
}

double path_loss_db(double distance_m, double shadowing_db) {
  if (!(distance_m > 0.0)) throw DomainError("path loss distance must be positive");
  return 72.0 + 29.2 * std::log10(distance_m) + shadowing_db;
}

cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

std::vector<PathParams> draw_paths(int n_paths, Rng& rng) {
  std::uniform_real_distribution<double> ang(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::vector<PathParams> out;
  out.reserve(static_cast<std::size_t>(n_paths));
  for (int l = 0; l < n_paths; ++l) {
    PathParams p;
    p.gain = complex_normal(rng);
    p.departure = ang(rng);
    p.arrival = ang(rng);
    out.push_back(p);
  }
  return out;
}

cmat geometric_matrix(int n_rx, int n_tx, const std::vector<PathParams>& paths, double path_loss_linear) {
  if (paths.empty()) throw DimensionError("at least one path is required");
  cmat m = cmat::Zero(n_rx, n_tx);
  for (const auto& p : paths)
    m.noalias() += p.gain * steering_vector(n_rx, p.arrival) * steering_vector(n_tx, p.departure).transpose();
  return m * std::sqrt(1.0 / (path_loss_linear * static_cast<double>(paths.size())));
}

cvec geometric_vector(int n, const std::vector<PathParams>& paths, double path_loss_linear) {
  if (paths.empty()) throw DimensionError("at least one path is required");
  cvec v = cvec::Zero(n);
  for (const auto& p : paths) v += p.gain * steering_vector(n, p.arrival);
  return v * std::sqrt(1.0 / (path_loss_linear * static_cast<double>(paths.size())));
}

ChannelSet gen_channels(const SystemConfig& cfg, Rng& rng) {
  require_valid(cfg);
  const auto& geo = cfg.geometry;
  std::normal_distribution<double> shadow(0.0, 1.0);
  auto draw_loss = [&](double d, double extra_db) {
    const double zeta = cfg.shadowing_std_db * shadow(rng);
    return db_to_linear(path_loss_db(d, zeta) + extra_db);
  };

  ChannelSet ch;
  {
    const double beta = draw_loss((geo.ap_pos - geo.ris_pos).norm(), 0.0);
    ch.g = geometric_matrix(cfg.n_ris, cfg.n_tx, draw_paths(cfg.n_paths_g, rng), beta);
  }
  {
    const double beta = draw_loss((geo.ris_pos - geo.user_pos).norm(), 0.0);
    ch.h = geometric_vector(cfg.n_ris, draw_paths(cfg.n_paths_h, rng), beta);
  }
  {
    const double beta = draw_loss((geo.ris_pos - geo.eve_pos).norm(), 0.0);
    ch.h_e = geometric_vector(cfg.n_ris, draw_paths(cfg.n_paths_h, rng), beta);
  }
  {
    // Departure angles at the AP play the role of the vector's array angle.
    const double beta = draw_loss((geo.ap_pos - geo.user_pos).norm(), cfg.direct_blockage_db);
    ch.h_direct = geometric_vector(cfg.n_tx, draw_paths(cfg.n_paths_h, rng), beta);
  }
  {
    const double beta = draw_loss((geo.ap_pos - geo.eve_pos).norm(), cfg.direct_blockage_db);
    ch.h_direct_eve = geometric_vector(cfg.n_tx, draw_paths(cfg.n_paths_h, rng), beta);
  }
  return ch;
}

namespace {

void write_block(std::ostream& os, const char* name, const cmat& m) {
  os << "# " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) os << ',';
      os << m(r, c).real() << ',' << m(r, c).imag();
    }
    os << '\n';
  }
}

}  // namespace

void write_channels_csv(const ChannelSet& ch, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << std::setprecision(17);
  write_block(os, "G", ch.g);
  write_block(os, "h", ch.h);
  write_block(os, "h_e", ch.h_e);
  write_block(os, "h_direct", ch.h_direct);
  write_block(os, "h_direct_eve", ch.h_direct_eve);
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace rissec
