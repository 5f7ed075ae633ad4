#include "rissec/phase_bcd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace rissec {

namespace {

constexpr int kGridPoints = 2048;
constexpr double kInvGolden = 0.6180339887498949;

struct TrigTable {
  std::array<double, kGridPoints> cos{};
  std::array<double, kGridPoints> sin{};
  TrigTable() {
    for (int k = 0; k < kGridPoints; ++k) {
      const double phi = kTwoPi * k / kGridPoints;
      cos[static_cast<std::size_t>(k)] = std::cos(phi);
      sin[static_cast<std::size_t>(k)] = std::sin(phi);
    }
  }
};

const TrigTable& grid_table() {
  static const TrigTable table;
  return table;
}

double eval_cs(const BCDCoefficients& k, double c, double s) {
  const double n1 = k.mu + k.mu_bar * c - k.mu_tilde * s;
  const double d1 = k.eta + k.eta_bar * c - k.eta_tilde * s;
  const double n2 = k.lambda + k.lambda_bar * c - k.lambda_tilde * s;
  const double d2 = k.rho + k.rho_bar * c - k.rho_tilde * s;
  return (n1 / d1) * (n2 / d2);
}

double rate_from(double signal, double interference) {
  return std::log1p(signal / interference) / std::numbers::ln2;
}

// 2 * (a conj(b)) summed, returned as (real, imag).
std::pair<double, double> cross(const cplx& a, const cplx& b) {
  const cplx p = 2.0 * a * std::conj(b);
  return {p.real(), p.imag()};
}

std::pair<double, double> cross(const Eigen::Ref<const Eigen::RowVectorXcd>& a,
                                const Eigen::Ref<const Eigen::RowVectorXcd>& b) {
  const cplx p = 2.0 * (a.array() * b.array().conjugate()).sum();
  return {p.real(), p.imag()};
}

// Running sums over all elements: S_c = sum theta_j c_j etc.
struct PhaseSums {
  cplx user;
  cplx eve;
  Eigen::RowVectorXcd user_dist;
  Eigen::RowVectorXcd eve_dist;

  PhaseSums(const PhaseProblem& pp, const cvec& theta)
      : user(dotu(theta, pp.c)),
        eve(dotu(theta, pp.d)),
        user_dist(theta.transpose() * pp.a),
        eve_dist(theta.transpose() * pp.b) {}

  void update(const PhaseProblem& pp, Eigen::Index i, cplx delta) {
    user += delta * pp.c[i];
    eve += delta * pp.d[i];
    user_dist += delta * pp.a.row(i);
    eve_dist += delta * pp.b.row(i);
  }
};

BCDCoefficients coefficients_from(const PhaseProblem& pp, const PhaseSums& sums, Eigen::Index i, cplx theta_i) {
  const cplx ci = pp.c[i];
  const cplx di = pp.d[i];
  const cplx p = sums.user - theta_i * ci;
  const cplx pe = sums.eve - theta_i * di;
  const Eigen::RowVectorXcd ai = pp.a.row(i);
  const Eigen::RowVectorXcd bi = pp.b.row(i);
  const Eigen::RowVectorXcd v = sums.user_dist - theta_i * ai;
  const Eigen::RowVectorXcd ve = sums.eve_dist - theta_i * bi;

  const auto [cp_re, cp_im] = cross(ci, p);
  const auto [dp_re, dp_im] = cross(di, pe);
  const auto [av_re, av_im] = cross(ai, v);
  const auto [bv_re, bv_im] = cross(bi, ve);
  const double user_int = ai.squaredNorm() + v.squaredNorm() + pp.noise.user;
  const double eve_int = bi.squaredNorm() + ve.squaredNorm() + pp.noise.eve;

  BCDCoefficients k;
  k.mu = std::norm(ci) + std::norm(p) + user_int;
  k.mu_bar = cp_re + av_re;
  k.mu_tilde = cp_im + av_im;
  k.eta = std::norm(di) + std::norm(pe) + eve_int;
  k.eta_bar = dp_re + bv_re;
  k.eta_tilde = dp_im + bv_im;
  k.lambda = eve_int;
  k.lambda_bar = bv_re;
  k.lambda_tilde = bv_im;
  k.rho = user_int;
  k.rho_bar = av_re;
  k.rho_tilde = av_im;
  return k;
}

double golden_max(const BCDCoefficients& k, double lo, double hi) {
  auto f = [&](double x) { return eval_cs(k, std::cos(x), std::sin(x)); };
  double x1 = hi - kInvGolden * (hi - lo);
  double x2 = lo + kInvGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvGolden * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvGolden * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Root of d log f / d phi in [lo, hi], given a + to - sign change.
double bisect_stationary(const BCDCoefficients& k, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (log_ratio_derivative(k, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PhaseProblem make_phase_problem(const ChannelSet& ch, const cmat& f_rf, const cvec& w, const QuantizationModel& q,
                                const NoisePowers& noise) {
  if (ch.g.cols() != f_rf.rows()) throw DimensionError("codebook rows disagree with n_tx");
  if (f_rf.cols() != w.size()) throw DimensionError("precoder length disagrees with n_rf");
  if (ch.h.size() != ch.g.rows() || ch.h_e.size() != ch.g.rows()) throw DimensionError("RIS channel lengths disagree");
  const cmat gf = ch.g * f_rf;  // n_ris x n_rf
  const cvec gfw = gf * w;
  const double sk = std::sqrt(q.distortion_weight());
  PhaseProblem pp;
  pp.c = q.b_q * ch.h.conjugate().cwiseProduct(gfw);
  pp.d = q.b_q * ch.h_e.conjugate().cwiseProduct(gfw);
  pp.a = sk * ch.h.conjugate().asDiagonal() * gf * w.asDiagonal();
  pp.b = sk * ch.h_e.conjugate().asDiagonal() * gf * w.asDiagonal();
  pp.noise = noise;
  return pp;
}

double phase_gap(const PhaseProblem& pp, const PhaseVector& phases) {
  if (phases.size() != pp.n_ris()) throw DimensionError("phase vector length disagrees with n_ris");
  const cvec theta = phases.theta();
  const double user_int = (theta.transpose() * pp.a).squaredNorm() + pp.noise.user;
  const double eve_int = (theta.transpose() * pp.b).squaredNorm() + pp.noise.eve;
  return rate_from(std::norm(dotu(theta, pp.c)), user_int) - rate_from(std::norm(dotu(theta, pp.d)), eve_int);
}

BCDCoefficients bcd_coefficients(const PhaseProblem& pp, const PhaseVector& phases, std::size_t i) {
  if (phases.size() != pp.n_ris()) throw DimensionError("phase vector length disagrees with n_ris");
  if (i >= pp.n_ris()) throw DimensionError("element index out of range");
  const cvec theta = phases.theta();
  const PhaseSums sums(pp, theta);
  const auto ii = static_cast<Eigen::Index>(i);
  return coefficients_from(pp, sums, ii, theta[ii]);
}

double ratio_objective(const BCDCoefficients& k, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double d1 = k.eta + k.eta_bar * c - k.eta_tilde * s;
  const double d2 = k.rho + k.rho_bar * c - k.rho_tilde * s;
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::logic_error("ratio objective denominator is not positive");
  return eval_cs(k, c, s);
}

double ratio_objective_tan(const BCDCoefficients& k, double t) {
  const double p = 1.0 + t * t;
  const double m = 1.0 - t * t;
  auto term = [&](double x, double xb, double xt) { return x * p + xb * m - 2.0 * xt * t; };
  return term(k.mu, k.mu_bar, k.mu_tilde) / term(k.eta, k.eta_bar, k.eta_tilde) *
         (term(k.lambda, k.lambda_bar, k.lambda_tilde) / term(k.rho, k.rho_bar, k.rho_tilde));
}

double log_ratio_derivative(const BCDCoefficients& k, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  auto term = [&](double x, double xb, double xt) { return (-xb * s - xt * c) / (x + xb * c - xt * s); };
  return term(k.mu, k.mu_bar, k.mu_tilde) - term(k.eta, k.eta_bar, k.eta_tilde) +
         term(k.lambda, k.lambda_bar, k.lambda_tilde) - term(k.rho, k.rho_bar, k.rho_tilde);
}

StationarityResidual stationarity_residual(const BCDCoefficients& k, double t) {
  auto term = [&](double x, double xb, double xt) {
    return ((x - xb) * t - xt) / (x * (1.0 + t * t) + xb * (1.0 - t * t) - 2.0 * xt * t);
  };
  const std::array<double, 4> terms{term(k.mu, k.mu_bar, k.mu_tilde), -term(k.eta, k.eta_bar, k.eta_tilde),
                                    term(k.lambda, k.lambda_bar, k.lambda_tilde),
                                    -term(k.rho, k.rho_bar, k.rho_tilde)};
  StationarityResidual r;
  for (double v : terms) {
    r.sum += v;
    r.abs_sum += std::abs(v);
  }
  return r;
}

double optimal_element_phase(const BCDCoefficients& k) {
  const auto& tab = grid_table();
  std::array<double, kGridPoints> vals{};
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  int kbest = 0;
  for (int j = 0; j < kGridPoints; ++j) {
    const auto u = static_cast<std::size_t>(j);
    vals[u] = eval_cs(k, tab.cos[u], tab.sin[u]);
    if (vals[u] > vmax) {
      vmax = vals[u];
      kbest = j;
    }
    vmin = std::min(vmin, vals[u]);
  }
  if (!(vmax > vmin)) return 0.0;

  // Local maxima of the grid, best first.
  std::vector<int> cands;
  for (int j = 0; j < kGridPoints; ++j) {
    const double prev = vals[static_cast<std::size_t>((j + kGridPoints - 1) % kGridPoints)];
    const double next = vals[static_cast<std::size_t>((j + 1) % kGridPoints)];
    const double cur = vals[static_cast<std::size_t>(j)];
    if (cur >= prev && cur >= next) cands.push_back(j);
  }
  std::stable_sort(cands.begin(), cands.end(), [&](int a, int b) {
    return vals[static_cast<std::size_t>(a)] > vals[static_cast<std::size_t>(b)];
  });
  if (cands.size() > 4) cands.resize(4);

  const double h = kTwoPi / kGridPoints;
  double best_phi = kbest * h;
  double best_val = vmax;
  auto f = [&](double x) { return eval_cs(k, std::cos(x), std::sin(x)); };
  for (int j : cands) {
    const double lo = (j - 1) * h;
    const double hi = (j + 1) * h;
    double x = golden_max(k, lo, hi);
    double fx = f(x);
    if (log_ratio_derivative(k, lo) > 0.0 && log_ratio_derivative(k, hi) < 0.0) {
      const double xb = bisect_stationary(k, lo, hi);
      const double fb = f(xb);
      if (fb >= fx * (1.0 - 4.0 * std::numeric_limits<double>::epsilon())) {
        x = xb;
        fx = fb;
      }
    }
    if (fx > best_val) {
      best_val = fx;
      best_phi = x;
    }
  }
  return wrap_angle(best_phi);
}

int nearest_level(double phi, int levels) {
  if (levels < 2) throw DomainError("phase levels must be >= 2");
  const double step = kTwoPi / levels;
  const double p = wrap_angle(phi);
  int k0 = static_cast<int>(std::floor(p / step));
  if (k0 >= levels) k0 = levels - 1;
  const int k1 = (k0 + 1) % levels;
  auto circ = [&](int k) {
    const double d = std::abs(p - k * step);
    return std::min(d, kTwoPi - d);
  };
  const double d0 = circ(k0);
  const double d1 = circ(k1);
  if (d0 < d1) return k0;
  if (d1 < d0) return k1;
  return std::min(k0, k1);
}

double project_discrete(double phi, int levels) { return nearest_level(phi, levels) * (kTwoPi / levels); }

BCDResult bcd_sweep(const PhaseProblem& pp, const PhaseVector& initial, int levels, const BCDSettings& settings) {
  if (initial.size() != pp.n_ris()) throw DimensionError("phase vector length disagrees with n_ris");
  if (levels != 0 && levels < 2) throw DomainError("phase levels must be 0 (continuous) or >= 2");
  const auto n = static_cast<Eigen::Index>(pp.n_ris());

  std::vector<double> phi = initial.phi();
  if (levels > 0)
    for (auto& p : phi) p = project_discrete(p, levels);
  cvec theta(n);
  for (Eigen::Index i = 0; i < n; ++i) theta[i] = std::polar(1.0, phi[static_cast<std::size_t>(i)]);

  BCDResult res;
  for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
    PhaseSums sums(pp, theta);  // refreshed each sweep to bound drift
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const BCDCoefficients k = coefficients_from(pp, sums, i, theta[i]);
      const double cont = optimal_element_phase(k);
      const double cand = levels > 0 ? project_discrete(cont, levels) : cont;
      const double f_cur = ratio_objective(k, phi[iu]);
      const double f_new = ratio_objective(k, cand);
      double f_kept = f_cur;
      if (cand != phi[iu] && f_new > f_cur * (1.0 + 1e-13)) {
        const cplx t_new = std::polar(1.0, cand);
        sums.update(pp, i, t_new - theta[i]);
        theta[i] = t_new;
        phi[iu] = cand;
        f_kept = f_new;
        changed = true;
      }
      res.trace.push_back({sweep, static_cast<int>(i), phi[iu], std::max(0.0, std::log2(f_kept))});
    }
    res.sweeps = sweep;
    if (!changed) {
      res.converged = true;
      break;
    }
  }
  res.phases = levels > 0 ? PhaseVector::on_grid(phi, levels) : PhaseVector::continuous(phi);
  return res;
}

PhaseVector exhaustive_phase_search(const PhaseProblem& pp, int levels) {
  if (levels < 2) throw DomainError("phase levels must be >= 2");
  const std::size_t n = pp.n_ris();
  const double count = std::pow(static_cast<double>(levels), static_cast<double>(n));
  if (count > 1e6)
    throw std::invalid_argument("exhaustive search over " + std::to_string(levels) + "^" + std::to_string(n) +
                                " configurations exceeds the 10^6 limit");
  std::vector<int> idx(n, 0);
  std::vector<int> best = idx;
  double best_gap = -std::numeric_limits<double>::infinity();
  const auto total = static_cast<long long>(std::llround(count));
  for (long long c = 0; c < total; ++c) {
    const double g = phase_gap(pp, PhaseVector::discrete(idx, levels));
    if (g > best_gap) {
      best_gap = g;
      best = idx;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (++idx[i] < levels) break;
      idx[i] = 0;
    }
  }
  return PhaseVector::discrete(best, levels);
}

void write_bcd_trace_csv(const BCDResult& res, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "sweep,element,phi,secrecy_rate\n" << std::setprecision(9);
  for (const auto& t : res.trace) os << t.sweep << ',' << t.element << ',' << t.phi << ',' << t.secrecy << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace rissec
