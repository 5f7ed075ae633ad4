#include "rissec/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rissec/config_io.hpp"

namespace rissec {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double SystemConfig::noise_user_watts() const { return dbm_to_watts(noise_user_dbm); }
double SystemConfig::noise_eve_watts() const { return dbm_to_watts(noise_eve_dbm); }

std::vector<std::string> validate_config(const SystemConfig& cfg) {
  std::vector<std::string> errs;
  if (cfg.n_tx < 1) errs.emplace_back("n_tx must be >= 1");
  if (cfg.n_ris < 1) errs.emplace_back("n_ris must be >= 1");
  if (cfg.n_rf < 1) errs.emplace_back("n_rf must be >= 1");
  if (cfg.n_rf > cfg.n_tx) errs.emplace_back("n_rf exceeds n_tx");
  if (cfg.dac_bits < 1) errs.emplace_back("dac_bits must be >= 1");
  if (cfg.phase_levels < 2) errs.emplace_back("L must be >= 2 (phase_levels)");
  if (!(cfg.power_watts > 0.0) || !std::isfinite(cfg.power_watts))
    errs.emplace_back("power_watts must be positive and finite");
  if (!std::isfinite(cfg.noise_user_dbm)) errs.emplace_back("noise_user_dbm must be finite");
  if (!std::isfinite(cfg.noise_eve_dbm)) errs.emplace_back("noise_eve_dbm must be finite");
  if (!(cfg.shadowing_std_db >= 0.0)) errs.emplace_back("shadowing_std_db must be >= 0");
  if (cfg.n_paths_g < 1) errs.emplace_back("n_paths_g must be >= 1");
  if (cfg.n_paths_h < 1) errs.emplace_back("n_paths_h must be >= 1");
  if (!std::isfinite(cfg.direct_blockage_db)) errs.emplace_back("direct_blockage_db must be finite");
  const auto& g = cfg.geometry;
  if ((g.ap_pos - g.ris_pos).norm() <= 0.0) errs.emplace_back("AP and RIS positions coincide");
  if ((g.ris_pos - g.user_pos).norm() <= 0.0) errs.emplace_back("RIS and user positions coincide");
  if ((g.ris_pos - g.eve_pos).norm() <= 0.0) errs.emplace_back("RIS and Eve positions coincide");
  if ((g.ap_pos - g.user_pos).norm() <= 0.0) errs.emplace_back("AP and user positions coincide");
  if ((g.ap_pos - g.eve_pos).norm() <= 0.0) errs.emplace_back("AP and Eve positions coincide");
  return errs;
}

void require_valid(const SystemConfig& cfg) {
  const auto errs = validate_config(cfg);
  if (errs.empty()) return;
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : errs) os << "\n  - " << e;
  throw std::invalid_argument(os.str());
}

double wrap_angle(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below a multiple of 2pi can round up to 2pi itself.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

PhaseVector PhaseVector::continuous(std::vector<double> phi) {
  PhaseVector pv;
  for (auto& p : phi) {
    if (!std::isfinite(p)) throw DomainError("phase angle must be finite");
    p = wrap_angle(p);
  }
  pv.phi_ = std::move(phi);
  return pv;
}

PhaseVector PhaseVector::discrete(const std::vector<int>& indices, int levels) {
  if (levels < 2) throw DomainError("phase levels must be >= 2");
  PhaseVector pv;
  pv.levels_ = levels;
  pv.phi_.reserve(indices.size());
  const double step = kTwoPi / levels;
  for (int k : indices) {
    if (k < 0 || k >= levels) throw DomainError("phase index out of range");
    pv.phi_.push_back(k * step);
  }
  return pv;
}

namespace {

int grid_index(double phi, int levels) {
  const double x = phi / (kTwoPi / levels);
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-9) return -1;
  return static_cast<int>(k) % levels;
}

}  // namespace

PhaseVector PhaseVector::on_grid(std::vector<double> phi, int levels) {
  if (levels < 2) throw DomainError("phase levels must be >= 2");
  std::vector<int> idx;
  idx.reserve(phi.size());
  for (double p : phi) {
    const int k = grid_index(wrap_angle(p), levels);
    if (k < 0) throw DomainError("phase angle is not on the discrete grid");
    idx.push_back(k);
  }
  return discrete(idx, levels);
}

cvec PhaseVector::theta() const {
  cvec t(static_cast<Eigen::Index>(phi_.size()));
  for (std::size_t i = 0; i < phi_.size(); ++i) t[static_cast<Eigen::Index>(i)] = std::polar(1.0, phi_[i]);
  return t;
}

PhaseVector PhaseVector::with(std::size_t i, double phi) const {
  if (i >= phi_.size()) throw DimensionError("phase index out of range");
  PhaseVector out = *this;
  const double p = wrap_angle(phi);
  if (levels_ > 0) {
    const int k = grid_index(p, levels_);
    if (k < 0) throw DomainError("phase angle is not on the discrete grid");
    out.phi_[i] = k * (kTwoPi / levels_);
  } else {
    out.phi_[i] = p;
  }
  return out;
}

cmat build_codebook(int n_tx, int n_rf) {
  if (n_tx < 1 || n_rf < 1) throw DimensionError("codebook dimensions must be positive");
  if (n_rf > n_tx) throw DimensionError("n_rf exceeds n_tx");
  cmat f(n_tx, n_rf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_tx));
  for (int m = 0; m < n_tx; ++m) {
    for (int k = 0; k < n_rf; ++k) {
      // Reduce the exponent modulo n_tx so the angle stays small and exact.
      const long e = (static_cast<long>(m) * k) % n_tx;
      f(m, k) = std::polar(scale, -kTwoPi * static_cast<double>(e) / n_tx);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Eigen::Vector3d vec3_from_json(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument(std::string(key) + " must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json vec3_to_json(const Eigen::Vector3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("unknown key '" + key + "' in " + what);
  }
}

}  // namespace

void to_json(nlohmann::json& j, const Geometry& g) {
  j = {{"ap_pos", vec3_to_json(g.ap_pos)},
       {"ris_pos", vec3_to_json(g.ris_pos)},
       {"user_pos", vec3_to_json(g.user_pos)},
       {"eve_pos", vec3_to_json(g.eve_pos)}};
}

void from_json(const nlohmann::json& j, Geometry& g) {
  reject_unknown(j, {"ap_pos", "ris_pos", "user_pos", "eve_pos"}, "geometry");
  if (j.contains("ap_pos")) g.ap_pos = vec3_from_json(j["ap_pos"], "ap_pos");
  if (j.contains("ris_pos")) g.ris_pos = vec3_from_json(j["ris_pos"], "ris_pos");
  if (j.contains("user_pos")) g.user_pos = vec3_from_json(j["user_pos"], "user_pos");
  if (j.contains("eve_pos")) g.eve_pos = vec3_from_json(j["eve_pos"], "eve_pos");
}

void to_json(nlohmann::json& j, const SystemConfig& c) {
  j = {{"n_tx", c.n_tx},
       {"n_ris", c.n_ris},
       {"n_rf", c.n_rf},
       {"dac_bits", c.dac_bits},
       {"phase_levels", c.phase_levels},
       {"power_watts", c.power_watts},
       {"noise_user_dbm", c.noise_user_dbm},
       {"noise_eve_dbm", c.noise_eve_dbm},
       {"shadowing_std_db", c.shadowing_std_db},
       {"n_paths_g", c.n_paths_g},
       {"n_paths_h", c.n_paths_h},
       {"direct_blockage_db", c.direct_blockage_db},
       {"geometry", c.geometry},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, SystemConfig& c) {
  reject_unknown(j,
                 {"n_tx", "n_ris", "n_rf", "dac_bits", "phase_levels", "power_watts", "noise_user_dbm",
                  "noise_eve_dbm", "shadowing_std_db", "n_paths_g", "n_paths_h", "direct_blockage_db", "geometry",
                  "seed"},
                 "system config");
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  read("n_tx", c.n_tx);
  read("n_ris", c.n_ris);
  read("n_rf", c.n_rf);
  read("dac_bits", c.dac_bits);
  read("phase_levels", c.phase_levels);
  read("power_watts", c.power_watts);
  read("noise_user_dbm", c.noise_user_dbm);
  read("noise_eve_dbm", c.noise_eve_dbm);
  read("shadowing_std_db", c.shadowing_std_db);
  read("n_paths_g", c.n_paths_g);
  read("n_paths_h", c.n_paths_h);
  read("direct_blockage_db", c.direct_blockage_db);
  read("geometry", c.geometry);
  read("seed", c.seed);
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  SystemConfig cfg = nlohmann::json::parse(in).get<SystemConfig>();
  require_valid(cfg);
  return cfg;
}

}  // namespace rissec
