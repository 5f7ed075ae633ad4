#include "rissec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rissec/config_io.hpp"

namespace rissec {

using nlohmann::json;

std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::None: return "none";
    case SweepKind::NRis: return "n_ris";
    case SweepKind::DacBits: return "dac_bits";
    case SweepKind::Power: return "power";
  }
  return "unknown";
}

SweepKind parse_sweep(const std::string& name) {
  for (SweepKind k : {SweepKind::None, SweepKind::NRis, SweepKind::DacBits, SweepKind::Power})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

std::vector<double> ExperimentConfig::points() const {
  if (sweep == SweepKind::None) return {std::numeric_limits<double>::quiet_NaN()};
  return sweep_values;
}

SystemConfig ExperimentConfig::config_at(double value) const {
  SystemConfig cfg = base;
  switch (sweep) {
    case SweepKind::None: break;
    case SweepKind::NRis: cfg.n_ris = static_cast<int>(value); break;
    case SweepKind::DacBits: cfg.dac_bits = static_cast<int>(value); break;
    case SweepKind::Power: cfg.power_watts = value; break;
  }
  return cfg;
}

void validate_experiment(const ExperimentConfig& exp) {
  std::vector<std::string> errs;
  if (exp.n_trials < 1) errs.emplace_back("n_trials must be >= 1");
  if (exp.schemes.empty()) errs.emplace_back("schemes must not be empty");
  if (exp.ao.max_outer < 1) errs.emplace_back("ao.max_outer must be >= 1");
  if (exp.sweep != SweepKind::None) {
    if (exp.sweep_values.empty()) errs.emplace_back("sweep values must not be empty");
    for (std::size_t i = 0; i < exp.sweep_values.size(); ++i) {
      const double v = exp.sweep_values[i];
      if (!std::isfinite(v)) errs.emplace_back("sweep values must be finite");
      if (i > 0 && !(v > exp.sweep_values[i - 1])) errs.emplace_back("sweep values must be strictly increasing");
      if (exp.sweep != SweepKind::Power && v != std::floor(v))
        errs.emplace_back(to_string(exp.sweep) + " sweep values must be integers");
    }
  }
  if (errs.empty()) {
    for (double v : exp.points())
      for (const auto& e : validate_config(exp.config_at(v))) errs.push_back(e);
  }
  if (!errs.empty()) {
    std::string msg = "invalid experiment:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* what) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw std::invalid_argument(std::string("unknown key '") + item.key() + "' in " + what);
  }
}

}  // namespace

void from_json(const json& j, ExperimentConfig& exp) {
  if (!j.is_object()) throw std::invalid_argument("experiment must be a JSON object");
  reject_unknown(j, {"base", "sweep", "n_trials", "schemes", "output", "master_seed", "ao"}, "experiment");
  if (j.contains("base")) exp.base = j.at("base").get<SystemConfig>();
  exp.master_seed = j.value("master_seed", exp.base.seed);
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.is_string()) {
      exp.sweep = parse_sweep(s.get<std::string>());
      if (exp.sweep != SweepKind::None) throw std::invalid_argument("sweep '" + s.get<std::string>() + "' needs values");
    } else {
      reject_unknown(s, {"parameter", "values"}, "sweep");
      exp.sweep = parse_sweep(s.at("parameter").get<std::string>());
      exp.sweep_values = s.value("values", std::vector<double>{});
    }
  }
  exp.n_trials = j.value("n_trials", exp.n_trials);
  if (j.contains("schemes")) {
    exp.schemes.clear();
    for (const auto& name : j.at("schemes")) exp.schemes.push_back(parse_scheme(name.get<std::string>()));
  }
  exp.output_path = j.value("output", exp.output_path);
  if (j.contains("ao")) {
    const json& a = j.at("ao");
    reject_unknown(a, {"max_outer", "tolerance"}, "ao");
    exp.ao.max_outer = a.value("max_outer", exp.ao.max_outer);
    exp.ao.tolerance = a.value("tolerance", exp.ao.tolerance);
  }
}

void to_json(json& j, const ExperimentConfig& exp) {
  j = json::object();
  j["base"] = exp.base;
  if (exp.sweep == SweepKind::None)
    j["sweep"] = "none";
  else
    j["sweep"] = {{"parameter", to_string(exp.sweep)}, {"values", exp.sweep_values}};
  j["n_trials"] = exp.n_trials;
  json schemes = json::array();
  for (SchemeKind k : exp.schemes) schemes.push_back(to_string(k));
  j["schemes"] = schemes;
  j["output"] = exp.output_path;
  j["master_seed"] = exp.master_seed;
  j["ao"] = {{"max_outer", exp.ao.max_outer}, {"tolerance", exp.ao.tolerance}};
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  ExperimentConfig exp;
  try {
    exp = json::parse(in).get<ExperimentConfig>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  validate_experiment(exp);
  return exp;
}

std::uint64_t trial_seed(std::uint64_t master, int trial) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialRecord run_trial(const ExperimentConfig& exp, double sweep_value, SchemeKind scheme, int trial) {
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = trial_seed(exp.master_seed, trial);
  rec.scheme = scheme;
  rec.sweep_value = sweep_value;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SystemConfig cfg = exp.config_at(sweep_value);
    Rng rng(rec.seed);
    const ChannelSet ch = gen_channels(cfg, rng);
    const AOResult res = run_scheme(scheme, ch, cfg, rng, exp.ao);
    rec.user = res.rates.user;
    rec.eve = res.rates.eve;
    rec.secrecy = res.rates.secrecy;
    rec.iterations = res.iterations;
    rec.converged = res.converged;
    rec.warnings = static_cast<int>(res.warnings.size());
  } catch (const std::exception& e) {
    rec.user = rec.eve = rec.secrecy = std::numeric_limits<double>::quiet_NaN();
    rec.error = e.what();
    std::replace(rec.error.begin(), rec.error.end(), '\n', ' ');
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<TrialRecord> run_monte_carlo(const ExperimentConfig& exp, const RunOptions& opts) {
  validate_experiment(exp);
  const std::vector<double> pts = exp.points();
  const std::size_t n_schemes = exp.schemes.size();
  const std::size_t n_trials = static_cast<std::size_t>(exp.n_trials);
  const std::size_t total = pts.size() * n_schemes * n_trials;

  // Slot index is the canonical (sweep, scheme, trial) position, so the
  // output order never depends on scheduling.
  std::vector<TrialRecord> out(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      const std::size_t trial = idx % n_trials;
      const std::size_t scheme = (idx / n_trials) % n_schemes;
      const std::size_t point = idx / (n_trials * n_schemes);
      out[idx] = run_trial(exp, pts[point], exp.schemes[scheme], static_cast<int>(trial));
    }
  };
  const int n_threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(total)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

namespace {

std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' || c == '\r' ? ' ' : c;
  }
  return q + "\"";
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> f(1);
  bool in_q = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_q) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        f.back() += '"';
        ++i;
      } else if (c == '"') {
        in_q = false;
      } else {
        f.back() += c;
      }
    } else if (c == '"') {
      in_q = true;
    } else if (c == ',') {
      f.emplace_back();
    } else {
      f.back() += c;
    }
  }
  return f;
}

double to_double(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

const char* kHeader = "trial,seed,scheme,sweep_value,secrecy_rate,user_rate,eve_rate,iterations,converged,warnings,error";

}  // namespace

std::string format_csv(const std::vector<TrialRecord>& records, const CsvOptions& opts) {
  if (records.empty()) throw std::invalid_argument("no records");
  std::string s = kHeader;
  if (opts.timing) s += ",wall_ms";
  s += '\n';
  for (const auto& r : records) {
    // Rates are rounded first so the secrecy column is reproducible from the
    // other two columns of the same row.
    const double user = to_double(fmt_real(r.user));
    const double eve = to_double(fmt_real(r.eve));
    const double secrecy = std::isnan(user) || std::isnan(eve) ? user + eve : std::max(0.0, user - eve);
    if (!std::isnan(secrecy) && std::abs(secrecy - r.secrecy) > 1e-12 + 2e-9 * (std::abs(r.user) + std::abs(r.eve)))
      throw std::logic_error("trial " + std::to_string(r.trial) + ": secrecy rate " + shortest(r.secrecy) +
                             " disagrees with max(0, R - R_e) for R = " + shortest(r.user) + ", R_e = " + shortest(r.eve));
    s += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + to_string(r.scheme) + ',';
    if (!std::isnan(r.sweep_value)) s += fmt_real(r.sweep_value);
    s += ',' + shortest(secrecy) + ',' + fmt_real(user) + ',' + fmt_real(eve) + ',' + std::to_string(r.iterations) + ',' +
         (r.converged ? "1" : "0") + ',' + std::to_string(r.warnings) + ',' + quote(r.error);
    if (opts.timing) s += ',' + fmt_real(r.wall_ms);
    s += '\n';
  }
  return s;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path + ": " + std::strerror(errno));
}

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path, const CsvOptions& opts) {
  write_text_file(path, format_csv(records, opts));
}

std::vector<TrialRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  const std::vector<std::string> header = split_row(line);
  const bool timing = header.size() == 12;
  if (line.rfind(kHeader, 0) != 0 || header.size() < 11 || header.size() > 12)
    throw std::invalid_argument("unexpected CSV header: " + line);
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_row(line);
    if (f.size() != header.size()) throw std::invalid_argument("wrong field count in row: " + line);
    TrialRecord r;
    r.trial = std::stoi(f[0]);
    r.seed = std::stoull(f[1]);
    r.scheme = parse_scheme(f[2]);
    r.sweep_value = to_double(f[3]);
    r.secrecy = to_double(f[4]);
    r.user = to_double(f[5]);
    r.eve = to_double(f[6]);
    r.iterations = std::stoi(f[7]);
    r.converged = f[8] == "1";
    r.warnings = std::stoi(f[9]);
    r.error = f[10];
    if (timing) r.wall_ms = to_double(f[11]);
    out.push_back(std::move(r));
  }
  return out;
}

json campaign_metadata(const ExperimentConfig& exp) {
  json j;
  j["experiment"] = exp;
  j["n_trials"] = exp.n_trials;
  j["master_seed"] = exp.master_seed;
  j["trial_seed"] = "splitmix64 mix of master_seed + 0x9E3779B97F4A7C15 * (trial + 1); shared by all schemes and sweep points";
  j["averaging"] = "arithmetic mean of secrecy_rate over trials for each (sweep_value, scheme)";
  return j;
}

std::string format_convergence_trace(const AOResult& result) {
  if (result.trace.empty()) throw std::invalid_argument("empty trace");
  std::string s = "iteration,secrecy_rate\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) s += std::to_string(i) + ',' + fmt_real(result.trace[i]) + '\n';
  return s;
}

void emit_convergence_trace(const AOResult& result, const std::string& path) {
  write_text_file(path, format_convergence_trace(result));
}

OracleRecord run_oracle_trial(const SystemConfig& cfg, std::uint64_t seed, int trial) {
  require_valid(cfg);
  OracleRecord rec;
  rec.trial = trial;
  rec.seed = seed;
  Rng rng(seed);
  const ChannelSet ch = gen_channels(cfg, rng);
  const PhaseVector init = random_phases(cfg.n_ris, cfg.phase_levels, rng);
  const cmat f_rf = build_codebook(cfg.n_tx, cfg.n_rf);
  const QuantizationModel q = QuantizationModel::from_bits(cfg.dac_bits);
  const NoisePowers noise{cfg.noise_user_watts(), cfg.noise_eve_watts()};
  const LinkRows rows = cascade_rows(ch, init, f_rf);
  const cvec w = mrt_beamformer(effective_links(rows, cvec::Zero(cfg.n_rf), q, noise), q, cfg.power_watts);
  const PhaseProblem pp = make_phase_problem(ch, f_rf, w, q, noise);

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  const BCDResult bcd = bcd_sweep(pp, init, cfg.phase_levels);
  auto t1 = clock::now();
  const PhaseVector best = exhaustive_phase_search(pp, cfg.phase_levels);
  auto t2 = clock::now();
  rec.bcd = std::max(0.0, phase_gap(pp, bcd.phases));
  rec.exhaustive = std::max(0.0, phase_gap(pp, best));
  rec.bcd_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rec.exhaustive_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  return rec;
}

std::vector<OracleRecord> run_oracle(const SystemConfig& cfg, int n_trials, std::uint64_t master_seed) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  std::vector<OracleRecord> out;
  for (int t = 0; t < n_trials; ++t) out.push_back(run_oracle_trial(cfg, trial_seed(master_seed, t), t));
  return out;
}

std::string format_oracle_csv(const std::vector<OracleRecord>& records, const CsvOptions& opts) {
  if (records.empty()) throw std::invalid_argument("no records");
  std::string s = "trial,seed,bcd_secrecy_rate,exhaustive_secrecy_rate";
  if (opts.timing) s += ",bcd_ms,exhaustive_ms";
  s += '\n';
  for (const auto& r : records) {
    s += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + fmt_real(r.bcd) + ',' + fmt_real(r.exhaustive);
    if (opts.timing) s += ',' + fmt_real(r.bcd_ms) + ',' + fmt_real(r.exhaustive_ms);
    s += '\n';
  }
  return s;
}

}  // namespace rissec
