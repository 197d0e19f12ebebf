#include "muskat/verify.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace muskat {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-';
  });
}

std::optional<double> parse_double(std::string text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.erase(0, 1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string join(std::span<const double> values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ",";
    out += format_number(values[k]);
  }
  return out;
}

bool compare(double value, const std::string& relation, double threshold) {
  if (relation == "<") return value < threshold;
  if (relation == "<=") return value <= threshold;
  if (relation == ">") return value > threshold;
  if (relation == ">=") return value >= threshold;
  if (relation == "==") return value == threshold;
  throw std::invalid_argument("check: unknown relation '" + relation + "'");
}

std::string indexed(const std::string& prefix, std::size_t k, const std::string& field) {
  return prefix + "." + std::to_string(k) + "." + field;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double sup_slope(const Curve& curve, const Grid& grid) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < grid.size(); ++k) worst = std::max(worst, std::abs(curve.perturbation(grid[k], 1)));
  return worst;
}

// Exact threshold of the stable tilted construction, |grad g| = (c + 1/2)/sqrt(1 + beta^2).
double tilted_chain_rule_threshold(double beta) { return 0.5 * (std::sqrt(1.0 + beta * beta) - 1.0); }

void record_stable_thresholds(VerificationReport& report, const Curve& curve, const Grid& grid) {
  const double beta = curve.beta();
  const double slope = sup_slope(curve, grid);
  report.set("stable.slope_norm", slope);
  if (slope < std::abs(beta)) {
    const double formula = c_max(Regime::stable, beta, slope);
    report.set("stable.c_max_formula", formula);
    if (curve.has_zero_perturbation()) {
      const double exact = tilted_chain_rule_threshold(beta);
      report.set("stable.c_threshold_chain_rule", exact);
      report.set("stable.threshold_discrepancy", std::abs(formula - exact) > 1e-12);
    }
  } else {
    report.set("stable.c_max_formula", std::string("undefined"));
  }
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

// ---- Config ----------------------------------------------------------------

Config Config::parse(std::istream& in, const std::string& source) {
  Config config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (config.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    config.entries_[key] = {value, where};
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in, path.string());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  entries_[key] = {value, "<override>"};
}

const Config::Entry& Config::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
  read_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return entry(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const Entry& e = entry(key);
  const auto v = parse_double(e.value);
  if (!v || !std::isfinite(*v)) throw ConfigError(e.where + ": '" + key + "' is not a finite number: " + e.value);
  return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = entry(key);
  long value = 0;
  const auto [end, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), value);
  if (ec != std::errc() || end != e.value.data() + e.value.size())
    throw ConfigError(e.where + ": '" + key + "' is not an integer: " + e.value);
  return value;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = entry(key);
  if (e.value == "true" || e.value == "on" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "off" || e.value == "no" || e.value == "0") return false;
  throw ConfigError(e.where + ": '" + key + "' is not a boolean: " + e.value);
}

std::vector<double> Config::get_list(const std::string& key) const {
  const Entry& e = entry(key);
  std::vector<double> out;
  std::stringstream items(e.value);
  std::string item;
  while (std::getline(items, item, ',')) {
    const auto v = parse_double(item);
    if (!v || !std::isfinite(*v)) throw ConfigError(e.where + ": '" + key + "' has a non-numeric item '" + trim(item) + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError(e.where + ": '" + key + "' is an empty list");
  return out;
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? get_list(key) : fallback;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, e] : entries_)
    if (!read_.count(key)) out.push_back(key);
  return out;
}

// ---- Scenario --------------------------------------------------------------

std::vector<double> dyadic_ladder(double t0, int k_max) {
  if (!(t0 > 0.0) || k_max < 0) throw std::invalid_argument("dyadic_ladder: need t0 > 0 and k_max >= 0");
  std::vector<double> out;
  for (int k = 0; k <= k_max; ++k) out.push_back(std::ldexp(t0, -k));
  return out;
}

namespace {

template <class F>
auto with_key(const std::string& key, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::array<double, 2> pair_of(const Config& config, const std::string& key, std::array<double, 2> fallback) {
  if (!config.has(key)) return fallback;
  const auto v = config.get_list(key);
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(key + ": expected 'lo, hi' with lo < hi");
  return {v[0], v[1]};
}

}  // namespace

Scenario scenario_from_config(const Config& config) {
  Scenario sc;
  sc.name = config.get_string("name", sc.name);

  sc.curve = with_key("curve", [&] {
    const CurveKind kind = curve_kind_from_string(config.get_string("curve.kind", "flat"));
    const double beta = config.get_double("curve.beta", 0.0);
    const double alpha = config.get_double("curve.alpha", 0.5);
    switch (kind) {
      case CurveKind::flat:
        if (beta != 0.0) throw std::invalid_argument("flat curve has beta = 0; use curve.kind = tilted");
        return Curve::flat(alpha);
      case CurveKind::tilted: return Curve::tilted(beta, alpha);
      case CurveKind::gaussian_bump:
        return Curve::gaussian_bump(config.get_double("curve.amplitude"), config.get_double("curve.width"), beta, alpha);
      case CurveKind::rational_bump:
        return Curve::rational_bump(config.get_double("curve.amplitude"), config.get_double("curve.width"), beta, alpha);
      case CurveKind::sampled: break;
    }
    throw std::invalid_argument("sampled curves are not available from config files");
  });
  sc.regime = with_key("regime", [&] { return regime_from_string(config.get_string("regime", "unstable")); });

  sc.speeds = with_key("speeds", [&] {
    if (config.get_string("speeds", "0.5") == "near-max")
      return SpeedFamily::near_max(static_cast<int>(config.get_int("speeds.n", 1)), config.get_double("speeds.eps"));
    return SpeedFamily(config.get_list("speeds", {0.5}));
  });

  sc.grid = with_key("grid", [&] {
    return Grid(config.get_double("grid.s_max", sc.grid.s_max()), config.get_int("grid.n", sc.grid.size()));
  });
  sc.quad.inner_n = static_cast<int>(config.get_int("quad.inner_n", sc.quad.inner_n));
  sc.quad.outer_r = config.get_double("quad.outer_r", sc.quad.outer_r);
  sc.quad.outer_n = static_cast<int>(config.get_int("quad.outer_n_per_decade", sc.quad.outer_n));
  with_key("quad", [&] {
    sc.quad.validate();
    return 0;
  });

  sc.times = config.get_list("times", sc.times);
  for (double t : sc.times)
    if (!(t > 0.0)) throw ConfigError("times: every time must be positive");

  auto& ck = sc.checks;
  ck.muskat_rhs = config.get_bool("check.muskat_rhs", ck.muskat_rhs);
  ck.convergence = config.get_bool("check.convergence", ck.convergence);
  ck.admissibility = config.get_bool("check.admissibility", ck.admissibility);
  ck.jump_residual = config.get_bool("check.jump_residual", ck.jump_residual);
  ck.telescoped = config.get_bool("check.telescoped", ck.telescoped);
  ck.weak_residual = config.get_bool("check.weak_residual", ck.weak_residual);
  ck.t_star = config.get_bool("check.t_star", ck.t_star);

  if (config.has("ladder")) {
    sc.ladder = config.get_list("ladder");
  } else if (ck.convergence || config.has("ladder.t0") || config.has("ladder.k")) {
    sc.ladder = with_key("ladder", [&] {
      return dyadic_ladder(config.get_double("ladder.t0", 0.2), static_cast<int>(config.get_int("ladder.k", 6)));
    });
  }
  if (ck.convergence) {
    if (sc.ladder.size() < 4) throw ConfigError("ladder: need at least 4 times");
    for (std::size_t k = 0; k < sc.ladder.size(); ++k)
      if (!(sc.ladder[k] > 0.0) || (k && !(sc.ladder[k] < sc.ladder[k - 1])))
        throw ConfigError("ladder: times must be positive and strictly decreasing");
  }

  sc.interfaces_t = config.get_double("interfaces.t", sc.times.front());
  if (std::find(sc.times.begin(), sc.times.end(), sc.interfaces_t) == sc.times.end())
    throw ConfigError("interfaces.t: must be one of 'times'");
  sc.interfaces_stride = config.get_int("interfaces.stride", sc.interfaces_stride);
  sc.muskat_rhs_stride = config.get_int("muskat_rhs.stride", sc.muskat_rhs_stride);
  if (sc.interfaces_stride < 1 || sc.muskat_rhs_stride < 1) throw ConfigError("strides must be positive");
  sc.output_dir = config.get_string("output.dir", sc.output_dir.string());

  auto& th = sc.thresholds;
  th.muskat_rhs = config.get_double("threshold.muskat_rhs", th.muskat_rhs);
  th.jump_residual = config.get_double("threshold.jump_residual", th.jump_residual);
  th.telescoped = config.get_double("threshold.telescoped", th.telescoped);
  th.sup_slope = config.get_double("threshold.sup_slope", th.sup_slope);
  th.l1_slope = config.get_double("threshold.l1_slope", th.l1_slope);
  th.weak_residual = config.get_double("threshold.weak_residual", th.weak_residual);
  th.weak_ratio = config.get_double("threshold.weak_ratio", th.weak_ratio);
  th.weak_floor = config.get_double("threshold.weak_floor", th.weak_floor);

  auto& wk = sc.weak;
  wk.t = config.get_double("weak.t", wk.t);
  wk.t_radius = config.get_double("weak.t_radius", wk.t_radius);
  wk.x1 = config.get_double("weak.x1", wk.x1);
  wk.offset = config.get_double("weak.offset", wk.offset);
  if (config.has("weak.radius")) {
    const auto r = config.get_list("weak.radius");
    if (r.size() != 2 || !(r[0] > 0.0) || !(r[1] > 0.0)) throw ConfigError("weak.radius: expected two positive radii");
    wk.radius = Point(r[0], r[1]);
  }
  wk.quadrature.panels = static_cast<int>(config.get_int("weak.panels", wk.quadrature.panels));
  wk.quadrature.table_spacing = config.get_double("weak.spacing", wk.quadrature.table_spacing);
  wk.refine = config.get_bool("weak.refine", wk.refine);
  if (!(wk.t - wk.t_radius > 0.0)) throw ConfigError("weak.t: time support must lie in t > 0");

  auto& ts = sc.t_star;
  ts.t_lo = config.get_double("t_star.t_lo", ts.t_lo);
  ts.t_hi = config.get_double("t_star.t_hi", ts.t_hi);
  ts.rel_tol = config.get_double("t_star.rel_tol", ts.rel_tol);
  if (!(ts.t_lo > 0.0 && ts.t_hi > ts.t_lo)) throw ConfigError("t_star: need 0 < t_lo < t_hi");

  auto& sn = sc.snapshots;
  sn.times = config.get_list("snapshot.times", sn.times);
  sn.x1 = pair_of(config, "snapshot.x1", sn.x1);
  sn.x2 = pair_of(config, "snapshot.x2", sn.x2);
  sn.nx = config.get_int("snapshot.nx", sn.nx);
  sn.ny = config.get_int("snapshot.ny", sn.ny);
  if (sn.nx < 2 || sn.ny < 2) throw ConfigError("snapshot: need nx, ny >= 2");
  for (double t : sn.times)
    if (t < 0.0) throw ConfigError("snapshot.times: times must be non-negative");

  auto& sw = sc.sweep;
  sw.t = config.get_double("sweep.t", sw.t);
  sw.c_lo = config.get_double("sweep.c_lo", sw.c_lo);
  sw.c_hi = config.get_double("sweep.c_hi", sw.c_hi);
  sw.tol = config.get_double("sweep.tol", sw.tol);
  if (!(sw.t > 0.0 && sw.c_lo > 0.0 && sw.c_hi > sw.c_lo && sw.tol > 0.0))
    throw ConfigError("sweep: need t > 0, 0 < c_lo < c_hi and tol > 0");

  if (sc.regime == Regime::stable) {
    if (sc.curve.beta() == 0.0) throw ConfigError("regime: the stable construction needs curve.beta != 0");
    if (sc.speeds.size() != 1) throw ConfigError("speeds: the stable construction takes a single speed");
  }

  if (const auto unused = config.unused_keys(); !unused.empty()) throw ConfigError("unknown key '" + unused.front() + "'");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_config(Config::load(path)); }

// ---- Report ----------------------------------------------------------------

void VerificationReport::put(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = std::move(value);
      return;
    }
  entries_.emplace_back(key, std::move(value));
}

void VerificationReport::set(const std::string& key, double value) { put(key, format_number(value)); }
void VerificationReport::set(const std::string& key, const std::string& value) { put(key, value); }
void VerificationReport::set(const std::string& key, bool value) { put(key, value ? "true" : "false"); }
void VerificationReport::set(const std::string& key, std::span<const double> values) { put(key, join(values)); }

const Check& VerificationReport::check(const std::string& name, double value, const std::string& relation,
                                       double threshold) {
  return check_flag(name, value, compare(value, relation, threshold), relation, threshold);
}

const Check& VerificationReport::check_flag(const std::string& name, double value, bool pass,
                                            const std::string& relation, double threshold) {
  checks_.push_back({name, value, relation, threshold, pass});
  return checks_.back();
}

void VerificationReport::warn(const std::string& message) { warnings_.push_back(message); }

std::optional<std::string> VerificationReport::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

bool VerificationReport::all_checks_pass() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
}

std::string VerificationReport::manifest() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  for (const Check& c : checks_) {
    const std::string p = "check." + c.name + ".";
    out << p << "value = " << format_number(c.value) << "\n";
    out << p << "relation = " << c.relation << "\n";
    out << p << "threshold = " << format_number(c.threshold) << "\n";
    out << p << "pass = " << (c.pass ? "true" : "false") << "\n";
  }
  out << "checks.total = " << checks_.size() << "\n";
  out << "checks.failed = " << std::count_if(checks_.begin(), checks_.end(), [](const Check& c) { return !c.pass; })
      << "\n";
  out << "warnings.count = " << warnings_.size() << "\n";
  for (std::size_t k = 0; k < warnings_.size(); ++k) out << "warning." << k << " = " << warnings_[k] << "\n";
  return out.str();
}

// ---- Convergence -----------------------------------------------------------

namespace {

ConvergenceQuantity fit(std::string name, const std::vector<double>& times, Vector values) {
  ConvergenceQuantity q;
  q.name = std::move(name);
  q.exact_zero = (values.array() == 0.0).all();
  q.strictly_decreasing = true;
  for (Eigen::Index k = 1; k < values.size(); ++k)
    if (!(values[k] < values[k - 1])) q.strictly_decreasing = false;
  if (!q.exact_zero) {
    std::vector<double> fitted(values.begin(), values.end());
    for (double& v : fitted)
      if (!(v > kConvergenceFloor)) {
        v = kConvergenceFloor;
        q.floored = true;
      }
    q.slope = loglog_slope(times, fitted);
  }
  q.values = std::move(values);
  return q;
}

}  // namespace

ConvergenceStudy convergence_study(const InterfaceJet& jet, std::span<const double> ladder, const PVConfig& cfg) {
  if (ladder.size() < 4) throw std::invalid_argument("convergence_study: need at least 4 times");
  for (std::size_t k = 0; k < ladder.size(); ++k)
    if (!(ladder[k] > 0.0) || (k && !(ladder[k] < ladder[k - 1])))
      throw std::invalid_argument("convergence_study: ladder must be positive and strictly decreasing");

  const int n = jet.speeds.size();
  const Grid& grid = jet.grid;
  const Eigen::Index m = grid.size();
  ConvergenceStudy study;
  study.times.assign(ladder.begin(), ladder.end());
  Vector sup(ladder.size()), l1(ladder.size());
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double t = ladder[k];
    Vector dz(m);
    for (Eigen::Index j = 0; j < m; ++j) dz[j] = jet.dz_dt(grid[j], t);
    Vector mean = Vector::Zero(m);
    double worst = 0.0;
    for (int i = -n; i <= n; ++i) {
      if (i == 0) continue;
      const Vector u = normal_velocity_grid(jet, i, t, cfg);
      worst = std::max(worst, (dz - u).cwiseAbs().maxCoeff());
      mean += u;
    }
    mean /= 2.0 * n;
    sup[k] = worst;
    l1[k] = grid.spacing() * (dz - mean).cwiseAbs().sum();
  }
  study.velocity_sup = fit("velocity_sup", study.times, std::move(sup));
  study.acceleration_l1 = fit("acceleration_l1", study.times, std::move(l1));
  return study;
}

// ---- Scenario run ----------------------------------------------------------

namespace {

void record_scenario(VerificationReport& report, const Scenario& sc) {
  report.set("scenario.name", sc.name);
  report.set("curve.kind", to_string(sc.curve.kind()));
  report.set("curve.beta", sc.curve.beta());
  report.set("curve.alpha", sc.curve.alpha());
  if (!sc.curve.has_zero_perturbation()) {
    report.set("curve.amplitude", sc.curve.amplitude());
    report.set("curve.width", sc.curve.width());
  }
  report.set("regime", to_string(sc.regime));
  report.set("speeds.n", static_cast<double>(sc.speeds.size()));
  report.set("speeds", std::span<const double>(sc.speeds.values()));
  report.set("speeds.outer", sc.speeds.outer());
  report.set("cbar", cbar(sc.speeds));
  report.set("grid.s_max", sc.grid.s_max());
  report.set("grid.n", static_cast<double>(sc.grid.size()));
  report.set("grid.spacing", sc.grid.spacing());
  report.set("quad.inner_n", static_cast<double>(sc.quad.inner_n));
  report.set("quad.outer_r", sc.quad.outer_r);
  report.set("quad.outer_n_per_decade", static_cast<double>(sc.quad.outer_n));
}

void check_weak_residual(VerificationReport& report, const Scenario& sc, const InterfaceJet& jet) {
  const WeakSettings& wk = sc.weak;
  const BumpTestFunction phi{{wk.x1, jet.z_at(wk.x1, wk.t) + wk.offset}, wk.radius, wk.t, wk.t_radius};
  const double coarse = weak_residual(jet, phi, wk.quadrature, sc.quad);
  report.set("weak.t", wk.t);
  report.set("weak.centre", std::span<const double>(phi.centre.data(), 2));
  report.set("weak.radius", std::span<const double>(phi.radius.data(), 2));
  report.set("weak.panels", static_cast<double>(wk.quadrature.panels));
  report.set("weak.spacing", wk.quadrature.table_spacing);
  report.set("weak.residual", coarse);
  report.check("weak_residual", coarse, "<", sc.thresholds.weak_residual);
  if (!wk.refine) return;
  const WeakResidualConfig finer = wk.quadrature.refined();
  const double fine = weak_residual(jet, phi, finer, sc.quad);
  report.set("weak.refined_residual", fine);
  if (coarse < sc.thresholds.weak_floor) {
    report.set("weak.refinement", std::string("below-floor"));
    report.check("weak_residual_roundoff", coarse, "<", sc.thresholds.weak_floor);
    return;
  }
  report.check("weak_refinement_ratio", coarse / fine, ">=", sc.thresholds.weak_ratio);
}

void check_convergence(VerificationReport& report, const Scenario& sc, const ConvergenceStudy& study) {
  report.set("convergence.times", std::span<const double>(study.times));
  for (const ConvergenceQuantity* q : {&study.velocity_sup, &study.acceleration_l1}) {
    const std::string key = "convergence." + q->name;
    report.set(key, std::span<const double>(q->values.data(), q->values.size()));
    if (q->exact_zero) {
      report.set(key + ".slope", std::string("exact-zero"));
      report.check_flag(q->name + "_exact_zero", q->values.cwiseAbs().maxCoeff(), true, "==", 0.0);
      continue;
    }
    report.set(key + ".slope", q->slope);
    if (q->floored) report.warn(q->name + ": values below " + format_number(kConvergenceFloor) + " were floored");
  }
  const ConvergenceQuantity& sup = study.velocity_sup;
  if (!sup.exact_zero) {
    report.check_flag("velocity_sup_decreasing", sup.values[sup.values.size() - 1], sup.strictly_decreasing, "<",
                      sup.values[0]);
    report.check("velocity_sup_slope", sup.slope, ">", sc.thresholds.sup_slope);
  }
  if (!study.acceleration_l1.exact_zero)
    report.check("acceleration_l1_slope", study.acceleration_l1.slope, ">", sc.thresholds.l1_slope);
}

}  // namespace

ScenarioResult run_scenario(const Scenario& sc) {
  ScenarioResult result;
  VerificationReport& report = result.report;
  record_scenario(report, sc);

  if (const auto bad = sc.speeds.bound_violations(); !bad.empty()) {
    std::string list;
    for (int i : bad) list += (list.empty() ? "" : ",") + std::to_string(i);
    report.warn("speeds exceed (2i-1)/N at i = " + list);
    report.set("speeds.bound_violations", list);
  }
  if (sc.regime == Regime::unstable) report.set("c_max", c_max(Regime::unstable, sc.curve.beta(), 0.0));
  else record_stable_thresholds(report, sc.curve, sc.grid);

  result.jet = build_jet(sc.curve, sc.speeds, sc.regime, sc.grid, sc.quad);
  const InterfaceJet& jet = *result.jet;
  report.set("jet.z1_sup", jet.z1->values().cwiseAbs().maxCoeff());
  report.set("jet.z2_sup", jet.z2->values().cwiseAbs().maxCoeff());

  if (sc.checks.muskat_rhs) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < sc.grid.size(); k += sc.muskat_rhs_stride)
      worst = std::max(worst, std::abs(jet.z1->values()[k] - muskat_rhs(sc.curve, sc.grid[k], sc.regime)));
    report.set("muskat_rhs.stride", static_cast<double>(sc.muskat_rhs_stride));
    report.check("muskat_rhs_error", worst, "<", sc.thresholds.muskat_rhs);
  }

  const int n = sc.speeds.size();
  const bool need_families = sc.checks.admissibility || sc.checks.jump_residual || (sc.checks.telescoped && n > 1);
  if (need_families) {
    report.set("times", std::span<const double>(sc.times));
    for (std::size_t k = 0; k < sc.times.size(); ++k) {
      const double t = sc.times[k];
      const GFamily family(jet, t, sc.quad);
      if (sc.checks.admissibility) {
        const AdmissibilityReport a = admissibility_report(family);
        report.set(indexed("time", k, "sup_grad"), a.sup_grad);
        report.set(indexed("time", k, "band_sup_grad"), std::span<const double>(a.band_sup_grad));
        report.set(indexed("time", k, "margin"), a.margin);
        report.set(indexed("time", k, "sup_normal"), a.sup_normal);
        report.set(indexed("time", k, "sup_tangent_deviation"), a.sup_tangent_deviation);
        report.check("admissible." + std::to_string(k), a.margin, ">", 0.0);
      }
      std::vector<Vector> residuals;
      for (int i = -n; i <= n; ++i)
        if (i != 0) residuals.push_back(jump_residual(family, i));
      if (sc.checks.jump_residual) {
        double worst = 0.0;
        for (const Vector& r : residuals) worst = std::max(worst, r.cwiseAbs().maxCoeff());
        report.check("jump_residual." + std::to_string(k), worst, "<", sc.thresholds.jump_residual);
      }
      if (sc.checks.telescoped && n > 1)
        report.check("telescoped." + std::to_string(k), telescoped_identity_error(family), "<",
                     sc.thresholds.telescoped);
      if (t == sc.interfaces_t) {
        std::size_t slot = 0;
        for (int i = -n; i <= n; ++i) {
          if (i == 0) continue;
          const Vector& u = family.normal_velocity(i);
          const double offset = sc.speeds.speed(i) * t;
          for (Eigen::Index j = 0; j < sc.grid.size(); j += sc.interfaces_stride) {
            const double s = sc.grid[j];
            result.interfaces.push_back({s, i, family.curve().eval(s) + offset, u[j], residuals[slot][j]});
          }
          ++slot;
        }
        report.set("interfaces.t", t);
      }
    }
  }

  if (sc.checks.convergence) {
    result.convergence = convergence_study(jet, sc.ladder, sc.quad);
    check_convergence(report, sc, *result.convergence);
  }

  if (sc.checks.t_star) {
    const TStarResult ts = find_t_star(jet, sc.t_star.t_lo, sc.t_star.t_hi, sc.grid, sc.quad, sc.t_star.rel_tol);
    report.set("t_star", ts.t_star);
    report.set("t_star.bracketed", ts.bracketed);
    report.set("t_star.evaluations", static_cast<double>(ts.margins.size()));
    if (!ts.bracketed) report.warn("t_star: margin stayed positive up to t_hi; t_star is a lower bound");
    report.check("t_star_positive", ts.t_star, ">", 0.0);
  }

  if (sc.checks.weak_residual) check_weak_residual(report, sc, jet);

  for (double t : sc.snapshots.times)
    result.snapshots.push_back(
        cartesian_snapshot(jet, t, sc.snapshots.x1, sc.snapshots.x2, sc.snapshots.nx, sc.snapshots.ny, sc.quad));
  if (!result.snapshots.empty()) report.set("snapshot.times", std::span<const double>(sc.snapshots.times));
  return result;
}

// ---- Oracle suite ----------------------------------------------------------

VerificationReport oracle_suite(const PVConfig& cfg) {
  VerificationReport report;

  double profile = 0.0;
  for (double a : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0})
    for (double c : {0.5, 1.0, 2.0})
      profile = std::max(profile, std::abs(profile_integral_quadrature(a, c, cfg) - profile_integral_closed(a, c)));
  report.check("profile_integral_error", profile, "<", 1e-6);

  auto lorentzian = [](double s, int j) {
    const double q = 1.0 / (1.0 + s * s);
    return j == 0 ? q : j == 1 ? -2.0 * s * q * q : (6.0 * s * s - 2.0) * q * q * q;
  };
  double hilbert = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double s = -10.0 + 0.2 * k;
    const double pair = (1.0 - s * s) / (2.0 * (1.0 + s * s) * (1.0 + s * s));
    hilbert = std::max(hilbert, std::abs(transform(lorentzian, Weight::constant(1.0), s, cfg) - pair));
  }
  report.check("hilbert_pair_error", hilbert, "<", 1e-6);

  const Grid grid(20.0, 201);
  const std::vector<double> times{0.01, 0.1, 1.0};
  for (double c : {0.9, 1.1}) {
    const InterfaceJet jet = build_jet(Curve::flat(), SpeedFamily({c}), Regime::unstable, grid, cfg);
    const std::string tag = "flat_c" + format_number(c);
    double jet_sup = std::max(jet.z1->values().cwiseAbs().maxCoeff(), jet.z2->values().cwiseAbs().maxCoeff());
    double grad_error = 0.0, margin_error = 0.0, worst_margin = 0.5;
    for (double t : times) {
      const GFamily family(jet, t, cfg);
      for (Eigen::Index k = 0; k < grid.size(); ++k)
        for (double frac : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
          const Point g = family.inner(grid[k], frac * c * t).grad;
          grad_error = std::max(grad_error, (g - Point(c - 0.5, 0.0)).cwiseAbs().maxCoeff());
        }
      const double margin = admissibility_report(family).margin;
      margin_error = std::max(margin_error, std::abs(margin - (1.0 - c)));
      worst_margin = std::min(worst_margin, margin);
    }
    report.check(tag + "_jet_sup", jet_sup, "<=", 1e-12);
    report.check(tag + "_grad_error", grad_error, "<=", 1e-14);
    report.check(tag + "_margin_error", margin_error, "<=", 1e-14);
    if (c < 1.0) report.check(tag + "_admissible", worst_margin, ">", 0.0);
    else report.check(tag + "_inadmissible", worst_margin, "<=", 0.0);
  }

  const double beta = 1.0;
  for (double c : {0.20, 0.21}) {
    const InterfaceJet jet = build_jet(Curve::tilted(beta), SpeedFamily({c}), Regime::stable, grid, cfg);
    const std::string tag = "stable_tilted_c" + format_number(c);
    const double exact = (c + 0.5) / std::sqrt(1.0 + beta * beta);
    double error = 0.0, margin = 0.5;
    for (double t : times) {
      const GFamily family(jet, t, cfg);
      for (Eigen::Index k = 0; k < grid.size(); ++k)
        for (double frac : {-1.0, 0.0, 1.0})
          error = std::max(error, std::abs(family.inner(grid[k], frac * c * t).grad.norm() - exact));
      margin = std::min(margin, admissibility_report(family).margin);
    }
    report.check(tag + "_grad_error", error, "<", 1e-10);
    if (c < tilted_chain_rule_threshold(beta)) report.check(tag + "_admissible", margin, ">", 0.0);
    else report.check(tag + "_inadmissible", margin, "<=", 0.0);
  }
  record_stable_thresholds(report, Curve::tilted(beta), grid);

  long mismatches = 0;
  for (long n = 1; n <= 64; ++n)
    for (long i = 1; i <= n; ++i) {
      long sum = 0;
      for (long j = i + 1; j <= n; ++j) sum += 2 * j - 1;
      mismatches += sum != n * n - i * i;
    }
  report.check("odd_sum_mismatches", static_cast<double>(mismatches), "==", 0.0);
  report.check("cbar_single_speed_error", std::abs(cbar(SpeedFamily({0.7})) - 0.7), "==", 0.0);
  return report;
}

// ---- Sweep -----------------------------------------------------------------

SweepResult sweep_c(const Scenario& sc) {
  const SweepSettings& sw = sc.sweep;
  SweepResult out;
  auto margin = [&](double c) {
    const InterfaceJet jet = build_jet(sc.curve, SpeedFamily({c}), sc.regime, sc.grid, sc.quad);
    const double m = admissibility_report(GFamily(jet, sw.t, sc.quad)).margin;
    out.margins.emplace_back(c, m);
    return m;
  };
  double lo = sw.c_lo, hi = sw.c_hi;
  if (!(margin(lo) > 0.0)) {
    out.c_threshold = out.c_admissible = out.c_inadmissible = lo;
    return out;
  }
  if (margin(hi) > 0.0) {
    out.c_threshold = out.c_admissible = out.c_inadmissible = hi;
    return out;
  }
  while (hi - lo > sw.tol) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) > 0.0 ? lo : hi) = mid;
  }
  out.bracketed = true;
  out.c_admissible = lo;
  out.c_inadmissible = hi;
  out.c_threshold = 0.5 * (lo + hi);
  return out;
}

VerificationReport sweep_report(const Scenario& sc, const SweepResult& r) {
  VerificationReport report;
  record_scenario(report, sc);
  report.set("sweep.t", sc.sweep.t);
  report.set("sweep.c_threshold", r.c_threshold);
  report.set("sweep.c_admissible", r.c_admissible);
  report.set("sweep.c_inadmissible", r.c_inadmissible);
  report.set("sweep.bracketed", r.bracketed);
  std::vector<double> cs, ms;
  for (const auto& [c, m] : r.margins) {
    cs.push_back(c);
    ms.push_back(m);
  }
  report.set("sweep.c_evaluated", std::span<const double>(cs));
  report.set("sweep.margins", std::span<const double>(ms));
  if (sc.regime == Regime::unstable) report.set("c_max", c_max(Regime::unstable, sc.curve.beta(), 0.0));
  else record_stable_thresholds(report, sc.curve, sc.grid);
  report.check_flag("sweep_bracketed", r.c_inadmissible - r.c_admissible, r.bracketed, "<=", sc.sweep.tol);
  return report;
}

// ---- Export ----------------------------------------------------------------

void write_jet_csv(const InterfaceJet& jet, std::ostream& out) {
  out << "s,z0,z1,z2,sigma\n";
  for (Eigen::Index k = 0; k < jet.grid.size(); ++k) {
    const double s = jet.grid[k];
    out << format_number(s) << ',' << format_number(jet.z0.eval(s)) << ',' << format_number(jet.z1->values()[k])
        << ',' << format_number(jet.z2->values()[k]) << ',' << format_number(sigma(jet.z0, s)) << '\n';
  }
}

void write_convergence_csv(const ConvergenceStudy& study, std::ostream& out) {
  out << "quantity,k,t,value\n";
  for (const ConvergenceQuantity* q : {&study.velocity_sup, &study.acceleration_l1})
    for (std::size_t k = 0; k < study.times.size(); ++k)
      out << q->name << ',' << k << ',' << format_number(study.times[k]) << ','
          << format_number(q->values[static_cast<Eigen::Index>(k)]) << '\n';
}

void write_interfaces_csv(const std::vector<InterfaceRow>& rows, std::ostream& out) {
  out << "s,i,z,u_nu,jump_residual\n";
  for (const InterfaceRow& r : rows)
    out << format_number(r.s) << ',' << r.i << ',' << format_number(r.z) << ',' << format_number(r.u_nu) << ','
        << format_number(r.jump_residual) << '\n';
}

void write_fields_csv(const std::vector<SubsolutionSnapshot>& snapshots, std::ostream& out) {
  out << "x1,x2,t,region,rho,u1,u2,m1,m2,g,gx1,gx2,margin\n";
  for (const SubsolutionSnapshot& snap : snapshots)
    for (const SnapshotNode& node : snap.nodes) {
      out << format_number(node.x[0]) << ',' << format_number(node.x[1]) << ',' << format_number(snap.t) << ','
          << node.region.index;
      for (double v : {node.rho, node.u[0], node.u[1], node.m[0], node.m[1], node.g, node.grad_g[0], node.grad_g[1],
                       node.margin})
        out << ',' << format_number(v);
      out << '\n';
    }
}

void export_report(const VerificationReport& report, const std::vector<SubsolutionSnapshot>& snapshots,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  open_output(out_dir / "manifest.txt") << report.manifest();
  if (!snapshots.empty()) {
    auto out = open_output(out_dir / "fields.csv");
    write_fields_csv(snapshots, out);
  }
}

void export_results(const ScenarioResult& result, const std::filesystem::path& out_dir) {
  export_report(result.report, result.snapshots, out_dir);
  if (result.jet) {
    auto out = open_output(out_dir / "jet.csv");
    write_jet_csv(*result.jet, out);
  }
  if (result.convergence) {
    auto out = open_output(out_dir / "convergence.csv");
    write_convergence_csv(*result.convergence, out);
  }
  if (!result.interfaces.empty()) {
    auto out = open_output(out_dir / "interfaces.csv");
    write_interfaces_csv(result.interfaces, out);
  }
}

}  // namespace muskat
