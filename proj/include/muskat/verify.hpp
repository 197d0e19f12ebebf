#pragma once

#include "muskat/subsolution.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace muskat {

// Bad or missing scenario input. Messages name the offending key and line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key = value` text. '#' starts a comment; keys are dotted names; lists
// are comma separated. Duplicate keys are an error.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

  // Keys never read by any getter.
  std::vector<std::string> unused_keys() const;

 private:
  struct Entry {
    std::string value;
    std::string where;
  };
  const Entry& entry(const std::string& key) const;

  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> read_;
};

struct CheckToggles {
  bool muskat_rhs = true;
  bool convergence = true;
  bool admissibility = true;
  bool jump_residual = true;
  bool telescoped = true;
  bool weak_residual = false;
  bool t_star = false;
};

struct Thresholds {
  double muskat_rhs = 1e-5;
  double jump_residual = 1e-4;
  double telescoped = 1e-4;
  double sup_slope = 0.2;
  double l1_slope = 1.0;
  double weak_residual = 1e-3;
  double weak_ratio = 1.5;
  // Weak residuals below this are roundoff; no refinement ratio is formed.
  double weak_floor = 1e-9;
};

struct WeakSettings {
  double t = 0.1;
  double t_radius = 0.05;
  double x1 = 0.0;
  // Centre height above the interface z(x1, t).
  double offset = 0.05;
  Point radius{1.0, 0.15};
  WeakResidualConfig quadrature;
  bool refine = true;
};

struct TStarSettings {
  double t_lo = 1e-3;
  double t_hi = 8.0;
  double rel_tol = 1e-2;
};

struct SnapshotSettings {
  std::vector<double> times;
  std::array<double, 2> x1{-2.0, 2.0};
  std::array<double, 2> x2{-1.0, 1.0};
  Eigen::Index nx = 41;
  Eigen::Index ny = 41;
};

struct SweepSettings {
  double t = 0.01;
  double c_lo = 0.01;
  double c_hi = 1.5;
  double tol = 1e-3;
};

struct Scenario {
  std::string name = "scenario";
  Curve curve = Curve::flat();
  Regime regime = Regime::unstable;
  SpeedFamily speeds{{0.5}};
  Grid grid{40.0, 2001};
  PVConfig quad;
  // Times of the admissibility and jump checks.
  std::vector<double> times{0.2, 0.05};
  // Decreasing convergence ladder.
  std::vector<double> ladder;
  // Time of interfaces.csv; must be one of `times`.
  double interfaces_t = 0.0;
  Eigen::Index interfaces_stride = 1;
  Eigen::Index muskat_rhs_stride = 1;
  std::filesystem::path output_dir = "out";
  CheckToggles checks;
  Thresholds thresholds;
  WeakSettings weak;
  TStarSettings t_star;
  SnapshotSettings snapshots;
  SweepSettings sweep;
};

// Reads every known key; unknown keys raise ConfigError.
Scenario scenario_from_config(const Config& config);
Scenario load_scenario(const std::filesystem::path& path);

// t0 * 2^-k for k = 0..k_max.
std::vector<double> dyadic_ladder(double t0, int k_max);

// One pass/fail flag with the measured value and the threshold it was held to.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", ">", ">=", "<=" or "=="
  double threshold = 0.0;
  bool pass = false;
};

// Ordered key/value record of a run.
class VerificationReport {
 public:
  void set(const std::string& key, double value);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, std::span<const double> values);

  // Evaluates `value relation threshold` and stores the outcome.
  const Check& check(const std::string& name, double value, const std::string& relation, double threshold);
  // A check decided by other means (e.g. strict monotonicity); value is shown as measured.
  const Check& check_flag(const std::string& name, double value, bool pass, const std::string& relation,
                          double threshold);
  void warn(const std::string& message);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::optional<std::string> find(const std::string& key) const;

  bool all_checks_pass() const;
  // Strict mode also fails on warnings.
  bool passed(bool strict) const { return all_checks_pass() && (!strict || warnings_.empty()); }

  // `key = value` lines: entries, then check.<name>.{value,relation,threshold,pass}, then warnings.
  std::string manifest() const;

 private:
  void put(const std::string& key, std::string value);

  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<Check> checks_;
  std::vector<std::string> warnings_;
};

// 12 significant digits.
std::string format_number(double value);

struct ConvergenceQuantity {
  std::string name;
  Vector values;
  double slope = 0.0;
  // Every value is exactly zero; no slope is fitted.
  bool exact_zero = false;
  // Some non-positive values were replaced by the floor before fitting.
  bool floored = false;
  bool strictly_decreasing = false;
};

struct ConvergenceStudy {
  std::vector<double> times;
  // max_i sup_s |dz/dt - u_nu^(i)|.
  ConvergenceQuantity velocity_sup;
  // h sum_s |dz/dt - (1/2N) sum_i (u_nu^(i) + u_nu^(-i))|.
  ConvergenceQuantity acceleration_l1;
};

inline constexpr double kConvergenceFloor = 1e-15;

// Needs a strictly decreasing ladder of at least 4 positive times.
ConvergenceStudy convergence_study(const InterfaceJet& jet, std::span<const double> ladder, const PVConfig& cfg = {});

struct InterfaceRow {
  double s = 0.0;
  int i = 0;
  double z = 0.0;
  double u_nu = 0.0;
  double jump_residual = 0.0;
};

struct ScenarioResult {
  VerificationReport report;
  std::optional<InterfaceJet> jet;
  std::optional<ConvergenceStudy> convergence;
  std::vector<SubsolutionSnapshot> snapshots;
  std::vector<InterfaceRow> interfaces;
};

ScenarioResult run_scenario(const Scenario& scenario);

// Closed-form checks that need no scenario: singular profile integral,
// Hilbert pair, flat and tilted exactness, integer identities.
VerificationReport oracle_suite(const PVConfig& cfg = {});

struct SweepResult {
  double c_threshold = 0.0;
  // Bracket [admissible, inadmissible]; equal ends mean no sign change inside [c_lo, c_hi].
  double c_admissible = 0.0;
  double c_inadmissible = 0.0;
  bool bracketed = false;
  std::vector<std::pair<double, double>> margins;  // (c, margin)
};

// Bisects the single-speed admissibility threshold at fixed t = sweep.t.
SweepResult sweep_c(const Scenario& scenario);
VerificationReport sweep_report(const Scenario& scenario, const SweepResult& result);

// Manifest always; fields.csv only when there are snapshots.
void export_report(const VerificationReport& report, const std::vector<SubsolutionSnapshot>& snapshots,
                   const std::filesystem::path& out_dir);
void write_jet_csv(const InterfaceJet& jet, std::ostream& out);
void write_convergence_csv(const ConvergenceStudy& study, std::ostream& out);
void write_interfaces_csv(const std::vector<InterfaceRow>& rows, std::ostream& out);
void write_fields_csv(const std::vector<SubsolutionSnapshot>& snapshots, std::ostream& out);
// Everything the result holds.
void export_results(const ScenarioResult& result, const std::filesystem::path& out_dir);

}  // namespace muskat
