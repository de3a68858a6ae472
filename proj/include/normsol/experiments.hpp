#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "normsol/energy.hpp"
#include "normsol/exponents.hpp"
#include "normsol/solver.hpp"

namespace normsol {

struct SweepRecord {
  double c = 0.0;
  double level = 0.0;
  double lambda = 0.0;
  double grad2 = 0.0;
  double gradq = 0.0;
  double lp = 0.0;
  bool converged = false;
};

/// "c,level,lambda,grad2,gradq,lp,converged"
std::string sweep_csv_header();
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(const std::string& path);

enum class SweepQuantity { Level, Lambda };

struct PowerLawFit {
  double exponent = 0.0;
  double r2 = 0.0;
  double predicted = 0.0;
  double rel_err = 0.0;
  int points = 0;
  bool skipped = true;
  std::string note;
};

/// Least squares of log|y| against log c over converged records with |y| > 1e-10.
/// Fewer than four usable points gives skipped = true.
PowerLawFit fit_power_law(const std::vector<SweepRecord>& records, SweepQuantity which, double predicted);

/// Grid for one sweep point: r_max > 0 fixes the radius, otherwise suggest_radius(params).
GridPtr sweep_grid(const ProblemParams& params, double r_max, std::size_t grid_m);

struct SweepOptions {
  SolveConfig solve;
  double r_max = 0.0;  ///< 0: per-point automatic radius
  std::size_t grid_m = 2000;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

struct SupercriticalChecks {
  bool sigma_decreasing = false;       ///< over converged adjacent pairs
  bool lambda_decreasing_trend = false; ///< λ_c falls as c decreases
  double lambda_bound_K = 0.0;         ///< largest K with λ_c ≤ -K(c^{-a} + c^{-b}) at every point
  bool lambda_bound_ok = false;        ///< K > 0
  std::vector<double> grad_lower_bound;  ///< coercivity bound on ‖∇u‖₂² per record
  std::vector<bool> grad_bound_ok;       ///< grad2 ≥ 0.9·bound
  std::vector<double> reduced_form_err;  ///< |I - reduced form| / |I|
};

struct SweepResult {
  Regime regime = Regime::OutsideTheory;
  std::vector<SweepRecord> records;
  std::vector<SolveResult> solves;
  std::optional<PowerLawFit> level_fit, lambda_fit;
  bool level_trend_ok = false;   ///< subcritical: m(c) → 0⁻ monotonically as c ↓
  bool lambda_trend_ok = false;  ///< subcritical: λ_c → 0⁻ monotonically as c ↓
  std::optional<SupercriticalChecks> super;
  std::vector<std::string> warnings;
};

/// Independent solves across c_list (parallel, deterministic), then fits or
/// trend checks according to the regime.
SweepResult run_sweep(const ProblemParams& base, const std::vector<double>& c_list, const SweepOptions& opt);

/// Lower bound on ‖∇u‖₂² for u on the Pohozaev set of mass c.
double supercritical_grad_bound(const ProblemParams& params, double gn_c);
/// (1/2 - 1/(pδ_p))‖∇u‖₂² + (1/q - (1+δ_q)/(pδ_p))‖∇u‖_q^q.
double reduced_energy(const FieldNorms& n, const ProblemParams& params);

struct CriticalOptions {
  double tau = 16.0;
  double theta_max = 8.0;
  int theta_points = 401;
  double floor = -1.0;
  int probe_iters = 200;
  double probe_radius = 40.0;
  std::size_t probe_m = 160001;
};

struct CriticalVerdict {
  double c = 0.0;
  std::string verdict;  ///< "zero-infimum", "unbounded-below", "inconclusive", "open gap"
  bool blowdown_unbounded = false;
  double blowdown_min = 0.0;
  double probe_min = 0.0;
  double probe_start = 0.0;
  double probe_end = 0.0;
};

struct CriticalReport {
  Regime regime = Regime::OutsideTheory;
  CriticalMasses masses;
  std::vector<CriticalVerdict> verdicts;
};

/// Thresholds for p = p̄ or p = p̂ and a verdict per mass.
CriticalReport run_critical(const ProblemParams& params, const std::vector<double>& c_list,
                            const CriticalOptions& opt = {});

struct FiberRow {
  double t = 0.0, h = 0.0, hprime = 0.0;
};

struct FiberTable {
  std::vector<FiberRow> rows;
  std::optional<double> t0;
};

/// n log-spaced samples covering [min(1,t₀)/100, max(1,t₀)·100]; t₀ when supercritical.
FiberTable fiber_table(const FiberCoeffs& k, const ProblemParams& params, int n = 200);
void write_fiber_csv(const std::string& path, const FiberTable& table);

/// Flat key=value file; '#' starts a comment. Throws IoError.
std::map<std::string, std::string> read_config_file(const std::string& path);

std::string regime_json(const ProblemParams& params, const RegimeReport& report);
std::string critical_json(const ProblemParams& params, const CriticalReport& report);
std::string sweep_json(const ProblemParams& params, const SweepResult& result);

}  // namespace normsol
