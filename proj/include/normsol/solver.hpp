#pragma once

#include <string>
#include <utility>
#include <vector>

#include "normsol/energy.hpp"
#include "normsol/exponents.hpp"
#include "normsol/radial_grid.hpp"

namespace normsol {

struct InitSpec {
  enum class Kind { Gaussian, WpSeed, FromFile };
  Kind kind = Kind::Gaussian;
  /// Gaussian width; 0 picks the width that optimises the fiber energy.
  double width = 0.0;
  std::string path;  ///< FromFile only
};

struct ArmijoParams {
  double shrink = 0.5;  ///< backtracking factor
  double c1 = 1e-4;     ///< sufficient-decrease constant
};

struct SolveConfig {
  int max_iters = 4000;
  /// Tangential gradient relative to the sum of the kinetic and potential gradient norms.
  double tol_grad = 1e-6;
  /// |P| / (grad2 + gradq).
  double tol_pohozaev = 1e-4;
  /// Relative energy change over 10 iterations below which descent is stagnant.
  double tol_energy = 1e-12;
  double step0 = 1.0;
  ArmijoParams armijo;
  /// Regularisation of the q-term; 0 evaluates the exact discrete energy.
  double eps_reg = 0.0;
  InitSpec init;
  /// Gaussian starts at widths {w/2, w, 2w}; the lowest level wins.
  bool multi_start = true;
  /// Dilate back onto the Pohozaev set when |t₀ - 1| exceeds this.
  double dilation_trigger = 0.05;
  /// Hold u(R) = 0, the truncation of the whole-space problem to the ball.
  bool dirichlet_outer = true;
};

struct HistoryEntry {
  int iter = 0;
  double energy = 0.0;     ///< I (or the fiber maximum in Pohozaev mode)
  double grad_norm = 0.0;  ///< relative tangential gradient
  double pohozaev = 0.0;
};

struct SolveResult {
  RadialField u;
  EnergyBreakdown breakdown;
  double level = 0.0;
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;  ///< final relative tangential gradient
  double residual = 0.0;   ///< pde_residual(u, lambda)
  std::vector<HistoryEntry> history;
  std::string message;
};

/// (c/‖u‖₂)·u. Throws ParameterError on a zero field.
RadialField project_mass(const RadialField& u, double c);

/// Length over which the mass-c ground state varies: 1/t* for the fiber
/// optimum t* of a unit Gaussian. Returns 1 outside the sub/supercritical regimes.
double suggest_length_scale(const ProblemParams& params);
/// Grid radius comfortably containing the ground state (16 length scales).
double suggest_radius(const ProblemParams& params);

/// Starting field of mass c on the grid.
RadialField initial_field(const ProblemParams& params, const GridPtr& grid, const InitSpec& init);

/// Projected descent for m(c). Subcritical regime only (RegimeError otherwise).
SolveResult minimize_global(const ProblemParams& params, const GridPtr& grid, const SolveConfig& cfg = {});

/// Descent for σ(c) on the Pohozaev set. Supercritical regime only.
SolveResult minimize_pohozaev(const ProblemParams& params, const GridPtr& grid, const SolveConfig& cfg = {});

/// The constrained descent loop of minimize_global from a given start,
/// without a regime check. Used as a probe in the critical regimes.
SolveResult descend_on_sphere(const ProblemParams& params, const RadialField& u0, const SolveConfig& cfg = {});

/// Weighted L² norm over interior nodes of gradient(u) - λu, relative to the
/// sum of the norms of the individual terms.
double pde_residual(const RadialField& u, double lambda, const ProblemParams& params);

/// λ minimising pde_residual over interior nodes.
double residual_optimal_lambda(const RadialField& u, const ProblemParams& params);

struct BlowdownResult {
  bool unbounded = false;
  std::vector<std::pair<double, double>> trace;  ///< (θ, I(u⋆θ))
};

/// I(e^{Nθ/2}u(e^θ·)) along theta_grid from the fiber form of seed.
/// unbounded iff the trace dips below floor and still decreases at the end.
BlowdownResult detect_blowdown(const ProblemParams& params, const RadialField& seed,
                               const std::vector<double>& theta_grid, double floor);

/// Columns iter,I,grad_norm,P. Throws IoError.
void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history);

}  // namespace normsol
