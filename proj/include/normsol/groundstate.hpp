#pragma once

#include <vector>

#include "normsol/exponents.hpp"
#include "normsol/radial_grid.hpp"

namespace normsol {

enum class ExtremalKind { SemilinearWp, QLaplacianWpq };

/// Shooting trajectory of a radial profile: accepted integrator knots
/// evaluated by cubic Hermite interpolation, followed by an analytic tail.
class ProfileCurve {
 public:
  enum class Tail { Exponential, PowerLaw, Zero };

  ProfileCurve() = default;
  ProfileCurve(std::vector<double> r, std::vector<double> value, std::vector<double> slope, Tail tail,
               double tail_rate, int N, double cutoff);

  double value(double r) const;
  double slope(double r) const;
  /// Radius of the last integrator knot kept before the tail takes over.
  double match_radius() const { return r_.empty() ? 0.0 : r_.back(); }
  /// Past this radius the profile is identically zero.
  double cutoff() const { return cutoff_; }

 private:
  std::vector<double> r_, v_, s_;
  Tail tail_ = Tail::Zero;
  double rate_ = 0.0;
  int N_ = 2;
  double cutoff_ = 0.0;
};

struct ShootOptions {
  double s_min = 1e-6;
  double s_max = 1e6;
  /// Relative bracket width at which bisection stops.
  double bracket_tol = 1e-15;
  /// Integrator tolerance.
  double rtol = 1e-11;
  /// The tail takes over once the trajectory falls below this fraction of W(0).
  double tail_switch = 1e-5;
  /// The profile must fall below this absolute value before the grid radius.
  double decay_floor = 1e-10;
};

/// A converged Gagliardo-Nirenberg extremal sampled on a grid.
///
/// SemilinearWp solves -ΔW + (1/δ_p - 1)W = (2/(pδ_p))W^{p-1}.
/// QLaplacianWpq solves -Δ_q W + W = ζW^{p-1}, ζ = ‖∇W‖_q^q + ‖W‖₂². It is built
/// from the unit-coefficient profile V of -Δ_q V + V = V^{p-1} as
/// W(r) = γV(γ^{(2-q)/q} r), which turns the equation into the ζ form with
/// ζ = γ^{2-p}; γ is fixed by requiring the quadrature value of
/// ‖∇W‖_q^q + ‖W‖₂² to equal γ^{2-p}.
struct ExtremalProfile {
  RadialField field;
  std::vector<double> slope;  ///< W'(r) at the nodes
  FieldNorms norms;           ///< gradq uses the exponent q passed to the solver
  double shoot_value = 0.0;   ///< centre amplitude of the shooting profile (V(0) for W_{p,q})
  double ode_residual = 0.0;  ///< relative weighted L² residual of the extremal equation
  ExtremalKind kind = ExtremalKind::SemilinearWp;
  double zeta = 0.0;   ///< multiplier ζ (W_{p,q} only)
  double gamma = 1.0;  ///< amplitude factor γ (W_{p,q} only)
  double decay_radius = 0.0;
  int bisection_steps = 0;
  double bracket_width = 0.0;  ///< final relative width of the shooting bracket
  bool converged = false;
  int N = 2;
  double p = 0.0;
  double q = 2.0;
  ProfileCurve curve;  ///< shooting profile (V for W_{p,q})

  /// W at an arbitrary radius, including the analytic tail.
  double value_at(double r) const;
  double slope_at(double r) const;
  ExtremalNorms bundle() const;
};

/// Ground state of the semilinear extremal equation on the given grid.
/// gradq in the returned norms is ‖∇W_p‖_q^q for the supplied q.
ExtremalProfile solve_wp(int N, double p, const GridPtr& grid, double q = 2.0, const ShootOptions& opt = {});

/// Extremal of the L^q Gagliardo-Nirenberg inequality.
ExtremalProfile solve_wpq(int N, double p, double q, const GridPtr& grid, const ShootOptions& opt = {});

/// Grid on which solve_wp(N, p) decays well inside R, with spacing 0.005.
GridPtr wp_grid(int N, double p);
/// Grid for solve_wpq on [0, 40] with spacing 0.005.
GridPtr wpq_grid(int N, double p, double q);

/// Quintic smoothstep cutoff: 1 on [0,1], 0 on [2,∞), C² in between.
double cutoff_bump(double s);

/// φ₁(x) = A (τc)^{N/2}/‖W_p‖₂ φ(x/R) W_p(τx) with R = τ^{-1/2}, A fixed by ‖φ₁‖₂ = c.
RadialField build_phi1(double tau, double c, const ExtremalProfile& wp, const GridPtr& grid);

}  // namespace normsol
