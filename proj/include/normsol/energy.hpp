#pragma once

#include <string>
#include <vector>

#include "normsol/exponents.hpp"
#include "normsol/radial_grid.hpp"

namespace normsol {

struct EnergyBreakdown {
  double kin2 = 0.0;   ///< ½‖∇u‖₂²
  double kinq = 0.0;   ///< (1/q)‖∇u‖_q^q
  double pot = 0.0;    ///< (1/p)‖u‖_p^p
  double total = 0.0;  ///< I(u) = kin2 + kinq - pot
  double mass2 = 0.0;
  double pohozaev = 0.0;         ///< P(u) = ‖∇u‖₂² + (1+δ_q)‖∇u‖_q^q - δ_p‖u‖_p^p
  double lambda_general = 0.0;   ///< (‖∇u‖₂² + ‖∇u‖_q^q - ‖u‖_p^p)/‖u‖₂²
  double lambda_pohozaev = 0.0;  ///< multiplier identity valid on P(u) = 0
};

/// I(u), P(u) and both multiplier estimates from one quadrature pass.
EnergyBreakdown evaluate(const RadialField& u, const ProblemParams& params);
EnergyBreakdown evaluate(const FieldNorms& n, const ProblemParams& params);

/// Column order: c, I, kin2, kinq, pot, P, lambda_general, lambda_pohozaev.
std::string breakdown_csv_header();
std::string breakdown_csv_row(double c, const EnergyBreakdown& b);

/// Scalar multipliers of the three energy pieces. The fiber-maximised
/// energy uses (t², t^{e2}, t^{e3}).
struct TermWeights {
  double kin2 = 1.0;
  double kinq = 1.0;
  double pot = 1.0;
};

/// Discrete energy with the q-term evaluated on sqrt(D² + eps²).
/// eps_reg = 0 reproduces evaluate(u).total.
double discrete_energy(const RadialField& u, const ProblemParams& params, double eps_reg,
                       TermWeights weights = {});

/// ∂E/∂u_i of discrete_energy, as a dual vector (no division by the node weights).
std::vector<double> energy_derivative(const RadialField& u, const ProblemParams& params, double eps_reg,
                                      TermWeights weights = {});

/// L² gradient of the discrete energy: (∂E/∂u_i)/w_i, so that
/// Σ w_i G_i φ_i is the exact directional derivative along φ.
RadialField gradient(const RadialField& u, const ProblemParams& params, double eps_reg,
                     TermWeights weights = {});

/// Default regulariser: 1e-8 times the largest staggered slope of u.
double default_eps_reg(const RadialField& u);

/// h(t) = A t²/2 + B t^{e2}/q - C t^{e3}/p for the dilation u_t = t^{N/2}u(t·).
struct FiberCoeffs {
  double A = 0.0;  ///< ‖∇u‖₂²
  double B = 0.0;  ///< ‖∇u‖_q^q
  double C = 0.0;  ///< ‖u‖_p^p
  double e1 = 2.0;
  double e2 = 0.0;  ///< q(1+δ_q)
  double e3 = 0.0;  ///< pδ_p
  double q = 2.0;
  double p = 2.0;
};

FiberCoeffs fiber_coeffs(const RadialField& u, const ProblemParams& params);
FiberCoeffs fiber_coeffs(double A, double B, double C, const ProblemParams& params);

double fiber_h(double t, const FiberCoeffs& k);
double fiber_hprime(double t, const FiberCoeffs& k);
double fiber_hsecond(double t, const FiberCoeffs& k);

/// Unique maximiser of h on (0, ∞) for supercritical exponent ordering
/// e3 > max(e1, e2). Throws DegenerateFiberError or RegimeError.
double find_t0(const FiberCoeffs& k, const ProblemParams& params);

/// Unique minimiser of h for subcritical ordering e3 < min(e1, e2).
double find_fiber_minimum(const FiberCoeffs& k);

}  // namespace normsol
