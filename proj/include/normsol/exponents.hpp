#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace normsol {

/// The problem  -Δu - Δ_q u = λu + |u|^{p-2}u,  ‖u‖₂ = c  on ℝ^N.
struct ProblemParams {
  int N = 3;
  double q = 2.5;
  double p = 3.0;
  double c = 1.0;
};

struct DerivedExponents {
  double delta_p = 0.0;  ///< N(p-2)/(2p), the GN exponent of ‖∇u‖₂
  double delta_q = 0.0;  ///< N(q-2)/(2q); q(1+δ_q) is the dilation weight of ‖∇u‖_q^q
  double nu_pq = 0.0;    ///< Nq(p-2)/(p[Nq-2(N-q)]), the L^q GN exponent
  double pbar = 0.0;     ///< L²-critical exponent 2(1+2/N)
  double phat = 0.0;     ///< L^q-critical exponent q(1+2/N)
};

enum class Regime { Subcritical, L2Critical, LqCritical, Supercritical, OutsideTheory };

std::string to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::OutsideTheory;
  /// Which of the p- and q-ranges of the sub- and supercritical theories hold:
  /// subset of {"sub_p_range", "sub_q_range", "super_p_range", "super_q_range"}.
  std::vector<std::string> satisfied_conditions;
  /// Power-law exponents of m(c), σ(c) and λ_c predicted for the regime.
  std::map<std::string, double> predicted_exponents;
};

/// s* = sN/(N-s), or +inf when s >= N.
double sobolev_conjugate(int N, double s);

/// Throws ParameterError naming the first violated inequality.
void validate(const ProblemParams& params);

DerivedExponents derive_exponents(const ProblemParams& params);

/// Same algebra without the validity checks on c, used internally by
/// routines that only care about (N, q, p).
DerivedExponents derive_exponents_unchecked(int N, double q, double p);

RegimeReport classify_regime(const ProblemParams& params);

/// Norms of a converged Gagliardo-Nirenberg extremal.
struct ExtremalNorms {
  double mass2 = 0.0;  ///< ‖W‖₂²
  double grad2 = 0.0;  ///< ‖∇W‖₂²
  double gradq = 0.0;  ///< ‖∇W‖_q^q
  double lp = 0.0;     ///< ‖W‖_p^p
  bool converged = false;
};

/// Sharp constant of ‖u‖_p ≤ C ‖∇u‖₂^{δ_p} ‖u‖₂^{1-δ_p} from the W_p mass.
double gn_constant_2(int N, double p, const ExtremalNorms& wp);

/// Closed-form prefactor K entering the L^q Gagliardo-Nirenberg constant.
double gn_q_prefactor(int N, double p, double q);

/// Sharp constant of ‖u‖_p ≤ K ‖∇u‖_q^{ν} ‖u‖₂^{1-ν} from the W_{p,q} norms.
double gn_constant_q(int N, double p, double q, const ExtremalNorms& wpq);

struct CriticalMasses {
  std::optional<double> c_star;      ///< ‖W_p̄‖₂, L²-critical threshold
  std::optional<double> c_2star;     ///< lower L^q-critical threshold
  std::optional<double> chat_2star;  ///< upper L^q-critical threshold
};

/// Thresholds for p = p̄ (needs wp at p̄) or p = p̂ (needs wp and wpq at p̂;
/// wp.gradq must be ‖∇W_p‖_q^q for the problem's q).
CriticalMasses critical_masses(const ProblemParams& params, const ExtremalNorms* wp,
                               const ExtremalNorms* wpq);

/// Relative equality used for the critical exponents.
bool same_exponent(double a, double b);

}  // namespace normsol
