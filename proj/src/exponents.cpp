#include "normsol/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "normsol/errors.hpp"

namespace normsol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

bool sub_p_range(int N, double q, double p) {
  return p > 2.0 && p < (1.0 + 2.0 / N) * std::min(2.0, q);
}

bool sub_q_range(int N, double q) {
  const bool below_two = N >= 2 && q > 2.0 * N / (N + 2.0) && q < 2.0;
  const bool above_two = N >= 3 && q > 2.0 && q < N;
  return below_two || above_two;
}

bool super_p_range(int N, double q, double p) {
  const double upper = std::min(sobolev_conjugate(N, 2.0), sobolev_conjugate(N, q));
  return p > (1.0 + 2.0 / N) * std::max(2.0, q) && p < upper;
}

bool super_q_range(int N, double q) {
  const double n = N;
  const bool below_two = N >= 2 && q > 2.0 * n * (n + 2.0) / (n * n + 2.0 * n + 4.0) && q < 2.0;
  const double cap = N >= 3 ? std::min(n, 2.0 * n * n / (n * n - 4.0)) : 0.0;
  const bool above_two = N >= 3 && q > 2.0 && q < cap;
  return below_two || above_two;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical:
      return "Subcritical";
    case Regime::L2Critical:
      return "L2Critical";
    case Regime::LqCritical:
      return "LqCritical";
    case Regime::Supercritical:
      return "Supercritical";
    case Regime::OutsideTheory:
      return "OutsideTheory";
  }
  return "OutsideTheory";
}

bool same_exponent(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

double sobolev_conjugate(int N, double s) {
  if (s >= N) return kInf;
  return s * N / (N - s);
}

void validate(const ProblemParams& params) {
  const auto [N, q, p, c] = params;
  if (N < 2) throw ParameterError("dimension must satisfy N >= 2, got N = " + std::to_string(N));
  if (!std::isfinite(q) || !(q > 1.0 && q < N))
    throw ParameterError("exponent q must satisfy 1 < q < N, got q = " + fmt(q));
  if (q == 2.0) throw ParameterError("exponent q must satisfy q != 2");
  if (!std::isfinite(p) || !(p > 2.0)) throw ParameterError("exponent p must satisfy p > 2, got p = " + fmt(p));
  const double two_star = sobolev_conjugate(N, 2.0);
  const double q_star = sobolev_conjugate(N, q);
  if (!(p < two_star))
    throw ParameterError("exponent p must satisfy p < 2* = " + fmt(two_star) + ", got p = " + fmt(p));
  if (!(p < q_star))
    throw ParameterError("exponent p must satisfy p < q* = " + fmt(q_star) + ", got p = " + fmt(p));
  if (!std::isfinite(c) || !(c > 0.0)) throw ParameterError("mass must satisfy c > 0, got c = " + fmt(c));
}

DerivedExponents derive_exponents_unchecked(int N, double q, double p) {
  const double n = N;
  DerivedExponents e;
  e.delta_p = n * (p - 2.0) / (2.0 * p);
  e.delta_q = n * (q - 2.0) / (2.0 * q);
  e.nu_pq = n * q * (p - 2.0) / (p * (n * q - 2.0 * (n - q)));
  e.pbar = 2.0 * (1.0 + 2.0 / n);
  e.phat = q * (1.0 + 2.0 / n);
  return e;
}

DerivedExponents derive_exponents(const ProblemParams& params) {
  validate(params);
  return derive_exponents_unchecked(params.N, params.q, params.p);
}

RegimeReport classify_regime(const ProblemParams& params) {
  validate(params);
  const auto [N, q, p, c] = params;
  const DerivedExponents e = derive_exponents_unchecked(N, q, p);

  RegimeReport report;
  const bool sp = sub_p_range(N, q, p);
  const bool sq = sub_q_range(N, q);
  const bool up = super_p_range(N, q, p);
  const bool uq = super_q_range(N, q);
  if (sp) report.satisfied_conditions.emplace_back("sub_p_range");
  if (sq) report.satisfied_conditions.emplace_back("sub_q_range");
  if (up) report.satisfied_conditions.emplace_back("super_p_range");
  if (uq) report.satisfied_conditions.emplace_back("super_q_range");

  const double pd = p * e.delta_p;
  if (same_exponent(p, e.pbar)) {
    report.regime = Regime::L2Critical;
  } else if (same_exponent(p, e.phat)) {
    report.regime = Regime::LqCritical;
  } else if (sp && sq) {
    report.regime = Regime::Subcritical;
    report.predicted_exponents["m_of_c"] = 2.0 * p * (1.0 - e.delta_p) / (2.0 - pd);
    report.predicted_exponents["lambda_of_c_sub"] = 2.0 * (p - 2.0) / (2.0 - pd);
  } else if (up && uq) {
    report.regime = Regime::Supercritical;
    const double pn = p * e.nu_pq;
    report.predicted_exponents["sigma_of_c_a"] = 2.0 * p * (1.0 - e.delta_p) / (pd - 2.0);
    report.predicted_exponents["sigma_of_c_b"] = q * p * (1.0 - e.nu_pq) / (pn - q);
    report.predicted_exponents["lambda_of_c_super_a"] = 2.0 * (p - 2.0) / (pd - 2.0);
    report.predicted_exponents["lambda_of_c_super_b"] = 2.0 * q * (p - 2.0) / (N * p - N * q - 2.0 * q);
  } else {
    report.regime = Regime::OutsideTheory;
  }
  return report;
}

double gn_constant_2(int N, double p, const ExtremalNorms& wp) {
  if (!wp.converged || !(wp.mass2 > 0.0))
    throw DependencyError("gn_constant_2 needs a converged W_p extremal");
  if (!(p > 2.0 && p < sobolev_conjugate(N, 2.0)))
    throw ParameterError("gn_constant_2 needs 2 < p < 2*");
  // ‖W‖₂^{p-2} = (‖W‖₂²)^{(p-2)/2}
  return std::pow(p / (2.0 * std::pow(wp.mass2, 0.5 * (p - 2.0))), 1.0 / p);
}

double gn_q_prefactor(int N, double p, double q) {
  const double n = N;
  const double a = n * q + p * q - 2.0 * n;
  const double num_base = 2.0 * (n * q - p * (n - q));
  const double num_exp = p * (n - q) - n * q;
  const double den_base = q * n * (p - 2.0);
  const double den_exp = n * (p - 2.0);
  if (!(num_base > 0.0) || !(den_base > 0.0) || !(a > 0.0))
    throw ParameterError("gn_q_prefactor needs 2 < p < q* and 1 < q < N");
  // log-domain evaluation; the raw powers overflow for moderate N.
  const double log_inner = num_exp * std::log(num_base) - den_exp * std::log(den_base);
  return a * std::exp(log_inner / a);
}

double gn_constant_q(int N, double p, double q, const ExtremalNorms& wpq) {
  if (!wpq.converged || !(wpq.mass2 > 0.0) || !(wpq.gradq > 0.0))
    throw DependencyError("gn_constant_q needs a converged W_{p,q} extremal");
  const double n = N;
  const double K = gn_q_prefactor(N, p, q);
  const double base = K / (wpq.gradq / q + 0.5 * wpq.mass2);
  // The bracket equals the sharp constant raised to p(Nq-2N+2q)/(Nq+pq-2N).
  const double power = (n * q + p * q - 2.0 * n) / (p * (n * q - 2.0 * n + 2.0 * q));
  return std::pow(base, power);
}

CriticalMasses critical_masses(const ProblemParams& params, const ExtremalNorms* wp,
                               const ExtremalNorms* wpq) {
  const RegimeReport report = classify_regime(params);
  const int N = params.N;
  const double q = params.q;
  const double p = params.p;
  CriticalMasses out;
  if (report.regime == Regime::L2Critical) {
    if (wp == nullptr || !wp->converged) throw DependencyError("c_* needs a converged W_p̄");
    out.c_star = std::sqrt(wp->mass2);
    return out;
  }
  if (report.regime == Regime::LqCritical) {
    if (N < 3) throw RegimeError("the L^q-critical thresholds need N >= 3");
    if (wp == nullptr || !wp->converged || wpq == nullptr || !wpq->converged)
      throw DependencyError("c_** and ĉ_** need converged W_p̂ and W_{p̂,q}");
    const double n = N;
    const double Kq = gn_constant_q(N, p, q, *wpq);
    const double c2 = std::pow((n + 2.0) / (n * std::pow(Kq, q * (n + 2.0) / n)), n / (2.0 * q));
    const double ch =
        std::pow(2.0 * wp->gradq / (q * std::pow(wp->mass2, (n - q) / n)), n / (2.0 * q));
    out.c_2star = c2;
    out.chat_2star = ch;
    return out;
  }
  throw RegimeError("critical masses need p = p̄ or p = p̂; regime is " + to_string(report.regime));
}

}  // namespace normsol
