#include "normsol/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "normsol/errors.hpp"

namespace normsol {

EnergyBreakdown evaluate(const FieldNorms& n, const ProblemParams& params) {
  const DerivedExponents e = derive_exponents_unchecked(params.N, params.q, params.p);
  EnergyBreakdown b;
  b.kin2 = 0.5 * n.grad2;
  b.kinq = n.gradq / params.q;
  b.pot = n.lp / params.p;
  b.total = b.kin2 + b.kinq - b.pot;
  b.mass2 = n.mass2;
  b.pohozaev = n.grad2 + (1.0 + e.delta_q) * n.gradq - e.delta_p * n.lp;
  if (n.mass2 > 0.0) {
    b.lambda_general = (n.grad2 + n.gradq - n.lp) / n.mass2;
    b.lambda_pohozaev =
        ((1.0 - 1.0 / e.delta_p) * n.grad2 + (1.0 - (1.0 + e.delta_q) / e.delta_p) * n.gradq) / n.mass2;
  }
  return b;
}

EnergyBreakdown evaluate(const RadialField& u, const ProblemParams& params) {
  return evaluate(norms(u, params.q, params.p), params);
}

std::string breakdown_csv_header() { return "c,I,kin2,kinq,pot,P,lambda_general,lambda_pohozaev"; }

std::string breakdown_csv_row(double c, const EnergyBreakdown& b) {
  std::ostringstream os;
  os.precision(17);
  os << c << ',' << b.total << ',' << b.kin2 << ',' << b.kinq << ',' << b.pot << ',' << b.pohozaev << ','
     << b.lambda_general << ',' << b.lambda_pohozaev;
  return os.str();
}

double default_eps_reg(const RadialField& u) {
  double m = 0.0;
  for (double d : staggered_derivative(u)) m = std::max(m, std::abs(d));
  return m > 0.0 ? 1e-8 * m : 1e-12;
}

double discrete_energy(const RadialField& u, const ProblemParams& params, double eps_reg,
                       TermWeights weights) {
  const auto w = u.grid->weights();
  const auto W = u.grid->flux_weights();
  const double q = params.q;
  const double p = params.p;
  const double e2 = eps_reg * eps_reg;
  double kin2 = 0.0, kinq = 0.0, pot = 0.0;
  const std::vector<double> d = staggered_derivative(u);
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double s = d[j] * d[j];
    kin2 += W[j] * s;
    kinq += W[j] * (eps_reg > 0.0 ? std::pow(s + e2, 0.5 * q) : std::pow(std::abs(d[j]), q));
  }
  for (std::size_t i = 0; i < u.size(); ++i) pot += w[i] * std::pow(std::abs(u.values[i]), p);
  return weights.kin2 * 0.5 * kin2 + weights.kinq * kinq / q - weights.pot * pot / p;
}

std::vector<double> energy_derivative(const RadialField& u, const ProblemParams& params, double eps_reg,
                                      TermWeights weights) {
  const std::size_t M = u.size();
  const auto w = u.grid->weights();
  const auto W = u.grid->flux_weights();
  const double h = u.grid->spacing();
  const double q = params.q;
  const double p = params.p;
  const double e2 = eps_reg * eps_reg;
  const std::vector<double> d = staggered_derivative(u);

  std::vector<double> g(M, 0.0);
  for (std::size_t j = 0; j + 1 < M; ++j) {
    const double s = d[j] * d[j];
    double qflux = 0.0;
    if (eps_reg > 0.0) {
      qflux = std::pow(s + e2, 0.5 * (q - 2.0)) * d[j];
    } else if (d[j] != 0.0) {
      qflux = std::pow(std::abs(d[j]), q - 1.0) * (d[j] > 0.0 ? 1.0 : -1.0);
    }
    // flux through the midpoint r_{j+1/2}; ∂D_j/∂u_{j+1} = 1/h, ∂D_j/∂u_j = -1/h
    const double flux = W[j] * (weights.kin2 * d[j] + weights.kinq * qflux) / h;
    g[j + 1] += flux;
    g[j] -= flux;
  }
  for (std::size_t i = 0; i < M; ++i) {
    const double a = u.values[i];
    g[i] -= weights.pot * w[i] * std::pow(std::abs(a), p - 2.0) * a;
  }
  return g;
}

RadialField gradient(const RadialField& u, const ProblemParams& params, double eps_reg, TermWeights weights) {
  std::vector<double> g = energy_derivative(u, params, eps_reg, weights);
  const auto w = u.grid->weights();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= w[i];
  return RadialField(u.grid, std::move(g));
}

FiberCoeffs fiber_coeffs(double A, double B, double C, const ProblemParams& params) {
  const DerivedExponents e = derive_exponents_unchecked(params.N, params.q, params.p);
  FiberCoeffs k;
  k.A = A;
  k.B = B;
  k.C = C;
  k.e1 = 2.0;
  k.e2 = params.q * (1.0 + e.delta_q);
  k.e3 = params.p * e.delta_p;
  k.q = params.q;
  k.p = params.p;
  return k;
}

FiberCoeffs fiber_coeffs(const RadialField& u, const ProblemParams& params) {
  const FieldNorms n = norms(u, params.q, params.p);
  return fiber_coeffs(n.grad2, n.gradq, n.lp, params);
}

double fiber_h(double t, const FiberCoeffs& k) {
  return 0.5 * k.A * t * t + k.B * std::pow(t, k.e2) / k.q - k.C * std::pow(t, k.e3) / k.p;
}

double fiber_hprime(double t, const FiberCoeffs& k) {
  // (1+δ_q) = e2/q and δ_p = e3/p
  return (k.A * t * t + (k.e2 / k.q) * k.B * std::pow(t, k.e2) - (k.e3 / k.p) * k.C * std::pow(t, k.e3)) / t;
}

double fiber_hsecond(double t, const FiberCoeffs& k) {
  return k.A + (k.e2 * (k.e2 - 1.0) / k.q) * k.B * std::pow(t, k.e2 - 2.0) -
         (k.e3 * (k.e3 - 1.0) / k.p) * k.C * std::pow(t, k.e3 - 2.0);
}

namespace {

// t·h'(t)/t^{e3}: strictly monotone in t whenever e3 is extremal among the exponents.
double scaled_slope(double t, const FiberCoeffs& k) {
  return k.A * std::pow(t, 2.0 - k.e3) + (k.e2 / k.q) * k.B * std::pow(t, k.e2 - k.e3) - (k.e3 / k.p) * k.C;
}

// Root of the monotone scaled slope; sign_small is its sign as t -> 0.
double fiber_root(const FiberCoeffs& k, double sign_small) {
  auto side = [&](double t) { return scaled_slope(t, k) * sign_small > 0.0; };  // true: left of root
  double lo = 1.0, hi = 1.0;
  if (side(1.0)) {
    while (side(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw DegenerateFiberError("fiber root bracket overflow");
    }
  } else {
    while (!side(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) throw DegenerateFiberError("fiber root bracket underflow");
    }
  }
  if (lo == hi) return lo;
  double llo = std::log(lo), lhi = std::log(hi);
  while (lhi - llo > 1e-13) {
    const double mid = 0.5 * (llo + lhi);
    if (side(std::exp(mid)))
      llo = mid;
    else
      lhi = mid;
  }
  return std::exp(0.5 * (llo + lhi));
}

}  // namespace

double find_t0(const FiberCoeffs& k, const ProblemParams& params) {
  (void)params;
  if (!(k.C > 0.0) || !(k.A + k.B > 0.0))
    throw DegenerateFiberError("find_t0 needs C > 0 and A + B > 0");
  if (!(k.e3 > std::max(k.e1, k.e2)))
    throw RegimeError("find_t0 needs the supercritical ordering pδ_p > max(2, q(1+δ_q))");
  return fiber_root(k, +1.0);
}

double find_fiber_minimum(const FiberCoeffs& k) {
  if (!(k.C > 0.0) || !(k.A + k.B > 0.0))
    throw DegenerateFiberError("fiber minimum needs C > 0 and A + B > 0");
  if (!(k.e3 < std::min(k.e1, k.e2)))
    throw RegimeError("fiber minimum needs the subcritical ordering pδ_p < min(2, q(1+δ_q))");
  return fiber_root(k, -1.0);
}

}  // namespace normsol
