#include "normsol/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "normsol/errors.hpp"
#include "normsol/groundstate.hpp"

namespace normsol {

namespace {

double dot_w(const RadialField& a, const RadialField& b) {
  const auto w = a.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a.values[i] * b.values[i];
  return s;
}

double mass_of(const RadialField& u) { return std::sqrt(std::max(dot_w(u, u), 0.0)); }

/// Symmetric tridiagonal system: diag d, off-diagonal e (e[i] couples i, i+1).
std::vector<double> solve_tridiagonal(const std::vector<double>& d, const std::vector<double>& e,
                                      std::vector<double> b) {
  const std::size_t n = d.size();
  std::vector<double> m(d);
  for (std::size_t i = 1; i < n; ++i) {
    const double f = e[i - 1] / m[i - 1];
    m[i] -= f * e[i - 1];
    b[i] -= f * b[i - 1];
  }
  b[n - 1] /= m[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - e[i] * b[i + 1]) / m[i];
  return b;
}

/// Tridiagonal approximation of the Hessian of the kinetic terms plus σ times the mass matrix.
struct Preconditioner {
  std::vector<double> diag, off;

  Preconditioner(const RadialField& u, double q, double sigma, TermWeights tw) {
    const auto w = u.grid->weights();
    const auto W = u.grid->flux_weights();
    const double h = u.grid->spacing();
    const std::vector<double> D = staggered_derivative(u);
    double dmax = 0.0;
    for (double x : D) dmax = std::max(dmax, std::abs(x));
    const double dfloor = std::max(1e-3 * dmax, 1e-300);
    const std::size_t n = u.size();
    diag.assign(n, 0.0);
    off.assign(n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = sigma * w[i];
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double a = std::max(std::abs(D[j]), dfloor);
      const double coef = tw.kin2 + tw.kinq * (q - 1.0) * std::pow(a, q - 2.0);
      const double k = W[j] * coef / (h * h);
      diag[j] += k;
      diag[j + 1] += k;
      off[j] -= k;
    }
  }

  std::vector<double> apply_inverse(const std::vector<double>& b) const { return solve_tridiagonal(diag, off, b); }
};

struct Objective {
  virtual ~Objective() = default;
  /// Value and dual derivative at u; also the weights used for the gradient.
  virtual double value(const RadialField& u) const = 0;
  virtual std::vector<double> derivative(const RadialField& u, TermWeights& tw) const = 0;
};

struct EnergyObjective : Objective {
  ProblemParams params;
  double eps;
  double value(const RadialField& u) const override { return discrete_energy(u, params, eps); }
  std::vector<double> derivative(const RadialField& u, TermWeights& tw) const override {
    tw = TermWeights{};
    return energy_derivative(u, params, eps, tw);
  }
};

/// max_t h(t) over the mass-preserving dilations.
struct FiberMaxObjective : Objective {
  ProblemParams params;
  double eps;
  double t0_of(const RadialField& u, FiberCoeffs& k) const {
    const FieldNorms n = norms(u, params.q, params.p);
    k = fiber_coeffs(n.grad2, n.gradq, n.lp, params);
    return find_t0(k, params);
  }
  double value(const RadialField& u) const override {
    FiberCoeffs k;
    const double t0 = t0_of(u, k);
    return fiber_h(t0, k);
  }
  std::vector<double> derivative(const RadialField& u, TermWeights& tw) const override {
    FiberCoeffs k;
    const double t0 = t0_of(u, k);
    tw = TermWeights{t0 * t0, std::pow(t0, k.e2), std::pow(t0, k.e3)};
    return energy_derivative(u, params, eps, tw);
  }
};

double term_scale(const RadialField& u, const ProblemParams& params, double eps, TermWeights tw) {
  double s = 0.0;
  for (TermWeights part : {TermWeights{tw.kin2, 0, 0}, TermWeights{0, tw.kinq, 0}, TermWeights{0, 0, tw.pot}}) {
    const RadialField g = gradient(u, params, eps, part);
    s += std::sqrt(std::max(dot_w(g, g), 0.0));
  }
  return s;
}

/// Relative tangential gradient, ignoring nodes held at zero by the clipping.
double tangential_ratio(const RadialField& u, const std::vector<double>& dual, double lambda, double scale,
                        bool dirichlet) {
  const auto w = u.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size() - (dirichlet ? 1 : 0); ++i) {
    const double gt = dual[i] / w[i] - lambda * u.values[i];
    if (u.values[i] <= 0.0 && gt >= 0.0) continue;
    s += w[i] * gt * gt;
  }
  return scale > 0.0 ? std::sqrt(s) / scale : 0.0;
}

RadialField retract(const RadialField& u, const std::vector<double>& dir, double alpha, double c) {
  RadialField v = u;
  for (std::size_t i = 0; i < v.size(); ++i) v.values[i] = std::max(0.0, v.values[i] + alpha * dir[i]);
  return project_mass(v, c);
}

struct LoopOutcome {
  RadialField u;
  int iterations = 0;
  double grad_ratio = 0.0;
  bool grad_ok = false;
  std::vector<HistoryEntry> history;
  std::string message;
};

/// Preconditioned descent on the mass sphere. In Pohozaev mode the iterate is
/// dilated back towards P = 0 whenever the fiber maximiser drifts.
LoopOutcome descend(const Objective& obj, const ProblemParams& params, RadialField u, const SolveConfig& cfg,
                    double eps, bool pohozaev_mode) {
  const double c = params.c;
  const std::size_t last = u.size() - 1;
  if (cfg.dirichlet_outer) u.values[last] = 0.0;
  u = project_mass(u, c);
  LoopOutcome out;
  std::deque<double> recent;
  double alpha_prev = cfg.step0;
  double value = obj.value(u);
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (pohozaev_mode) {
      FiberCoeffs k = fiber_coeffs(u, params);
      const double t0 = find_t0(k, params);
      if (std::abs(t0 - 1.0) > cfg.dilation_trigger) {
        u = resample_dilation(u, t0);
        if (cfg.dirichlet_outer && u.values[last] != 0.0) {
          u.values[last] = 0.0;
          u = project_mass(u, c);
        }
        value = obj.value(u);
        recent.clear();
      }
    }
    TermWeights tw;
    const std::vector<double> d = obj.derivative(u, tw);
    double du = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) du += d[i] * u.values[i];
    const double lambda = du / (c * c);
    const double scale = term_scale(u, params, eps, tw);
    const double ratio = tangential_ratio(u, d, lambda, scale, cfg.dirichlet_outer);
    const EnergyBreakdown br = evaluate(u, params);
    out.history.push_back(HistoryEntry{it, value, ratio, br.pohozaev});
    out.iterations = it;
    out.grad_ratio = ratio;
    if (ratio <= cfg.tol_grad) {
      out.grad_ok = true;
      out.message = "tangential gradient below tolerance";
      break;
    }
    recent.push_back(value);
    if (recent.size() > 10) recent.pop_front();
    if (recent.size() == 10 && std::abs(recent.front() - recent.back()) <= cfg.tol_energy * std::abs(value)) {
      out.message = "energy stagnated";
      break;
    }

    const FieldNorms n = norms(u, params.q, params.p);
    const double sigma = std::max(-lambda, 0.0) + 0.1 * tw.kin2 * n.grad2 / (c * c) + 1e-300;
    Preconditioner P(u, params.q, sigma, tw);
    std::vector<double> wu(u.size());
    const auto w = u.grid->weights();
    for (std::size_t i = 0; i < u.size(); ++i) wu[i] = w[i] * u.values[i];
    std::vector<double> dd = d;
    if (cfg.dirichlet_outer) {
      // eliminate the boundary node
      P.off[last - 1] = 0.0;
      P.diag[last] = 1.0;
      dd[last] = 0.0;
      wu[last] = 0.0;
    }
    const std::vector<double> a = P.apply_inverse(dd);
    const std::vector<double> b = P.apply_inverse(wu);
    double wa = 0.0, wb = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      wa += wu[i] * a[i];
      wb += wu[i] * b[i];
    }
    const double mu = wa / wb;
    std::vector<double> dir(u.size());
    double slope = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      dir[i] = -a[i] + mu * b[i];
      slope += d[i] * dir[i];
    }
    if (!(slope < 0.0)) {
      out.message = "no descent direction";
      break;
    }
    double alpha = std::min(cfg.step0, 2.0 * alpha_prev);
    bool accepted = false;
    while (alpha > 1e-14) {
      RadialField trial = retract(u, dir, alpha, c);
      double tv;
      try {
        tv = obj.value(trial);
      } catch (const Error&) {
        tv = std::numeric_limits<double>::infinity();
      }
      if (tv <= value + cfg.armijo.c1 * alpha * slope) {
        u = std::move(trial);
        value = tv;
        accepted = true;
        break;
      }
      alpha *= cfg.armijo.shrink;
    }
    if (!accepted) {
      out.message = "line search failed";
      break;
    }
    alpha_prev = alpha;
    out.iterations = it + 1;
  }
  if (out.message.empty()) out.message = "iteration limit reached";
  out.u = std::move(u);
  return out;
}

SolveResult finish(const ProblemParams& params, LoopOutcome lo, bool pohozaev_mode, const SolveConfig& cfg) {
  SolveResult r;
  r.u = std::move(lo.u);
  r.iterations = lo.iterations;
  r.history = std::move(lo.history);
  r.message = lo.message;
  r.grad_norm = lo.grad_ratio;
  r.breakdown = evaluate(r.u, params);
  r.level = r.breakdown.total;
  if (pohozaev_mode) {
    r.lambda = r.breakdown.lambda_pohozaev;
    const double scale = r.breakdown.kin2 * 2.0 + r.breakdown.kinq * params.q;
    const bool p_ok = std::abs(r.breakdown.pohozaev) <= cfg.tol_pohozaev * scale;
    r.converged = lo.grad_ok && p_ok;
    if (lo.grad_ok && !p_ok) r.message = "Pohozaev residual above tolerance";
  } else {
    r.lambda = r.breakdown.lambda_general;
    r.converged = lo.grad_ok;
  }
  r.residual = pde_residual(r.u, r.lambda, params);
  return r;
}

std::vector<InitSpec> starts(const SolveConfig& cfg, const ProblemParams& params, const GridPtr& grid) {
  if (cfg.init.kind != InitSpec::Kind::Gaussian) return {cfg.init};
  double w = cfg.init.width > 0.0 ? cfg.init.width : suggest_length_scale(params);
  w = std::min(w, grid->radius() / 4.0);
  if (!cfg.multi_start) return {InitSpec{InitSpec::Kind::Gaussian, w, {}}};
  std::vector<InitSpec> s;
  for (double f : {1.0, 0.5, 2.0})
    s.push_back(InitSpec{InitSpec::Kind::Gaussian, std::min(f * w, grid->radius() / 3.0), {}});
  return s;
}

bool better(const SolveResult& a, const SolveResult& b) {
  if (a.converged != b.converged) return a.converged;
  return a.level < b.level;
}

void check_grid(const ProblemParams& params, const GridPtr& grid) {
  if (!grid) throw ParameterError("grid is null");
  if (grid->dimension() != params.N) throw ParameterError("grid dimension does not match N");
}

void check_config(const SolveConfig& cfg) {
  if (!(cfg.tol_grad > 0.0 && cfg.tol_pohozaev > 0.0 && cfg.tol_energy > 0.0))
    throw ParameterError("tolerances must be positive");
  if (!(cfg.armijo.shrink > 0.0 && cfg.armijo.shrink < 1.0 && cfg.armijo.c1 > 0.0 && cfg.armijo.c1 < 1.0))
    throw ParameterError("Armijo constants must lie in (0,1)");
  if (!(cfg.step0 > 0.0)) throw ParameterError("step0 must be positive");
  if (cfg.max_iters < 0) throw ParameterError("max_iters must be nonnegative");
}

}  // namespace

RadialField project_mass(const RadialField& u, double c) {
  const double m = mass_of(u);
  if (!(m > 0.0)) throw ParameterError("cannot project a zero field onto the mass sphere");
  RadialField v = u;
  const double s = c / m;
  for (double& x : v.values) x *= s;
  return v;
}

double suggest_length_scale(const ProblemParams& params) {
  const RegimeReport rr = classify_regime(params);
  if (rr.regime != Regime::Subcritical && rr.regime != Regime::Supercritical) return 1.0;
  const GridPtr aux = make_grid(params.N, 12.0, 6001);
  RadialField g = RadialField::sample(aux, [](double r) { return std::exp(-0.5 * r * r); });
  g = project_mass(g, params.c);
  const FiberCoeffs k = fiber_coeffs(g, params);
  const double t = rr.regime == Regime::Subcritical ? find_fiber_minimum(k) : find_t0(k, params);
  return std::clamp(1.0 / t, 1e-4, 1e8);
}

double suggest_radius(const ProblemParams& params) { return 16.0 * suggest_length_scale(params); }

RadialField initial_field(const ProblemParams& params, const GridPtr& grid, const InitSpec& init) {
  check_grid(params, grid);
  switch (init.kind) {
    case InitSpec::Kind::Gaussian: {
      const double w = init.width > 0.0 ? init.width : suggest_length_scale(params);
      return project_mass(RadialField::sample(grid, [w](double r) { return std::exp(-0.5 * (r / w) * (r / w)); }),
                          params.c);
    }
    case InitSpec::Kind::WpSeed: {
      const ExtremalProfile wp = solve_wp(params.N, params.p, wp_grid(params.N, params.p));
      const RegimeReport rr = classify_regime(params);
      double t = 1.0;
      if (rr.regime == Regime::Subcritical || rr.regime == Regime::Supercritical) {
        const FiberCoeffs k = fiber_coeffs(project_mass(wp.field, params.c), params);
        t = rr.regime == Regime::Subcritical ? find_fiber_minimum(k) : find_t0(k, params);
      }
      return project_mass(RadialField::sample(grid, [&](double r) { return wp.value_at(t * r); }), params.c);
    }
    case InitSpec::Kind::FromFile: {
      RadialField f = read_field_csv(init.path, params.N);
      if (f.size() != grid->size() || std::abs(f.grid->radius() - grid->radius()) > 1e-9 * grid->radius())
        throw ParameterError("field file does not match the solver grid");
      for (double& x : f.values) x = std::max(x, 0.0);
      return project_mass(RadialField(grid, std::move(f.values)), params.c);
    }
  }
  throw ParameterError("unknown init kind");
}

SolveResult descend_on_sphere(const ProblemParams& params, const RadialField& u0, const SolveConfig& cfg) {
  check_config(cfg);
  EnergyObjective obj;
  obj.params = params;
  obj.eps = cfg.eps_reg;
  return finish(params, descend(obj, params, u0, cfg, cfg.eps_reg, false), false, cfg);
}

SolveResult minimize_global(const ProblemParams& params, const GridPtr& grid, const SolveConfig& cfg) {
  validate(params);
  check_grid(params, grid);
  check_config(cfg);
  const RegimeReport rr = classify_regime(params);
  if (rr.regime != Regime::Subcritical)
    throw RegimeError("minimize_global needs the subcritical regime, got " + to_string(rr.regime));
  SolveResult best;
  bool have = false;
  for (const InitSpec& s : starts(cfg, params, grid)) {
    SolveResult r = descend_on_sphere(params, initial_field(params, grid, s), cfg);
    if (!have || better(r, best)) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

SolveResult minimize_pohozaev(const ProblemParams& params, const GridPtr& grid, const SolveConfig& cfg) {
  validate(params);
  check_grid(params, grid);
  check_config(cfg);
  const RegimeReport rr = classify_regime(params);
  if (rr.regime != Regime::Supercritical)
    throw RegimeError("minimize_pohozaev needs the supercritical regime, got " + to_string(rr.regime));
  FiberMaxObjective obj;
  obj.params = params;
  obj.eps = cfg.eps_reg;
  SolveResult best;
  bool have = false;
  for (const InitSpec& s : starts(cfg, params, grid)) {
    LoopOutcome lo = descend(obj, params, initial_field(params, grid, s), cfg, cfg.eps_reg, true);
    // land on the Pohozaev set
    for (int pass = 0; pass < 8; ++pass) {
      const double t0 = find_t0(fiber_coeffs(lo.u, params), params);
      if (std::abs(t0 - 1.0) < 1e-12) break;
      lo.u = resample_dilation(lo.u, t0);
      if (cfg.dirichlet_outer && lo.u.values.back() != 0.0) {
        lo.u.values.back() = 0.0;
        lo.u = project_mass(lo.u, params.c);
      }
    }
    SolveResult r = finish(params, std::move(lo), true, cfg);
    if (!have || better(r, best)) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

double pde_residual(const RadialField& u, double lambda, const ProblemParams& params) {
  const auto w = u.grid->weights();
  const RadialField k2 = gradient(u, params, 0.0, TermWeights{1, 0, 0});
  const RadialField kq = gradient(u, params, 0.0, TermWeights{0, 1, 0});
  const RadialField pt = gradient(u, params, 0.0, TermWeights{0, 0, 1});
  double res = 0.0, a = 0.0, b = 0.0, l = 0.0, c = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double x = k2.values[i] + kq.values[i] + pt.values[i] - lambda * u.values[i];
    res += w[i] * x * x;
    a += w[i] * k2.values[i] * k2.values[i];
    b += w[i] * kq.values[i] * kq.values[i];
    c += w[i] * pt.values[i] * pt.values[i];
    l += w[i] * u.values[i] * u.values[i];
  }
  const double scale = std::sqrt(a) + std::sqrt(b) + std::sqrt(c) + std::abs(lambda) * std::sqrt(l);
  return scale > 0.0 ? std::sqrt(res) / scale : 0.0;
}

double residual_optimal_lambda(const RadialField& u, const ProblemParams& params) {
  const auto w = u.grid->weights();
  const RadialField g = gradient(u, params, 0.0);
  double gu = 0.0, uu = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    gu += w[i] * g.values[i] * u.values[i];
    uu += w[i] * u.values[i] * u.values[i];
  }
  return uu > 0.0 ? gu / uu : 0.0;
}

BlowdownResult detect_blowdown(const ProblemParams& params, const RadialField& seed,
                               const std::vector<double>& theta_grid, double floor) {
  BlowdownResult out;
  const FiberCoeffs k = fiber_coeffs(seed, params);
  for (double th : theta_grid) out.trace.emplace_back(th, fiber_h(std::exp(th), k));
  if (out.trace.size() < 2) return out;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& pt : out.trace) lowest = std::min(lowest, pt.second);
  const auto n = out.trace.size();
  out.unbounded = lowest < floor && out.trace[n - 1].second < out.trace[n - 2].second;
  return out;
}

void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.precision(17);
  f << "iter,I,grad_norm,P\n";
  for (const auto& h : history) f << h.iter << ',' << h.energy << ',' << h.grad_norm << ',' << h.pohozaev << '\n';
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace normsol
