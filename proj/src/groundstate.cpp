#include "normsol/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "dopri5.hpp"
#include "normsol/energy.hpp"
#include "normsol/errors.hpp"

namespace normsol {

namespace {

using detail::State;

enum class Outcome { Overshoot, Undershoot };

struct Trajectory {
  Outcome outcome = Outcome::Undershoot;
  std::vector<double> r, v, s;
};

/// State is (value, y1) where slope_of(y1) is the radial derivative; the
/// derivative has the sign of y1 in both formulations.
struct RadialOde {
  std::function<State<2>(double, const State<2>&)> rhs;
  std::function<double(double)> slope_of;
  std::function<State<2>(double s, double r0)> start;
  /// Radius over which the centre value changes by O(1) relative amount.
  std::function<double(double s)> core_scale;
  double r_max = 100.0;
  double hmax = 0.05;
};

Trajectory shoot(const RadialOde& ode, double s, double rtol, bool record) {
  const double ell = std::min(1.0, ode.core_scale(s));
  const double r0 = 1e-5 * ell;
  Trajectory tr;
  const State<2> y0 = ode.start(s, r0);
  if (record) {
    tr.r = {0.0, r0};
    tr.v = {s, y0[0]};
    tr.s = {0.0, ode.slope_of(y0[1])};
  }
  if (y0[1] > 0.0) {
    tr.outcome = Outcome::Undershoot;
    return tr;
  }
  detail::Dopri5Options opt;
  opt.rtol = rtol;
  opt.atol = 1e-16 * std::max(1.0, s);
  opt.h0 = 1e-3 * ell;
  opt.hmax = ode.hmax;
  bool decided = false;
  const long steps = detail::integrate_dopri5<2>(
      ode.rhs, r0, y0, ode.r_max, opt, [&](double r, const State<2>& y, const State<2>&) {
        if (y[0] < 0.0) {
          tr.outcome = Outcome::Overshoot;
          decided = true;
          return false;
        }
        if (y[1] > 0.0 || y[0] > 10.0 * s) {
          tr.outcome = Outcome::Undershoot;
          decided = true;
          return false;
        }
        if (record) {
          tr.r.push_back(r);
          tr.v.push_back(y[0]);
          tr.s.push_back(ode.slope_of(y[1]));
        }
        return true;
      });
  if (steps < 0) throw ShootingError("shooting integration failed (step size collapse) at W(0) = " + std::to_string(s));
  if (!decided) tr.outcome = Outcome::Undershoot;
  return tr;
}

struct ShootResult {
  double s = 0.0;
  double width = 0.0;
  int steps = 0;
  Trajectory trajectory;
};

ShootResult bisect_amplitude(const RadialOde& ode, const ShootOptions& opt) {
  double lo = opt.s_min, hi = opt.s_max;
  if (shoot(ode, lo, opt.rtol, false).outcome != Outcome::Undershoot ||
      shoot(ode, hi, opt.rtol, false).outcome != Outcome::Overshoot)
    throw ShootingError("shooting bracket not found within [" + std::to_string(opt.s_min) + ", " +
                        std::to_string(opt.s_max) + "]");
  ShootResult res;
  while ((hi - lo) > opt.bracket_tol * hi && res.steps < 400) {
    const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (shoot(ode, mid, opt.rtol, false).outcome == Outcome::Overshoot)
      hi = mid;
    else
      lo = mid;
    ++res.steps;
  }
  res.s = lo;
  res.width = (hi - lo) / hi;
  res.trajectory = shoot(ode, lo, opt.rtol, true);
  return res;
}

ProfileCurve build_curve(const Trajectory& tr, double s, ProfileCurve::Tail tail, double rate, int N,
                         const ShootOptions& opt) {
  std::size_t end = tr.r.size();
  const double switch_level = (tail == ProfileCurve::Tail::Zero ? opt.decay_floor : opt.tail_switch) * s;
  for (std::size_t k = 1; k < tr.r.size(); ++k) {
    if (tr.v[k] < switch_level) {
      end = k + 1;
      break;
    }
  }
  if (end == tr.r.size()) {
    // bisection noise reached before the switch level: stop at the smallest value
    const auto it = std::min_element(tr.v.begin(), tr.v.end());
    end = static_cast<std::size_t>(it - tr.v.begin()) + 1;
  }
  std::vector<double> r(tr.r.begin(), tr.r.begin() + end);
  std::vector<double> v(tr.v.begin(), tr.v.begin() + end);
  std::vector<double> sl(tr.s.begin(), tr.s.begin() + end);
  double cutoff = r.back();
  if (tail == ProfileCurve::Tail::Exponential) cutoff = r.back() + 745.0 / rate;
  if (tail == ProfileCurve::Tail::PowerLaw) cutoff = std::numeric_limits<double>::infinity();
  return ProfileCurve(std::move(r), std::move(v), std::move(sl), tail, rate, N, cutoff);
}

double find_decay_radius(const ProfileCurve& curve, double floor) {
  // first radius where the curve drops below floor
  double lo = 0.0;
  double hi = curve.match_radius();
  if (curve.value(hi) >= floor) {
    double step = std::max(1.0, hi);
    lo = hi;
    hi = lo + step;
    while (curve.value(hi) >= floor) {
      lo = hi;
      step *= 2.0;
      hi = lo + step;
      if (!std::isfinite(hi) || hi > 1e12) return std::numeric_limits<double>::infinity();
    }
  } else {
    // scan knots coarsely
    const double n = 4096.0;
    for (int i = 1; i <= 4096; ++i) {
      const double r = hi * i / n;
      if (curve.value(r) < floor) {
        hi = r;
        break;
      }
      lo = r;
    }
  }
  for (int i = 0; i < 100 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (curve.value(mid) >= floor ? lo : hi) = mid;
  }
  return hi;
}

/// Relative weighted L² residual, interior nodes, of op(W) + lin·W - nl·W^{p-1}
/// where op is the discrete operator of the selected kinetic term.
double equation_residual(const RadialField& w, int N, double q, double p, TermWeights kinetic, double lin,
                         double nl) {
  const ProblemParams pp{N, q, p, 1.0};
  const RadialField op = gradient(w, pp, 0.0, kinetic);
  const auto wt = w.grid->weights();
  double res = 0.0, a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    const double u = w.values[i];
    const double nonlin = nl * std::pow(std::abs(u), p - 2.0) * u;
    const double r = op.values[i] + lin * u - nonlin;
    res += wt[i] * r * r;
    a += wt[i] * op.values[i] * op.values[i];
    b += wt[i] * lin * lin * u * u;
    c += wt[i] * nonlin * nonlin;
  }
  const double scale = std::sqrt(a) + std::sqrt(b) + std::sqrt(c);
  return scale > 0.0 ? std::sqrt(res) / scale : 0.0;
}

}  // namespace

ProfileCurve::ProfileCurve(std::vector<double> r, std::vector<double> value, std::vector<double> slope,
                           Tail tail, double tail_rate, int N, double cutoff)
    : r_(std::move(r)), v_(std::move(value)), s_(std::move(slope)), tail_(tail), rate_(tail_rate), N_(N),
      cutoff_(cutoff) {}

double ProfileCurve::value(double r) const {
  if (r_.empty() || r < 0.0) return 0.0;
  if (r >= cutoff_ && tail_ != Tail::PowerLaw) return 0.0;
  const double r1 = r_.back();
  if (r > r1) {
    const double v1 = v_.back();
    switch (tail_) {
      case Tail::Exponential:
        return v1 * std::pow(r1 / r, 0.5 * (N_ - 1)) * std::exp(-rate_ * (r - r1));
      case Tail::PowerLaw:
        return v1 * std::pow(r1 / r, rate_);
      case Tail::Zero:
        return 0.0;
    }
  }
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t k = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
  if (k + 1 >= r_.size()) return v_.back();
  const double h = r_[k + 1] - r_[k];
  const double t = (r - r_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * v_[k] + (t3 - 2 * t2 + t) * h * s_[k] + (-2 * t3 + 3 * t2) * v_[k + 1] +
         (t3 - t2) * h * s_[k + 1];
}

double ProfileCurve::slope(double r) const {
  if (r_.empty() || r < 0.0) return 0.0;
  if (r >= cutoff_ && tail_ != Tail::PowerLaw) return 0.0;
  const double r1 = r_.back();
  if (r > r1) {
    const double v = value(r);
    switch (tail_) {
      case Tail::Exponential:
        return v * (-rate_ - 0.5 * (N_ - 1) / r);
      case Tail::PowerLaw:
        return -rate_ * v / r;
      case Tail::Zero:
        return 0.0;
    }
  }
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t k = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
  if (k + 1 >= r_.size()) return s_.back();
  const double h = r_[k + 1] - r_[k];
  const double t = (r - r_[k]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * v_[k] + (-6 * t2 + 6 * t) * v_[k + 1]) / h + (3 * t2 - 4 * t + 1) * s_[k] +
         (3 * t2 - 2 * t) * s_[k + 1];
}

namespace {
double spatial_factor(const ExtremalProfile& e) {
  return e.kind == ExtremalKind::QLaplacianWpq ? std::pow(e.gamma, (2.0 - e.q) / e.q) : 1.0;
}
}  // namespace

double ExtremalProfile::value_at(double r) const {
  const double k = spatial_factor(*this);
  return gamma * curve.value(k * r);
}

double ExtremalProfile::slope_at(double r) const {
  const double k = spatial_factor(*this);
  return gamma * k * curve.slope(k * r);
}

ExtremalNorms ExtremalProfile::bundle() const {
  return ExtremalNorms{norms.mass2, norms.grad2, norms.gradq, norms.lp, converged};
}

ExtremalProfile solve_wp(int N, double p, const GridPtr& grid, double q, const ShootOptions& opt) {
  if (!grid || grid->dimension() != N) throw ParameterError("solve_wp: grid dimension does not match N");
  if (!(p > 2.0 && p < sobolev_conjugate(N, 2.0))) throw ParameterError("solve_wp needs 2 < p < 2*");
  const double delta = N * (p - 2.0) / (2.0 * p);
  const double alpha = 1.0 / delta - 1.0;
  const double beta = 2.0 / (p * delta);
  const double n1 = N - 1.0;

  RadialOde ode;
  ode.rhs = [=](double r, const State<2>& y) {
    const double w = y[0];
    return State<2>{y[1], -n1 / r * y[1] + alpha * w - beta * std::pow(std::abs(w), p - 2.0) * w};
  };
  ode.slope_of = [](double y1) { return y1; };
  ode.start = [=](double s, double r0) {
    const double f = alpha * s - beta * std::pow(s, p - 1.0);
    return State<2>{s + f * r0 * r0 / (2.0 * N), f * r0 / N};
  };
  ode.core_scale = [=](double s) {
    return std::sqrt(s / std::max(std::abs(alpha * s - beta * std::pow(s, p - 1.0)), 1e-300));
  };
  const double k = std::sqrt(alpha);
  ode.r_max = 80.0 / k + 20.0;
  ode.hmax = std::min(0.05, 0.05 / k);

  ShootResult sr = bisect_amplitude(ode, opt);
  ExtremalProfile out;
  out.kind = ExtremalKind::SemilinearWp;
  out.N = N;
  out.p = p;
  out.q = q;
  out.shoot_value = sr.s;
  out.bisection_steps = sr.steps;
  out.bracket_width = sr.width;
  out.curve = build_curve(sr.trajectory, sr.s, ProfileCurve::Tail::Exponential, k, N, opt);
  out.decay_radius = find_decay_radius(out.curve, opt.decay_floor);
  if (out.decay_radius > grid->radius())
    throw TruncationError("W_p does not decay below " + std::to_string(opt.decay_floor) + " before R = " +
                          std::to_string(grid->radius()) + " (needs R >= " + std::to_string(out.decay_radius) +
                          ")");

  out.field = RadialField::sample(grid, [&](double r) { return out.value_at(r); });
  out.slope.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) out.slope[i] = out.slope_at(grid->nodes()[i]);
  out.norms = norms(out.field, q, p);
  out.ode_residual = equation_residual(out.field, N, 2.0, p, TermWeights{1.0, 0.0, 0.0}, alpha, beta);
  out.converged = sr.width <= 1e-12;
  return out;
}

ExtremalProfile solve_wpq(int N, double p, double q, const GridPtr& grid, const ShootOptions& opt) {
  if (!grid || grid->dimension() != N) throw ParameterError("solve_wpq: grid dimension does not match N");
  if (!(q > 2.0 * N / (N + 2.0) && q < N)) throw ParameterError("solve_wpq needs 2N/(N+2) < q < N");
  if (!(p > 2.0 && p < sobolev_conjugate(N, q))) throw ParameterError("solve_wpq needs 2 < p < q*");
  const double n1 = N - 1.0;
  const double inv = 1.0 / (q - 1.0);

  RadialOde ode;
  ode.rhs = [=](double r, const State<2>& y) {
    const double v = y[0];
    const double dv = std::copysign(std::pow(std::abs(y[1]), inv), y[1]);
    return State<2>{dv, -n1 / r * y[1] + v - std::pow(std::abs(v), p - 2.0) * v};
  };
  ode.slope_of = [=](double y1) { return std::copysign(std::pow(std::abs(y1), inv), y1); };
  ode.start = [=](double s, double r0) {
    const double f = s - std::pow(s, p - 1.0);
    const double psi = f * r0 / N;
    const double dv = std::copysign(std::pow(std::abs(f / N), inv), f) * std::pow(r0, q * inv) * (q - 1.0) / q;
    return State<2>{s + dv, psi};
  };
  ode.core_scale = [=](double s) {
    const double f = std::max(std::abs(s - std::pow(s, p - 1.0)), 1e-300);
    return std::pow(s, (q - 1.0) / q) * std::pow(N / f, 1.0 / q);
  };
  ode.r_max = 400.0;
  ode.hmax = 0.02;

  ShootResult sr = bisect_amplitude(ode, opt);
  ExtremalProfile out;
  out.kind = ExtremalKind::QLaplacianWpq;
  out.N = N;
  out.p = p;
  out.q = q;
  out.shoot_value = sr.s;
  out.bisection_steps = sr.steps;
  out.bracket_width = sr.width;
  const bool compact = q > 2.0;
  out.curve = compact ? build_curve(sr.trajectory, sr.s, ProfileCurve::Tail::Zero, 0.0, N, opt)
                      : build_curve(sr.trajectory, sr.s, ProfileCurve::Tail::PowerLaw, q / (2.0 - q), N, opt);

  // Norms of V on a fine private grid give the closed-form starting point for γ.
  auto sample_w = [&](double gamma) {
    ExtremalProfile probe = out;
    probe.gamma = gamma;
    return RadialField::sample(grid, [&](double r) { return probe.value_at(r); });
  };
  const double expo = N * (2.0 - q) / q - p;  // < 0 on the admissible range
  auto mismatch = [&](double log_gamma) {
    const double g = std::exp(log_gamma);
    const FieldNorms n = norms(sample_w(g), q, p);
    return std::log(n.gradq + n.mass2) - (2.0 - p) * log_gamma;
  };
  // ζ_quad(γ) ≈ (B_V + M_V) γ^{2 - N(2-q)/q}, so the mismatch increases in log γ with slope -expo.
  const double r_probe = std::min(grid->radius(), out.curve.match_radius());
  const GridPtr fine = make_grid(N, std::max(r_probe, 1.0), 20001);
  const FieldNorms nv = norms(RadialField::sample(fine, [&](double r) { return out.curve.value(r); }), q, p);
  const double lg0 = std::log(nv.gradq + nv.mass2) / expo;
  double lo = lg0 - 1.0, hi = lg0 + 1.0;
  for (int i = 0; i < 60 && mismatch(lo) > 0.0; ++i) lo -= 1.0;
  for (int i = 0; i < 60 && mismatch(hi) < 0.0; ++i) hi += 1.0;
  if (!(mismatch(lo) <= 0.0 && mismatch(hi) >= 0.0)) throw NormalizationError("ζ fixed point not bracketed");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (mismatch(mid) < 0.0 ? lo : hi) = mid;
  }
  out.gamma = std::exp(0.5 * (lo + hi));
  out.zeta = std::pow(out.gamma, 2.0 - p);

  const double kappa = std::pow(out.gamma, (2.0 - q) / q);
  out.decay_radius = find_decay_radius(out.curve, opt.decay_floor / out.gamma) / kappa;
  if (compact && out.decay_radius > grid->radius())
    throw TruncationError("W_{p,q} support exceeds R = " + std::to_string(grid->radius()) + " (needs R >= " +
                          std::to_string(out.decay_radius) + ")");

  out.field = sample_w(out.gamma);
  out.slope.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) out.slope[i] = out.slope_at(grid->nodes()[i]);
  out.norms = norms(out.field, q, p);
  out.ode_residual = equation_residual(out.field, N, q, p, TermWeights{0.0, 1.0, 0.0}, 1.0, out.zeta);
  out.converged = sr.width <= 1e-12;
  return out;
}

GridPtr wp_grid(int N, double p) {
  const double delta = N * (p - 2.0) / (2.0 * p);
  const double k = std::sqrt(1.0 / delta - 1.0);
  const double R = std::ceil(30.0 / k + 10.0);
  return make_grid(N, R, static_cast<std::size_t>(R / 0.005) + 1);
}

GridPtr wpq_grid(int N, double p, double q) {
  (void)p;
  (void)q;
  return make_grid(N, 40.0, 8001);
}

double cutoff_bump(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double x = s - 1.0;
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

RadialField build_phi1(double tau, double c, const ExtremalProfile& wp, const GridPtr& grid) {
  if (!wp.converged) throw DependencyError("build_phi1 needs a converged W_p");
  if (!(tau >= 1.0)) throw ParameterError("build_phi1 needs tau >= 1");
  if (!(c > 0.0)) throw ParameterError("build_phi1 needs c > 0");
  const double h = grid->spacing();
  const double rc = 1.0 / std::sqrt(tau);
  if (1.0 / tau < 5.0 * h)
    throw ResolutionError("τ = " + std::to_string(tau) + " puts the profile width 1/τ below 5 grid spacings");
  if (2.0 * rc > grid->radius()) throw ResolutionError("cutoff support 2τ^{-1/2} exceeds the grid radius");
  const double wnorm = std::sqrt(wp.norms.mass2);
  const double pre = std::pow(tau * c, 0.5 * grid->dimension()) / wnorm;
  RadialField phi = RadialField::sample(grid, [&](double r) { return pre * cutoff_bump(r / rc) * wp.value_at(tau * r); });
  const double m = norms(phi, 2.0, 2.0).mass2;
  const double a = c / std::sqrt(m);
  for (double& v : phi.values) v *= a;
  return phi;
}

}  // namespace normsol
