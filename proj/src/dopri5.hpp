#pragma once

// Dormand-Prince 5(4) for small autonomous-in-shape systems y' = f(r, y).
// Internal to the shooting solvers.

#include <algorithm>
#include <array>
#include <cmath>

namespace normsol::detail {

template <std::size_t D>
using State = std::array<double, D>;

struct Dopri5Options {
  double rtol = 1e-11;
  double atol = 1e-14;
  double h0 = 1e-4;
  double hmax = 0.05;
  long max_steps = 2'000'000;
};

/// Integrates from (r0, y0) towards r_end. After each accepted step
/// on_step(r, y, dy) is called with the derivative at the step end; it
/// returns false to stop. Returns the number of accepted steps, or -1 if the
/// step size collapsed.
template <std::size_t D, class F, class OnStep>
long integrate_dopri5(F&& f, double r0, State<D> y0, double r_end, const Dopri5Options& opt,
                      OnStep&& on_step) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  double r = r0;
  State<D> y = y0;
  State<D> k1 = f(r, y);
  double h = std::min(opt.h0, r_end - r);
  long steps = 0;
  while (r < r_end) {
    if (steps >= opt.max_steps) return -1;
    h = std::min({h, opt.hmax, r_end - r});
    if (h < 1e-14 * std::max(1.0, r)) return -1;
    State<D> t{}, k2, k3, k4, k5, k6, k7, yn;
    for (std::size_t i = 0; i < D; ++i) t[i] = y[i] + h * a21 * k1[i];
    k2 = f(r + c2 * h, t);
    for (std::size_t i = 0; i < D; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(r + c3 * h, t);
    for (std::size_t i = 0; i < D; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(r + c4 * h, t);
    for (std::size_t i = 0; i < D; ++i)
      t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(r + c5 * h, t);
    for (std::size_t i = 0; i < D; ++i)
      t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(r + h, t);
    for (std::size_t i = 0; i < D; ++i)
      yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(r + h, yn);

    double err = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    bool finite = true;
    for (double v : yn) finite = finite && std::isfinite(v);
    if (finite && err <= 1.0) {
      r += h;
      y = yn;
      k1 = k7;
      ++steps;
      if (!on_step(r, y, k1)) return steps;
      const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      const double fac = finite ? 0.9 * std::pow(err, -0.2) : 0.1;
      h *= std::clamp(fac, 0.1, 0.9);
    }
  }
  return steps;
}

}  // namespace normsol::detail
