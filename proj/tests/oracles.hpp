#pragma once

// Reference computations used by the tests. Deliberately independent of the
// library: fixed-step RK4, plain bisection, composite Simpson on analytic
// integrands.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double sphere_area(int N) { return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N); }

/// ∫_{ℝ^N} f(|x|) dx over r ∈ [0, R] by composite Simpson with n (even) panels.
inline double radial_integral(int N, const std::function<double(double)>& f, double R, int n = 200000) {
  const double h = R / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += wt * f(r) * std::pow(r, N - 1);
  }
  return sphere_area(N) * s * h / 3.0;
}

struct ShootNorms {
  double s = 0.0;      ///< W(0)
  double mass2 = 0.0;  ///< ‖W‖₂²
  double grad2 = 0.0;
  double lp = 0.0;
};

/// Ground state of W'' + (N-1)/r W' = αW - βW^{p-1} by RK4 with step h and
/// bisection on W(0).
inline ShootNorms shoot_ground_state(int N, double p, double alpha, double beta, double h) {
  using S = std::array<double, 2>;
  auto rhs = [&](double r, const S& y) {
    return S{y[1], -(N - 1) / r * y[1] + alpha * y[0] - beta * std::pow(std::abs(y[0]), p - 2.0) * y[0]};
  };
  // returns +1 if the trajectory crosses zero, -1 if it turns back up
  auto classify = [&](double s, ShootNorms* out) {
    const double f = alpha * s - beta * std::pow(s, p - 1.0);
    double r = h;
    S y{s + f * h * h / (2.0 * N), f * h / N};
    double m = 0, g = 0, l = 0;
    const double w = sphere_area(N);
    int verdict = -1;
    while (r < 60.0) {
      const S k1 = rhs(r, y);
      S t{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
      const S k2 = rhs(r + 0.5 * h, t);
      t = {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
      const S k3 = rhs(r + 0.5 * h, t);
      t = {y[0] + h * k3[0], y[1] + h * k3[1]};
      const S k4 = rhs(r + h, t);
      const S yn{y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                 y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
      if (out) {
        // trapezoid on [r, r+h]
        auto acc = [&](double rr, const S& yy) {
          const double wr = w * std::pow(rr, N - 1) * 0.5 * h;
          m += wr * yy[0] * yy[0];
          g += wr * yy[1] * yy[1];
          l += wr * std::pow(std::abs(yy[0]), p);
        };
        acc(r, y);
        acc(r + h, yn);
      }
      y = yn;
      r += h;
      if (y[0] < 0.0) {
        verdict = +1;
        break;
      }
      if (y[1] > 0.0) break;
      if (out && y[0] < 1e-9 * s) break;
    }
    if (out) *out = ShootNorms{s, m, g, l};
    return verdict;
  };
  double lo = 1e-3, hi = 1e3;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    (classify(mid, nullptr) > 0 ? hi : lo) = mid;
  }
  ShootNorms out;
  classify(lo, &out);
  return out;
}

/// Townes profile -ΔW + W = W³ in 2D at two resolutions; returns the finer mass.
inline double townes_mass(double* coarse = nullptr) {
  const ShootNorms a = shoot_ground_state(2, 4.0, 1.0, 1.0, 2e-3);
  const ShootNorms b = shoot_ground_state(2, 4.0, 1.0, 1.0, 1e-3);
  if (coarse) *coarse = a.mass2;
  return b.mass2;
}

}  // namespace oracle
