#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "normsol/energy.hpp"
#include "normsol/errors.hpp"

using namespace normsol;

namespace {

/// Smooth random radial field: sum of three Gaussians with random centres and widths.
RadialField random_field(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double a[3], c[3], s[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = 0.2 + U(rng);
    c[k] = 3.0 * U(rng);
    s[k] = 0.5 + 1.5 * U(rng);
  }
  return RadialField::sample(g, [&](double r) {
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += a[k] * std::exp(-std::pow((r - c[k]) / s[k], 2));
    return v;
  });
}

double fd_check(const RadialField& u, const RadialField& phi, const ProblemParams& pp, double eps) {
  const double s = 1e-5;
  RadialField up = u, um = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up.values[i] += s * phi.values[i];
    um.values[i] -= s * phi.values[i];
  }
  const double fd = (discrete_energy(up, pp, eps) - discrete_energy(um, pp, eps)) / (2 * s);
  const RadialField g = gradient(u, pp, eps);
  double an = 0.0;
  const auto w = u.grid->weights();
  for (std::size_t i = 0; i < u.size(); ++i) an += w[i] * g.values[i] * phi.values[i];
  return std::abs(fd - an) / std::max(std::abs(an), 1e-12);
}

}  // namespace

TEST_CASE("energy breakdown of a unit-mass Gaussian") {
  const GridPtr g = make_grid(3, 20.0, 4000);
  const double a = std::pow(std::numbers::pi, -0.75);
  const RadialField u = RadialField::sample(g, [a](double r) { return a * std::exp(-0.5 * r * r); });
  const ProblemParams pp{3, 2.5, 3, 1};
  const EnergyBreakdown b = evaluate(u, pp);
  CHECK(b.kin2 == doctest::Approx(0.75).epsilon(1e-4));
  CHECK(b.total == doctest::Approx(b.kin2 + b.kinq - b.pot).epsilon(1e-15));
  const FieldNorms n = norms(u, 2.5, 3.0);
  CHECK(b.pohozaev == doctest::Approx(n.grad2 + 1.3 * n.gradq - 0.5 * n.lp).epsilon(1e-14));
  CHECK(b.lambda_general == doctest::Approx((n.grad2 + n.gradq - n.lp) / n.mass2).epsilon(1e-14));
  // tiny amplitudes: quadratic scaling, potential negligible
  RadialField small = u;
  for (double& x : small.values) x *= 1e-4;
  const EnergyBreakdown bs = evaluate(small, pp);
  CHECK(bs.kin2 == doctest::Approx(1e-8 * b.kin2).epsilon(1e-12));
  CHECK(bs.total > 0.0);
  CHECK(bs.pot < 1e-3 * bs.total);
}

TEST_CASE("breakdown CSV row") {
  CHECK(breakdown_csv_header() == "c,I,kin2,kinq,pot,P,lambda_general,lambda_pohozaev");
  EnergyBreakdown b;
  b.total = 0.1;
  const std::string row = breakdown_csv_row(1.0, b);
  CHECK(std::count(row.begin(), row.end(), ',') == 7);
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(11);
  const GridPtr g = make_grid(3, 10.0, 400);
  for (double q : {1.8, 2.5}) {
    for (double p : {2.5, 5.0}) {
      const ProblemParams pp{3, q, p, 1};
      for (int k = 0; k < 5; ++k) {
        const RadialField u = random_field(g, rng);
        const RadialField phi = random_field(g, rng);
        CHECK(fd_check(u, phi, pp, 0.0) < 1e-6);
        CHECK(fd_check(u, phi, pp, default_eps_reg(u)) < 1e-6);
      }
    }
  }
}

TEST_CASE("gradient special cases") {
  const GridPtr g = make_grid(3, 5.0, 200);
  const ProblemParams pp{3, 1.8, 4, 1};
  const RadialField c = RadialField::sample(g, [](double) { return 0.7; });
  const RadialField gq = gradient(c, pp, 1e-8, TermWeights{0, 1, 0});
  for (double x : gq.values) CHECK(x == doctest::Approx(0.0).epsilon(1e-14));
  const RadialField u = RadialField::sample(g, [](double r) { return std::exp(-r); });
  const RadialField gp = gradient(u, pp, 0.0, TermWeights{0, 0, 1});
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(gp.values[i] == doctest::Approx(-std::pow(u.values[i], 3)).epsilon(1e-12));
  CHECK(discrete_energy(u, pp, 0.0) == doctest::Approx(evaluate(u, pp).total).epsilon(1e-14));
}

TEST_CASE("fiber identities") {
  const GridPtr g = make_grid(3, 30.0, 6000);
  const RadialField u = RadialField::sample(g, [](double r) { return r < 6 ? std::pow(1 - r * r / 36, 4) : 0.0; });
  for (const ProblemParams pp : {ProblemParams{3, 2.5, 3, 1}, ProblemParams{3, 2.5, 5, 1}, ProblemParams{3, 1.8, 4, 1}}) {
    const FiberCoeffs k = fiber_coeffs(u, pp);
    const EnergyBreakdown b = evaluate(u, pp);
    CHECK(fiber_h(1.0, k) == doctest::Approx(b.total).epsilon(1e-14));
    CHECK(fiber_hprime(1.0, k) == doctest::Approx(b.pohozaev).epsilon(1e-14));
    for (double t : {0.5, 0.8, 1.25, 2.0})
      CHECK(fiber_h(t, k) == doctest::Approx(evaluate(resample_dilation(u, t), pp).total).epsilon(0.01));
    // h'' by central differences
    const double t = 1.3, d = 1e-5;
    CHECK(fiber_hsecond(t, k) == doctest::Approx((fiber_hprime(t + d, k) - fiber_hprime(t - d, k)) / (2 * d)).epsilon(1e-6));
  }
}

TEST_CASE("fiber monotonicity in the degenerate cases") {
  const ProblemParams pp{3, 2.5, 5, 1};
  const FiberCoeffs only_c = fiber_coeffs(0, 0, 1, pp);
  const FiberCoeffs no_c = fiber_coeffs(1, 1, 0, pp);
  double prev_c = fiber_h(1e-3, only_c), prev_n = fiber_h(1e-3, no_c);
  for (double t = 1e-3; t < 1e3; t *= 1.1) {
    CHECK(fiber_h(t * 1.1, only_c) < prev_c);
    CHECK(fiber_h(t * 1.1, no_c) > prev_n);
    prev_c = fiber_h(t * 1.1, only_c);
    prev_n = fiber_h(t * 1.1, no_c);
  }
  CHECK_THROWS_AS(find_t0(only_c, pp), DegenerateFiberError);
  CHECK_THROWS_AS(find_t0(no_c, pp), DegenerateFiberError);
  const ProblemParams sub{3, 2.5, 3, 1};
  CHECK_THROWS_AS(find_t0(fiber_coeffs(1, 1, 1, sub), sub), RegimeError);
}

TEST_CASE("fiber maximiser for (A,B,C) = (1,1,1)") {
  const ProblemParams pp{3, 2.5, 5, 1};
  const FiberCoeffs k = fiber_coeffs(1, 1, 1, pp);
  CHECK(k.e2 == doctest::Approx(3.25));
  CHECK(k.e3 == doctest::Approx(4.5));
  int changes = 0;
  double prev = fiber_hprime(1e-4, k);
  double best_t = 0, best_h = -INFINITY;
  for (int i = 1; i <= 200000; ++i) {
    const double t = 1e-4 * std::pow(1e8, i / 200000.0);
    const double hp = fiber_hprime(t, k);
    if ((hp > 0) != (prev > 0)) ++changes;
    prev = hp;
    if (fiber_h(t, k) > best_h) {
      best_h = fiber_h(t, k);
      best_t = t;
    }
  }
  CHECK(changes == 1);
  const double t0 = find_t0(k, pp);
  CHECK(t0 == doctest::Approx(best_t).epsilon(1e-4));
  CHECK(std::abs(fiber_hprime(t0, k)) < 1e-10);
  CHECK(fiber_hsecond(t0, k) < 0.0);
}

TEST_CASE("fiber sign dichotomy over random supercritical triples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> L(-3.0, 3.0);
  const ProblemParams pp{3, 2.5, 5, 1};
  for (int i = 0; i < 200; ++i) {
    const FiberCoeffs k = fiber_coeffs(std::pow(10, L(rng)), std::pow(10, L(rng)), std::pow(10, L(rng)), pp);
    const double t0 = find_t0(k, pp);
    const double P = fiber_hprime(1.0, k);
    CHECK(std::abs(fiber_hprime(t0, k)) <= 1e-10 * (k.A * t0 + k.B * std::pow(t0, k.e2 - 1) + k.C * std::pow(t0, k.e3 - 1)));
    CHECK(fiber_hsecond(t0, k) < 0.0);
    if (P != 0.0) CHECK(std::signbit(1.0 - t0) == std::signbit(-P));
  }
  // P = 0 gives t₀ = 1: C chosen so that h'(1) = 0
  const FiberCoeffs z = fiber_coeffs(1.0, 2.0, (1.0 + 1.3 * 2.0) / 0.9, pp);
  CHECK(find_t0(z, pp) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("subcritical fiber minimum") {
  const ProblemParams pp{3, 2.5, 3, 1};
  const FiberCoeffs k = fiber_coeffs(1, 1, 1, pp);
  const double t = find_fiber_minimum(k);
  CHECK(std::abs(fiber_hprime(t, k)) < 1e-10);
  CHECK(fiber_hsecond(t, k) > 0.0);
  CHECK(fiber_h(1e-3, k) < 0.0);
}
