#include <doctest.h>

#include <cmath>

#include "normsol/errors.hpp"
#include "normsol/exponents.hpp"
#include "normsol/groundstate.hpp"
#include "oracles.hpp"

using namespace normsol;

namespace {

const ExtremalProfile& wp_3_3() {
  static const ExtremalProfile w = solve_wp(3, 3.0, wp_grid(3, 3.0));
  return w;
}

const ExtremalProfile& wp_2_4() {
  static const ExtremalProfile w = solve_wp(2, 4.0, wp_grid(2, 4.0), 1.5);
  return w;
}

const ExtremalProfile& wpq_3() {
  static const ExtremalProfile w = solve_wpq(3, 5.0, 2.5, wpq_grid(3, 5.0, 2.5));
  return w;
}

void check_profile_shape(const ExtremalProfile& w) {
  const auto& v = w.field.values;
  CHECK(v[0] > 0.0);
  bool ok = true;
  for (std::size_t i = 1; i < v.size() && v[i] > 0.0; ++i) ok = ok && v[i] < v[i - 1];
  CHECK(ok);
  for (double x : v) CHECK(x >= 0.0);
}

}  // namespace

TEST_CASE("W_p identities") {
  for (const ExtremalProfile* w : {&wp_3_3(), &wp_2_4()}) {
    CHECK(w->converged);
    const FieldNorms& n = w->norms;
    CHECK(n.grad2 == doctest::Approx(n.mass2).epsilon(0.01));
    CHECK(n.mass2 == doctest::Approx(2.0 / w->p * n.lp).epsilon(0.01));
    CHECK(w->ode_residual <= 1e-4);
    check_profile_shape(*w);
  }
}

TEST_CASE("Townes mass against the RK4 shooting oracle") {
  double coarse = 0.0;
  const double fine = oracle::townes_mass(&coarse);
  CHECK(std::abs(fine - coarse) < 1e-4 * fine);
  CHECK(wp_2_4().norms.mass2 == doctest::Approx(fine).epsilon(1e-4));
  CHECK(wp_2_4().norms.mass2 == doctest::Approx(11.70).epsilon(0.01));
}

TEST_CASE("N=3, p=3 extremal against the oracle") {
  // δ_p = 1/2: α = 1, β = 4/3
  const oracle::ShootNorms o = oracle::shoot_ground_state(3, 3.0, 1.0, 4.0 / 3.0, 1e-3);
  CHECK(wp_3_3().shoot_value == doctest::Approx(o.s).epsilon(1e-5));
  CHECK(wp_3_3().norms.mass2 == doctest::Approx(o.mass2).epsilon(1e-3));
}

TEST_CASE("shooting is insensitive to the integrator tolerance") {
  ShootOptions opt;
  opt.rtol = 0.5e-11;
  const ExtremalProfile w = solve_wp(3, 3.0, wp_grid(3, 3.0), 2.0, opt);
  CHECK(w.shoot_value == doctest::Approx(wp_3_3().shoot_value).epsilon(1e-3));
}

TEST_CASE("exponential tail of W_p") {
  const ExtremalProfile& w = wp_3_3();
  const double alpha = 1.0;
  // last resolved decade before the decay floor, with the r^{-(N-1)/2} factor removed
  const double r1 = w.curve.match_radius() * 0.6, r2 = w.curve.match_radius() * 0.9;
  auto g = [&](double r) { return std::log(w.value_at(r)) + std::log(r); };
  const double slope = (g(r2) - g(r1)) / (r2 - r1);
  CHECK(slope <= -std::sqrt(alpha) * 0.95);
  CHECK(slope >= -std::sqrt(alpha) * 1.05);
}

TEST_CASE("GN equality on W_p") {
  for (const ExtremalProfile* w : {&wp_3_3(), &wp_2_4()}) {
    const double dp = derive_exponents_unchecked(w->N, 2.0, w->p).delta_p;
    const double C = gn_constant_2(w->N, w->p, w->bundle());
    const FieldNorms& n = w->norms;
    const double ratio = std::pow(n.lp, 1.0 / w->p) /
                         (C * std::pow(n.grad2, 0.5 * dp) * std::pow(n.mass2, 0.5 * (1.0 - dp)));
    CHECK(ratio >= 0.995);
    CHECK(ratio <= 1.0 + 1e-4);
  }
}

TEST_CASE("W_{p,q} residual, multiplier and GN equality") {
  const ExtremalProfile& w = wpq_3();
  CHECK(w.converged);
  CHECK(w.kind == ExtremalKind::QLaplacianWpq);
  CHECK(w.ode_residual <= 1e-3);
  CHECK(w.zeta == doctest::Approx(std::pow(w.gamma, 2.0 - w.p)).epsilon(1e-12));
  CHECK(w.zeta == doctest::Approx(w.norms.gradq + w.norms.mass2).epsilon(1e-6));
  check_profile_shape(w);
  const double nu = derive_exponents_unchecked(3, 2.5, 5.0).nu_pq;
  const double K = gn_constant_q(3, 5.0, 2.5, w.bundle());
  const FieldNorms& n = w.norms;
  const double ratio = std::pow(n.lp, 0.2) / (K * std::pow(n.gradq, nu / 2.5) * std::pow(n.mass2, 0.5 * (1.0 - nu)));
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("W_{p,q} for q < 2") {
  const ExtremalProfile w = solve_wpq(2, 3.0, 1.5, wpq_grid(2, 3.0, 1.5));
  CHECK(w.converged);
  CHECK(w.ode_residual <= 1e-3);
  CHECK(w.zeta == doctest::Approx(w.norms.gradq + w.norms.mass2).epsilon(1e-6));
}

TEST_CASE("shooting errors") {
  CHECK_THROWS_AS(solve_wp(3, 6.5, wp_grid(3, 3.0)), ParameterError);
  CHECK_THROWS_AS(solve_wp(3, 3.0, make_grid(3, 4.0, 800)), TruncationError);
  ShootOptions narrow;
  narrow.s_min = 10.0;
  narrow.s_max = 20.0;
  CHECK_THROWS_AS(solve_wp(3, 3.0, wp_grid(3, 3.0), 2.0, narrow), ShootingError);
  CHECK_THROWS_AS(solve_wpq(3, 20.0, 2.5, wpq_grid(3, 5.0, 2.5)), ParameterError);
}

TEST_CASE("cutoff bump") {
  CHECK(cutoff_bump(0.5) == 1.0);
  CHECK(cutoff_bump(2.5) == 0.0);
  CHECK(cutoff_bump(1.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double s = 1.0; s <= 2.0; s += 0.01) {
    CHECK(cutoff_bump(s) <= prev);
    prev = cutoff_bump(s);
  }
}

TEST_CASE("phi_1 normalisation and norm asymptotics") {
  const ExtremalProfile& w = wp_2_4();
  const GridPtr g = make_grid(2, 40.0, 160001);
  const double c = 3.0, q = 1.5;
  const double dq = derive_exponents_unchecked(2, q, 4.0).delta_q;
  for (double tau : {1.0, 4.0, 16.0}) {
    const RadialField phi = build_phi1(tau, c, w, g);
    const FieldNorms n = norms(phi, q, 4.0);
    CHECK(n.mass2 == doctest::Approx(c * c).epsilon(1e-10));
    if (tau == 16.0) {
      CHECK(n.grad2 / (tau * tau) == doctest::Approx(c * c * w.norms.grad2 / w.norms.mass2).epsilon(0.05));
      const double bound = std::pow(tau, q * (1 + dq)) * std::pow(c, q) * w.norms.gradq / std::pow(w.norms.mass2, q / 2);
      CHECK(n.gradq <= 1.05 * bound);
    }
  }
  CHECK_THROWS_AS(build_phi1(1e6, c, w, make_grid(2, 40.0, 2000)), ResolutionError);
}
