#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "normsol/errors.hpp"
#include "normsol/radial_grid.hpp"
#include "oracles.hpp"

using namespace normsol;
constexpr double pi = std::numbers::pi;

TEST_CASE("grid construction and quadrature of constants") {
  CHECK(integrate(std::vector<double>(1001, 1.0), *make_grid(3, 1.0, 1001)) ==
        doctest::Approx(4.0 * pi / 3.0).epsilon(1e-6));
  CHECK(integrate(std::vector<double>(512, 1.0), *make_grid(2, 2.0, 512)) == doctest::Approx(4.0 * pi).epsilon(1e-5));
  CHECK(integrate(std::vector<double>(1001, 0.0), *make_grid(3, 1.0, 1001)) == 0.0);
  const GridPtr g = make_grid(4, 3.0, 100);
  CHECK(g->nodes().front() == 0.0);
  CHECK(g->nodes().back() == doctest::Approx(3.0).epsilon(1e-15));
  for (double w : g->weights()) CHECK(w >= 0.0);
  CHECK(g->sphere_area() == doctest::Approx(2.0 * pi * pi));
}

TEST_CASE("grid parameter errors") {
  CHECK_THROWS_AS(make_grid(1, 1.0, 100), ParameterError);
  CHECK_THROWS_AS(make_grid(3, 0.0, 100), ParameterError);
  CHECK_THROWS_AS(make_grid(3, 1.0, 63), ParameterError);
  CHECK_THROWS_AS(integrate(std::vector<double>(10, 1.0), *make_grid(3, 1.0, 100)), ParameterError);
  CHECK_THROWS_AS(RadialField(make_grid(3, 1.0, 100), std::vector<double>(99)), ParameterError);
}

TEST_CASE("Gaussian integral") {
  const GridPtr g = make_grid(3, 20.0, 2000);
  const RadialField f = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  CHECK(integrate(f.values, *g) == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-6));
}

TEST_CASE("quadrature error is second order") {
  auto err = [](std::size_t M) {
    const GridPtr g = make_grid(3, 1.0, M);
    const RadialField f = RadialField::sample(g, [](double r) { return 1.0 + r; });
    return std::abs(integrate(f.values, *g) - 4.0 * pi * (1.0 / 3.0 + 1.0 / 4.0));
  };
  const double ratio = err(201) / err(401);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("radial derivative") {
  const GridPtr g = make_grid(3, 8.0, 801);
  const RadialField c = RadialField::sample(g, [](double) { return 2.5; });
  for (double d : radial_derivative(c).values) CHECK(d == doctest::Approx(0.0).epsilon(1e-12));
  const RadialField q = RadialField::sample(g, [](double r) { return r * r; });
  const RadialField dq = radial_derivative(q);
  for (std::size_t i = 1; i < g->size(); ++i) CHECK(dq.values[i] == doctest::Approx(2.0 * g->nodes()[i]).epsilon(1e-9));
  CHECK(dq.values[0] == 0.0);
  const RadialField e = RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
  const RadialField de = radial_derivative(e);
  const double h = g->spacing();
  double worst = 0.0;
  for (std::size_t i = 0; g->nodes()[i] <= 4.0; ++i) {
    const double r = g->nodes()[i];
    worst = std::max(worst, std::abs(de.values[i] + r * std::exp(-0.5 * r * r)));
  }
  CHECK(worst < h * h);
}

TEST_CASE("norms of a unit-mass Gaussian") {
  const GridPtr g = make_grid(3, 20.0, 4000);
  const double a = std::pow(pi, -0.75);
  const RadialField u = RadialField::sample(g, [a](double r) { return a * std::exp(-0.5 * r * r); });
  const FieldNorms n = norms(u, 2.5, 3.0);
  CHECK(n.mass2 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(n.grad2 == doctest::Approx(1.5).epsilon(1e-5));
  // refinement oracle on the analytic derivative
  const double gq = oracle::radial_integral(
      3, [a](double r) { return std::pow(a * r * std::exp(-0.5 * r * r), 2.5); }, 20.0, 100000);
  const double lp = oracle::radial_integral(3, [a](double r) { return std::pow(a * std::exp(-0.5 * r * r), 3.0); },
                                            20.0, 100000);
  CHECK(n.gradq == doctest::Approx(gq).epsilon(1e-4));
  CHECK(n.lp == doctest::Approx(lp).epsilon(1e-6));
  const FieldNorms z = norms(RadialField::sample(g, [](double) { return 0.0; }), 2.5, 3.0);
  CHECK(z.mass2 == 0.0);
  CHECK(z.grad2 == 0.0);
  CHECK(z.gradq == 0.0);
  CHECK(z.lp == 0.0);
}

TEST_CASE("dilation resampling obeys the scaling laws") {
  const int N = 3;
  const double q = 2.5, p = 3.0;
  const double dq = N * (q - 2) / (2 * q), dp = N * (p - 2) / (2 * p);
  const GridPtr g = make_grid(N, 30.0, 6000);
  // smooth, compactly supported bump on [0, 6]
  const RadialField u = RadialField::sample(g, [](double r) { return r < 6 ? std::pow(1 - r * r / 36, 4) : 0.0; });
  const FieldNorms n0 = norms(u, q, p);
  const RadialField same = resample_dilation(u, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(same.values[i] == doctest::Approx(u.values[i]).epsilon(1e-13));
  for (double t : {0.25, 0.5, 2.0, 4.0}) {
    const RadialField v = resample_dilation(u, t);
    const FieldNorms n = norms(v, q, p);
    CHECK(n.mass2 == doctest::Approx(n0.mass2).epsilon(1e-12));
    CHECK(n.grad2 == doctest::Approx(t * t * n0.grad2).epsilon(0.01));
    CHECK(n.gradq == doctest::Approx(std::pow(t, q * (1 + dq)) * n0.gradq).epsilon(0.01));
    CHECK(n.lp == doctest::Approx(std::pow(t, p * dp) * n0.lp).epsilon(0.01));
    for (double x : v.values) CHECK(x >= 0.0);
  }
  CHECK_THROWS_AS(resample_dilation(u, 0.0), ParameterError);
  CHECK_THROWS_AS(resample_dilation(u, std::nan("")), ParameterError);
}

TEST_CASE("field CSV round trip") {
  const GridPtr g = make_grid(2, 5.0, 101);
  const RadialField u = RadialField::sample(g, [](double r) { return std::exp(-r) / 3.0; });
  const auto path = (std::filesystem::temp_directory_path() / "normsol_field_test.csv").string();
  write_field_csv(path, u);
  const RadialField v = read_field_csv(path, 2);
  REQUIRE(v.size() == u.size());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(v.values[i] == u.values[i]);
  CHECK(v.grid->radius() == doctest::Approx(5.0).epsilon(1e-15));
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_field_csv("/nonexistent/field.csv", 2), IoError);
}
