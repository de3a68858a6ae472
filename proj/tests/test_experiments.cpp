#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "normsol/errors.hpp"
#include "normsol/experiments.hpp"

using namespace normsol;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("normsol_exp_" + name)).string();
}

std::vector<SweepRecord> synthetic(double a, double b, std::size_t n) {
  std::vector<SweepRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    SweepRecord r;
    r.c = 0.3 * std::pow(1.0 / 0.3, i / double(n - 1));
    r.level = -2.0 * std::pow(r.c, a);
    r.lambda = -0.5 * std::pow(r.c, b);
    r.converged = true;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("power-law fits recover synthetic exponents") {
  const auto recs = synthetic(6.0, 4.0, 8);
  const PowerLawFit m = fit_power_law(recs, SweepQuantity::Level, 6.0);
  CHECK_FALSE(m.skipped);
  CHECK(m.exponent == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(m.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.rel_err < 1e-12);
  CHECK(m.points == 8);
  CHECK(fit_power_law(recs, SweepQuantity::Lambda, 4.0).exponent == doctest::Approx(4.0).epsilon(1e-12));
  const PowerLawFit few = fit_power_law(synthetic(6.0, 4.0, 3), SweepQuantity::Level, 6.0);
  CHECK(few.skipped);
  CHECK_FALSE(few.note.empty());
  auto same = synthetic(6.0, 4.0, 5);
  for (auto& r : same) r.c = 0.5;
  CHECK_THROWS_AS(fit_power_law(same, SweepQuantity::Level, 6.0), ParameterError);
}

TEST_CASE("sweep CSV round trip is bit-exact") {
  auto recs = synthetic(6.0, 4.0, 6);
  recs[2].converged = false;
  recs[3].grad2 = 1.0 / 3.0;
  const std::string path = tmp_path("sweep.csv");
  write_sweep_csv(path, recs);
  const auto back = read_sweep_csv(path);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].c == recs[i].c);
    CHECK(back[i].level == recs[i].level);
    CHECK(back[i].lambda == recs[i].lambda);
    CHECK(back[i].grad2 == recs[i].grad2);
    CHECK(back[i].converged == recs[i].converged);
  }
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == sweep_csv_header());
  CHECK_THROWS_AS(read_sweep_csv(tmp_path("missing.csv")), IoError);
}

TEST_CASE("subcritical sweep is deterministic across thread counts") {
  const ProblemParams base{3, 2.5, 3, 1};
  const std::vector<double> cs{0.5, 0.7, 1.0};
  SweepOptions one;
  one.threads = 1;
  SweepOptions many;
  many.threads = 3;
  const SweepResult a = run_sweep(base, cs, one);
  const SweepResult b = run_sweep(base, cs, many);
  REQUIRE(a.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.records[i].level == b.records[i].level);
    CHECK(a.records[i].lambda == b.records[i].lambda);
    CHECK(a.records[i].converged);
  }
  CHECK(a.level_trend_ok);
  CHECK(a.lambda_trend_ok);
  CHECK(a.level_fit.has_value());
  CHECK(a.level_fit->skipped);
  const nlohmann::json j = nlohmann::json::parse(sweep_json(base, a));
  CHECK(j.at("records").size() == 3);
}

TEST_CASE("reduced energy agrees with I on the Pohozaev set") {
  const ProblemParams pp{3, 2.5, 5, 1};
  const GridPtr g = make_grid(3, 20.0, 4000);
  const RadialField u0 = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  const FiberCoeffs k = fiber_coeffs(u0, pp);
  const double t0 = find_t0(k, pp);
  // rescale the norms to the fiber maximiser exactly instead of resampling
  FieldNorms n = norms(u0, pp.q, pp.p);
  n.grad2 *= t0 * t0;
  n.gradq *= std::pow(t0, k.e2);
  n.lp *= std::pow(t0, k.e3);
  const EnergyBreakdown b = evaluate(n, pp);
  CHECK(std::abs(b.pohozaev) < 1e-10 * (n.grad2 + n.gradq));
  CHECK(reduced_energy(n, pp) == doctest::Approx(b.total).epsilon(1e-10));
  CHECK(supercritical_grad_bound(pp, 1.0) > 0.0);
}

TEST_CASE("fiber table covers both sides of the maximiser") {
  const ProblemParams pp{3, 2.5, 5, 1};
  const FiberCoeffs k = fiber_coeffs(1.0, 1.0, 1.0, pp);
  const FiberTable t = fiber_table(k, pp, 50);
  REQUIRE(t.t0.has_value());
  REQUIRE(t.rows.size() == 50);
  CHECK(t.rows.front().t < *t.t0);
  CHECK(t.rows.back().t > *t.t0);
  CHECK(t.rows.front().hprime > 0.0);
  CHECK(t.rows.back().hprime < 0.0);
  const FiberTable s = fiber_table(fiber_coeffs(1.0, 1.0, 1.0, {3, 2.5, 3, 1}), {3, 2.5, 3, 1}, 10);
  CHECK_FALSE(s.t0.has_value());
  CHECK_THROWS_AS(fiber_table(k, pp, 1), ParameterError);
  const std::string path = tmp_path("fiber.csv");
  write_fiber_csv(path, t);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,h,hprime");
}

TEST_CASE("config file parsing") {
  const std::string path = tmp_path("run.cfg");
  {
    std::ofstream out(path);
    out << "# comment\n n = 3\nq=2.5   # trailing\n\np=5\n";
  }
  const auto m = read_config_file(path);
  CHECK(m.size() == 3);
  CHECK(m.at("n") == "3");
  CHECK(m.at("q") == "2.5");
  CHECK(m.at("p") == "5");
  CHECK_THROWS_AS(read_config_file(tmp_path("nope.cfg")), IoError);
}

TEST_CASE("regime JSON") {
  const ProblemParams pp{3, 2.5, 3, 1};
  const nlohmann::json j = nlohmann::json::parse(regime_json(pp, classify_regime(pp)));
  CHECK(j.at("regime") == "Subcritical");
}

TEST_CASE("critical scan reports the open gap without a verdict") {
  const ProblemParams pp{3, 2.5, 25.0 / 6.0, 1};
  CriticalOptions opt;
  opt.probe_m = 20001;
  opt.probe_iters = 5;
  opt.theta_points = 41;
  const CriticalReport probe = run_critical(pp, {1.0}, opt);
  REQUIRE(probe.masses.c_2star.has_value());
  REQUIRE(probe.masses.chat_2star.has_value());
  const double mid = 0.5 * (*probe.masses.c_2star + *probe.masses.chat_2star);
  const CriticalReport rep = run_critical(pp, {mid}, opt);
  CHECK(rep.verdicts.at(0).verdict == "open gap");
  const nlohmann::json j = nlohmann::json::parse(critical_json(pp, rep));
  CHECK(j.contains("verdicts"));
  CHECK_THROWS_AS(run_critical({3, 2.5, 3, 1}, {1.0}, opt), RegimeError);
}
