// normsol: command-line driver for the radial (2,q)-Laplacian solver.
//
//   normsol regime   --n 3 --q 2.5 --p 3
//   normsol solve    --n 3 --q 2.5 --p 3 --c 1 --out-dir run
//   normsol sweep    --n 3 --q 2.5 --p 3 --c-list log:0.3:1:8
//   normsol critical --n 2 --q 1.5 --p 4
//   normsol fiber    --n 3 --q 2.5 --p 5 --coeffs 1,1,1

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "normsol/energy.hpp"
#include "normsol/errors.hpp"
#include "normsol/experiments.hpp"
#include "normsol/groundstate.hpp"
#include "normsol/solver.hpp"

namespace fs = std::filesystem;
using namespace normsol;

namespace {

constexpr int kOk = 0;
constexpr int kParam = 2;
constexpr int kNoConv = 3;
constexpr int kIo = 4;

struct Options {
  int n = 3;
  double q = 2.5;
  double p = 3.0;
  double c = 1.0;
  std::string r_max = "auto";
  std::size_t grid_m = 2000;
  double tol = 1e-6;
  int max_iters = 4000;
  std::string init = "gaussian";
  std::string out_dir = "out";
  std::string c_list;
  double theta_max = 8.0;
  double floor = -1.0;
  double tau = 16.0;
  std::string coeffs;
  std::string field;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "spatial dimension N")->capture_default_str();
  cmd->add_option("--q", o.q, "quasilinear exponent q")->capture_default_str();
  cmd->add_option("--p", o.p, "nonlinearity exponent p")->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
}

void add_solver(CLI::App* cmd, Options& o) {
  cmd->add_option("--c", o.c, "mass c = |u|_2")->capture_default_str();
  cmd->add_option("--r-max", o.r_max, "grid radius, or 'auto'")->capture_default_str();
  cmd->add_option("--grid-m", o.grid_m, "grid nodes")->capture_default_str();
  cmd->add_option("--tol", o.tol, "relative tangential gradient tolerance")->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "descent iteration cap")->capture_default_str();
  cmd->add_option("--init", o.init, "gaussian[:width] | wp | file:<path>")->capture_default_str();
}

/// "0.3,0.5,1" or "log:a:b:n" or "lin:a:b:n".
std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (s.rfind("log:", 0) == 0 || s.rfind("lin:", 0) == 0) {
    std::istringstream is(s.substr(4));
    double a, b;
    int n;
    char c1, c2;
    if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 || !(a > 0.0 && b > 0.0))
      throw ParameterError("bad range '" + s + "', expected log:a:b:n");
    const bool lg = s[1] == 'o';
    for (int i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / (n - 1);
      out.push_back(lg ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
    return out;
  }
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
      throw ParameterError("bad number '" + tok + "' in list");
    }
  }
  return out;
}

InitSpec parse_init(const std::string& s) {
  InitSpec init;
  if (s == "wp") {
    init.kind = InitSpec::Kind::WpSeed;
  } else if (s.rfind("file:", 0) == 0) {
    init.kind = InitSpec::Kind::FromFile;
    init.path = s.substr(5);
  } else if (s.rfind("gaussian", 0) == 0) {
    if (s.size() > 9 && s[8] == ':') {
      try {
        init.width = std::stod(s.substr(9));
      } catch (const std::logic_error&) {
        throw ParameterError("bad Gaussian width in --init '" + s + "'");
      }
      if (!(init.width > 0.0)) throw ParameterError("Gaussian width must be positive");
    } else if (s != "gaussian") throw ParameterError("bad --init '" + s + "'");
  } else {
    throw ParameterError("bad --init '" + s + "'");
  }
  return init;
}

double parse_radius(const std::string& s) {
  if (s == "auto") return 0.0;
  try {
    const double r = std::stod(s);
    if (!(r > 0.0)) throw ParameterError("--r-max must be positive");
    return r;
  } catch (const std::logic_error&) {
    throw ParameterError("bad --r-max '" + s + "'");
  }
}

SolveConfig solve_config(const Options& o) {
  SolveConfig cfg;
  cfg.tol_grad = o.tol;
  cfg.max_iters = o.max_iters;
  cfg.init = parse_init(o.init);
  return cfg;
}

void ensure_dir(const std::string& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw IoError("cannot create " + d + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f || !(f << text)) throw IoError("cannot write " + path);
}

ProblemParams params_of(const Options& o) { return ProblemParams{o.n, o.q, o.p, o.c}; }

int cmd_regime(const Options& o) {
  ProblemParams pp = params_of(o);
  validate(pp);
  const RegimeReport rr = classify_regime(pp);
  const DerivedExponents e = derive_exponents(pp);
  std::cout << "regime: " << to_string(rr.regime) << '\n';
  std::cout << "conditions:";
  for (const auto& s : rr.satisfied_conditions) std::cout << ' ' << s;
  std::cout << "\ndelta_p = " << e.delta_p << "  delta_q = " << e.delta_q << "  nu_pq = " << e.nu_pq
            << "\npbar = " << e.pbar << "  phat = " << e.phat << '\n';
  for (const auto& [k, v] : rr.predicted_exponents) std::cout << k << " = " << v << '\n';
  if (rr.regime == Regime::L2Critical) std::cout << "threshold: c_* = |W_pbar|_2 (run `critical`)\n";
  if (rr.regime == Regime::LqCritical) std::cout << "thresholds: c_** < chat_** (run `critical`)\n";
  ensure_dir(o.out_dir);
  write_text(o.out_dir + "/regime.json", regime_json(pp, rr) + "\n");
  return kOk;
}

int cmd_solve(const Options& o) {
  const ProblemParams pp = params_of(o);
  validate(pp);
  const Regime reg = classify_regime(pp).regime;
  if (reg == Regime::L2Critical || reg == Regime::LqCritical)
    throw RegimeError("p is critical; use the `critical` subcommand");
  if (reg == Regime::OutsideTheory) throw RegimeError("parameters are outside the sub/supercritical regimes");
  const double r = parse_radius(o.r_max);
  const GridPtr g = sweep_grid(pp, r, o.grid_m);
  const SolveConfig cfg = solve_config(o);
  const SolveResult res = reg == Regime::Subcritical ? minimize_global(pp, g, cfg) : minimize_pohozaev(pp, g, cfg);

  ensure_dir(o.out_dir);
  write_field_csv(o.out_dir + "/profile.csv", res.u);
  write_text(o.out_dir + "/breakdown.csv", breakdown_csv_header() + "\n" + breakdown_csv_row(pp.c, res.breakdown) + "\n");
  write_history_csv(o.out_dir + "/history.csv", res.history);
  std::ostringstream s;
  s.precision(10);
  s << "regime      " << to_string(reg) << '\n'
    << "grid        R = " << g->radius() << ", M = " << g->size() << '\n'
    << (reg == Regime::Subcritical ? "m(c)        " : "sigma(c)    ") << res.level << '\n'
    << "lambda      " << res.lambda << '\n'
    << "P           " << res.breakdown.pohozaev << '\n'
    << "residual    " << res.residual << '\n'
    << "grad        " << res.grad_norm << '\n'
    << "iterations  " << res.iterations << '\n'
    << "converged   " << (res.converged ? "yes" : "no") << " (" << res.message << ")\n";
  std::cout << s.str();
  write_text(o.out_dir + "/summary.txt", s.str());
  return res.converged ? kOk : kNoConv;
}

int cmd_sweep(const Options& o) {
  const ProblemParams pp = params_of(o);
  validate(pp);
  const std::vector<double> cs = parse_list(o.c_list.empty() ? "log:0.3:1:8" : o.c_list);
  SweepOptions so;
  so.solve = solve_config(o);
  so.r_max = parse_radius(o.r_max);
  so.grid_m = o.grid_m;
  so.threads = o.threads;
  const SweepResult res = run_sweep(pp, cs, so);
  ensure_dir(o.out_dir);
  write_sweep_csv(o.out_dir + "/sweep.csv", res.records);
  const std::string js = sweep_json(pp, res);
  write_text(o.out_dir + "/sweep.json", js + "\n");
  std::cout << sweep_csv_header() << '\n';
  std::cout.precision(10);
  for (const auto& r : res.records)
    std::cout << r.c << ',' << r.level << ',' << r.lambda << ',' << r.grad2 << ',' << r.gradq << ',' << r.lp << ','
              << r.converged << '\n';
  auto show = [](const char* name, const std::optional<PowerLawFit>& f) {
    if (!f) return;
    if (f->skipped)
      std::cout << name << ": " << f->note << '\n';
    else
      std::cout << name << ": exponent " << f->exponent << " (predicted " << f->predicted << ", rel err "
                << f->rel_err << ", r2 " << f->r2 << ")\n";
  };
  show("m(c) fit", res.level_fit);
  show("lambda fit", res.lambda_fit);
  if (res.super) {
    std::cout << "sigma strictly decreasing: " << (res.super->sigma_decreasing ? "yes" : "no") << '\n'
              << "lambda falls as c decreases: " << (res.super->lambda_decreasing_trend ? "yes" : "no") << '\n'
              << "lambda bound constant K: " << res.super->lambda_bound_K << '\n';
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

int cmd_critical(const Options& o) {
  ProblemParams pp = params_of(o);
  pp.c = 1.0;
  validate(pp);
  const Regime reg = classify_regime(pp).regime;
  if (reg != Regime::L2Critical && reg != Regime::LqCritical)
    throw RegimeError("`critical` needs p = pbar or p = phat, got " + to_string(reg));
  CriticalOptions co;
  co.tau = o.tau;
  co.theta_max = o.theta_max;
  co.floor = o.floor;
  std::vector<double> cs;
  if (!o.c_list.empty()) {
    cs = parse_list(o.c_list);
  } else {
    // straddle the thresholds
    const CriticalReport pre = run_critical(pp, {}, co);
    if (pre.masses.c_star) cs = {0.5 * *pre.masses.c_star, 0.9 * *pre.masses.c_star, 1.1 * *pre.masses.c_star,
                                 1.5 * *pre.masses.c_star};
    if (pre.masses.c_2star && pre.masses.chat_2star) {
      const double a = *pre.masses.c_2star, b = *pre.masses.chat_2star;
      cs = {0.5 * a, 0.9 * a, 0.5 * (a + b), 1.1 * b, 1.5 * b};
    }
  }
  const CriticalReport rep = run_critical(pp, cs, co);
  std::cout.precision(10);
  std::cout << "regime: " << to_string(rep.regime) << '\n';
  if (rep.masses.c_star) std::cout << "c_*    = " << *rep.masses.c_star << '\n';
  if (rep.masses.c_2star) std::cout << "c_**   = " << *rep.masses.c_2star << '\n';
  if (rep.masses.chat_2star) std::cout << "chat_** = " << *rep.masses.chat_2star << '\n';
  for (const auto& v : rep.verdicts)
    std::cout << "c = " << v.c << ": " << v.verdict << " (fiber min " << v.blowdown_min << ", probe " << v.probe_start
              << " -> " << v.probe_end << ")\n";
  ensure_dir(o.out_dir);
  write_text(o.out_dir + "/critical.json", critical_json(pp, rep) + "\n");
  return kOk;
}

int cmd_fiber(const Options& o) {
  const ProblemParams pp = params_of(o);
  validate(pp);
  FiberCoeffs k;
  if (!o.coeffs.empty()) {
    const auto v = parse_list(o.coeffs);
    if (v.size() != 3) throw ParameterError("--coeffs needs A,B,C");
    k = fiber_coeffs(v[0], v[1], v[2], pp);
  } else if (!o.field.empty()) {
    k = fiber_coeffs(read_field_csv(o.field, pp.N), pp);
  } else {
    throw ParameterError("fiber needs --coeffs A,B,C or --field <csv>");
  }
  const FiberTable tab = fiber_table(k, pp);
  ensure_dir(o.out_dir);
  write_fiber_csv(o.out_dir + "/fiber.csv", tab);
  std::cout.precision(12);
  std::cout << "A = " << k.A << "  B = " << k.B << "  C = " << k.C << "\nexponents 2, " << k.e2 << ", " << k.e3 << '\n';
  std::cout << "h(1) = " << fiber_h(1.0, k) << "  h'(1) = " << fiber_hprime(1.0, k) << '\n';
  if (tab.t0)
    std::cout << "t0 = " << *tab.t0 << '\n';
  else
    std::cout << "t0: not applicable (exponent ordering is not supercritical)\n";
  return kOk;
}

/// Applies key=value pairs from --config as defaults of the chosen subcommand.
void apply_config(CLI::App& app, int argc, char** argv) {
  std::string path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") path = argv[i + 1];
  if (path.empty()) return;
  const auto kv = read_config_file(path);
  for (const auto& [key, value] : kv) {
    bool used = false;
    for (CLI::App* sub : app.get_subcommands({})) {
      if (CLI::Option* opt = sub->get_option_no_throw("--" + key)) {
        opt->default_val(value);
        used = true;
      }
    }
    if (!used) std::cerr << "warning: unknown config key '" << key << "'\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized solutions of -Δu - Δ_q u = λu + |u|^{p-2}u on radial grids"};
  app.require_subcommand(1);
  Options o;
  std::string config;

  auto* regime = app.add_subcommand("regime", "classify (N, q, p) and print exponents");
  add_common(regime, o);
  regime->add_option("--c", o.c, "mass (only validated)");

  auto* solve = app.add_subcommand("solve", "ground state at one mass");
  add_common(solve, o);
  add_solver(solve, o);

  auto* sweep = app.add_subcommand("sweep", "ground states over a mass list, with fits");
  add_common(sweep, o);
  add_solver(sweep, o);
  sweep->add_option("--c-list", o.c_list, "masses: a,b,c or log:a:b:n");
  sweep->add_option("--threads", o.threads, "worker threads (0 = all cores)");

  auto* critical = app.add_subcommand("critical", "threshold masses and blow-down verdicts at p = pbar, phat");
  add_common(critical, o);
  critical->add_option("--c-list", o.c_list, "masses to probe (default straddles the thresholds)");
  critical->add_option("--theta-max", o.theta_max, "dilation range [-theta, theta]")->capture_default_str();
  critical->add_option("--floor", o.floor, "energy floor certifying descent to -inf")->capture_default_str();
  critical->add_option("--tau", o.tau, "concentration of the test function")->capture_default_str();

  auto* fiber = app.add_subcommand("fiber", "tabulate h(t) for given coefficients or a field");
  add_common(fiber, o);
  fiber->add_option("--coeffs", o.coeffs, "A,B,C");
  fiber->add_option("--field", o.field, "profile CSV (r,u)");

  for (CLI::App* sub : {regime, solve, sweep, critical, fiber})
    sub->add_option("--config", config, "key=value file; flags override it");

  try {
    apply_config(app, argc, argv);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParam;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }

  try {
    if (*regime) return cmd_regime(o);
    if (*solve) return cmd_solve(o);
    if (*sweep) return cmd_sweep(o);
    if (*critical) return cmd_critical(o);
    if (*fiber) return cmd_fiber(o);
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kParam;
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return kParam;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kNoConv;
  }
  return kOk;
}
