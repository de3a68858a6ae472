#include "normsol/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "normsol/errors.hpp"
#include "normsol/groundstate.hpp"

namespace normsol {

using nlohmann::json;

std::string sweep_csv_header() { return "c,level,lambda,grad2,gradq,lp,converged"; }

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.precision(17);
  f << sweep_csv_header() << '\n';
  for (const auto& r : records)
    f << r.c << ',' << r.level << ',' << r.lambda << ',' << r.grad2 << ',' << r.gradq << ',' << r.lp << ','
      << (r.converged ? 1 : 0) << '\n';
  if (!f) throw IoError("write failed for " + path);
}

std::vector<SweepRecord> read_sweep_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != sweep_csv_header()) throw IoError(path + ": unexpected header");
  std::vector<SweepRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw IoError(path + ": malformed row '" + line + "'");
    try {
      SweepRecord r;
      r.c = std::stod(cells[0]);
      r.level = std::stod(cells[1]);
      r.lambda = std::stod(cells[2]);
      r.grad2 = std::stod(cells[3]);
      r.gradq = std::stod(cells[4]);
      r.lp = std::stod(cells[5]);
      r.converged = cells[6] == "1";
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError(path + ": malformed number in '" + line + "'");
    }
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<SweepRecord>& records, SweepQuantity which, double predicted) {
  PowerLawFit fit;
  fit.predicted = predicted;
  std::vector<double> x, y;
  for (const auto& r : records) {
    const double v = which == SweepQuantity::Level ? r.level : r.lambda;
    if (!r.converged || !(std::abs(v) > 1e-10) || !(r.c > 0.0)) continue;
    x.push_back(std::log(r.c));
    y.push_back(std::log(std::abs(v)));
  }
  fit.points = static_cast<int>(x.size());
  if (x.size() < 4) {
    fit.note = "fit skipped: " + std::to_string(x.size()) + " usable points, need 4";
    return fit;
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-14 * n)) throw ParameterError("fit_power_law: masses are (numerically) identical");
  fit.exponent = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + fit.exponent * (x[i] - mx));
    sse += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.rel_err = predicted != 0.0 ? std::abs(fit.exponent - predicted) / std::abs(predicted) : 0.0;
  fit.skipped = false;
  return fit;
}

GridPtr sweep_grid(const ProblemParams& params, double r_max, std::size_t grid_m) {
  const double R = r_max > 0.0 ? r_max : suggest_radius(params);
  return make_grid(params.N, R, grid_m);
}

double supercritical_grad_bound(const ProblemParams& params, double gn_c) {
  const DerivedExponents e = derive_exponents(params);
  const double pd = params.p * e.delta_p;
  const double base = 1.0 / (e.delta_p * std::pow(gn_c, params.p));
  return std::pow(base, 2.0 / (pd - 2.0)) * std::pow(params.c, -2.0 * params.p * (1.0 - e.delta_p) / (pd - 2.0));
}

double reduced_energy(const FieldNorms& n, const ProblemParams& params) {
  const DerivedExponents e = derive_exponents_unchecked(params.N, params.q, params.p);
  const double pd = params.p * e.delta_p;
  return (0.5 - 1.0 / pd) * n.grad2 + (1.0 / params.q - (1.0 + e.delta_q) / pd) * n.gradq;
}

namespace {

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::size_t> converged_by_c(const std::vector<SweepRecord>& recs) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (recs[i].converged) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return recs[a].c < recs[b].c; });
  return idx;
}

}  // namespace

SweepResult run_sweep(const ProblemParams& base, const std::vector<double>& c_list, const SweepOptions& opt) {
  validate(base);
  for (double c : c_list)
    if (!(c > 0.0)) throw ParameterError("sweep masses must be positive");
  SweepResult res;
  res.regime = classify_regime(base).regime;
  if (res.regime != Regime::Subcritical && res.regime != Regime::Supercritical)
    throw RegimeError("sweeps need the subcritical or supercritical regime, got " + to_string(res.regime));
  if (c_list.size() < 4) res.warnings.push_back("fewer than 4 mass points");

  const std::size_t n = c_list.size();
  res.records.resize(n);
  res.solves.resize(n);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    ProblemParams pp = base;
    pp.c = c_list[i];
    const GridPtr g = sweep_grid(pp, opt.r_max, opt.grid_m);
    SolveResult s = res.regime == Regime::Subcritical ? minimize_global(pp, g, opt.solve)
                                                      : minimize_pohozaev(pp, g, opt.solve);
    const FieldNorms nn = norms(s.u, pp.q, pp.p);
    res.records[i] = SweepRecord{pp.c, s.level, s.lambda, nn.grad2, nn.gradq, nn.lp, s.converged};
    res.solves[i] = std::move(s);
  });

  const RegimeReport rr = classify_regime(base);
  const auto idx = converged_by_c(res.records);
  if (idx.size() < res.records.size())
    res.warnings.push_back(std::to_string(res.records.size() - idx.size()) + " point(s) did not converge");

  if (res.regime == Regime::Subcritical) {
    res.level_fit = fit_power_law(res.records, SweepQuantity::Level, rr.predicted_exponents.at("m_of_c"));
    res.lambda_fit = fit_power_law(res.records, SweepQuantity::Lambda, rr.predicted_exponents.at("lambda_of_c_sub"));
    if (res.level_fit->skipped) res.warnings.push_back(res.level_fit->note);
    bool lv = idx.size() >= 2, la = idx.size() >= 2;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& r = res.records[idx[k]];
      lv = lv && r.level < 0.0;
      la = la && r.lambda < 0.0;
      if (k > 0) {
        const auto& s = res.records[idx[k - 1]];
        lv = lv && s.level > r.level;
        la = la && s.lambda > r.lambda;
      }
    }
    res.level_trend_ok = lv;
    res.lambda_trend_ok = la;
    return res;
  }

  SupercriticalChecks sc;
  const ExtremalProfile wp = solve_wp(base.N, base.p, wp_grid(base.N, base.p));
  const double gn = gn_constant_2(base.N, base.p, wp.bundle());
  const double a = rr.predicted_exponents.at("lambda_of_c_super_a");
  const double b = rr.predicted_exponents.at("lambda_of_c_super_b");
  bool dec = idx.size() >= 2, tr = idx.size() >= 2;
  double K = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& r = res.records[idx[k]];
    if (k > 0) {
      const auto& s = res.records[idx[k - 1]];
      dec = dec && r.level < s.level;
      tr = tr && s.lambda < r.lambda;
    }
    K = std::min(K, -r.lambda / (std::pow(r.c, -a) + std::pow(r.c, -b)));
  }
  for (const auto& r : res.records) {
    ProblemParams pp = base;
    pp.c = r.c;
    const double bound = supercritical_grad_bound(pp, gn);
    sc.grad_lower_bound.push_back(bound);
    sc.grad_bound_ok.push_back(r.grad2 >= 0.9 * bound);
    const double red = reduced_energy(FieldNorms{r.c * r.c, r.grad2, r.gradq, r.lp}, pp);
    sc.reduced_form_err.push_back(std::abs(r.level - red) / std::max(std::abs(r.level), 1e-300));
  }
  sc.sigma_decreasing = dec;
  sc.lambda_decreasing_trend = tr;
  sc.lambda_bound_K = idx.empty() ? 0.0 : K;
  sc.lambda_bound_ok = !idx.empty() && K > 0.0;
  res.super = std::move(sc);
  return res;
}

CriticalReport run_critical(const ProblemParams& params, const std::vector<double>& c_list,
                            const CriticalOptions& opt) {
  const ProblemParams probe_params{params.N, params.q, params.p, 1.0};
  validate(probe_params);
  CriticalReport rep;
  rep.regime = classify_regime(probe_params).regime;
  if (rep.regime != Regime::L2Critical && rep.regime != Regime::LqCritical)
    throw RegimeError("critical scans need p = p̄ or p = p̂, got " + to_string(rep.regime));

  const ExtremalProfile wp = solve_wp(params.N, params.p, wp_grid(params.N, params.p), params.q);
  const ExtremalNorms wpn = wp.bundle();
  if (rep.regime == Regime::L2Critical) {
    rep.masses = critical_masses(probe_params, &wpn, nullptr);
  } else {
    const ExtremalProfile wpq = solve_wpq(params.N, params.p, params.q, wpq_grid(params.N, params.p, params.q));
    const ExtremalNorms wqn = wpq.bundle();
    rep.masses = critical_masses(probe_params, &wpn, &wqn);
  }

  std::vector<double> theta(opt.theta_points);
  for (int i = 0; i < opt.theta_points; ++i)
    theta[i] = -opt.theta_max + 2.0 * opt.theta_max * i / std::max(1, opt.theta_points - 1);

  const GridPtr g = make_grid(params.N, opt.probe_radius, opt.probe_m);
  rep.verdicts.resize(c_list.size());
  parallel_for(c_list.size(), 0, [&](std::size_t i) {
    CriticalVerdict v;
    v.c = c_list[i];
    ProblemParams pp = params;
    pp.c = v.c;
    if (rep.regime == Regime::LqCritical && rep.masses.c_2star && rep.masses.chat_2star &&
        v.c >= *rep.masses.c_2star && v.c <= *rep.masses.chat_2star) {
      v.verdict = "open gap";
    }
    const RadialField seed = build_phi1(opt.tau, v.c, wp, g);
    const BlowdownResult bd = detect_blowdown(pp, seed, theta, opt.floor);
    v.blowdown_unbounded = bd.unbounded;
    v.blowdown_min = bd.trace.front().second;
    for (const auto& t : bd.trace) v.blowdown_min = std::min(v.blowdown_min, t.second);
    SolveConfig cfg;
    cfg.max_iters = opt.probe_iters;
    cfg.tol_grad = 1e-12;
    cfg.multi_start = false;
    const SolveResult pr = descend_on_sphere(pp, seed, cfg);
    v.probe_start = pr.history.empty() ? 0.0 : pr.history.front().energy;
    v.probe_end = pr.level;
    v.probe_min = v.probe_start;
    for (const auto& h : pr.history) v.probe_min = std::min(v.probe_min, h.energy);
    v.probe_min = std::min(v.probe_min, pr.level);
    if (v.verdict.empty()) {
      if (bd.unbounded)
        v.verdict = "unbounded-below";
      else if (v.blowdown_min >= -1e-6 && v.probe_min >= -1e-6 && v.probe_end < v.probe_start)
        v.verdict = "zero-infimum";
      else
        v.verdict = "inconclusive";
    }
    rep.verdicts[i] = v;
  });
  return rep;
}

FiberTable fiber_table(const FiberCoeffs& k, const ProblemParams& params, int n) {
  if (n < 2) throw ParameterError("fiber_table needs at least 2 samples");
  FiberTable tab;
  if (k.e3 > std::max(k.e1, k.e2)) tab.t0 = find_t0(k, params);
  const double t0 = tab.t0.value_or(1.0);
  const double lo = std::log(std::min(1.0, t0) / 100.0);
  const double hi = std::log(std::max(1.0, t0) * 100.0);
  for (int i = 0; i < n; ++i) {
    const double t = std::exp(lo + (hi - lo) * i / (n - 1));
    tab.rows.push_back(FiberRow{t, fiber_h(t, k), fiber_hprime(t, k)});
  }
  return tab;
}

void write_fiber_csv(const std::string& path, const FiberTable& table) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.precision(17);
  f << "t,h,hprime\n";
  for (const auto& r : table.rows) f << r.t << ',' << r.h << ',' << r.hprime << '\n';
  if (!f) throw IoError("write failed for " + path);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError(path + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

namespace {

json params_json(const ProblemParams& p) { return json{{"N", p.N}, {"q", p.q}, {"p", p.p}, {"c", p.c}}; }

json fit_json(const std::optional<PowerLawFit>& f) {
  if (!f) return nullptr;
  return json{{"exponent", f->exponent}, {"r2", f->r2}, {"predicted", f->predicted}, {"rel_err", f->rel_err},
              {"points", f->points}, {"skipped", f->skipped}, {"note", f->note}};
}

}  // namespace

std::string regime_json(const ProblemParams& params, const RegimeReport& report) {
  const DerivedExponents e = derive_exponents_unchecked(params.N, params.q, params.p);
  json j;
  j["params"] = params_json(params);
  j["regime"] = to_string(report.regime);
  j["satisfied_conditions"] = report.satisfied_conditions;
  j["predicted_exponents"] = report.predicted_exponents;
  j["exponents"] = json{{"delta_p", e.delta_p}, {"delta_q", e.delta_q}, {"nu_pq", e.nu_pq}, {"pbar", e.pbar},
                        {"phat", e.phat}};
  return j.dump(2);
}

std::string critical_json(const ProblemParams& params, const CriticalReport& report) {
  json j;
  j["params"] = params_json(params);
  j["regime"] = to_string(report.regime);
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["thresholds"] = json{{"c_star", opt(report.masses.c_star)},
                         {"c_2star", opt(report.masses.c_2star)},
                         {"chat_2star", opt(report.masses.chat_2star)}};
  j["verdicts"] = json::array();
  for (const auto& v : report.verdicts)
    j["verdicts"].push_back(json{{"c", v.c}, {"verdict", v.verdict}, {"blowdown_unbounded", v.blowdown_unbounded},
                                 {"blowdown_min", v.blowdown_min}, {"probe_start", v.probe_start},
                                 {"probe_end", v.probe_end}, {"probe_min", v.probe_min}});
  return j.dump(2);
}

std::string sweep_json(const ProblemParams& params, const SweepResult& result) {
  json j;
  j["params"] = params_json(params);
  j["regime"] = to_string(result.regime);
  j["level_fit"] = fit_json(result.level_fit);
  j["lambda_fit"] = fit_json(result.lambda_fit);
  if (result.regime == Regime::Subcritical) {
    j["level_trend_ok"] = result.level_trend_ok;
    j["lambda_trend_ok"] = result.lambda_trend_ok;
  }
  if (result.super) {
    const auto& s = *result.super;
    j["sigma_decreasing"] = s.sigma_decreasing;
    j["lambda_decreasing_trend"] = s.lambda_decreasing_trend;
    j["lambda_bound_K"] = s.lambda_bound_K;
    j["lambda_bound_ok"] = s.lambda_bound_ok;
    j["grad_lower_bound"] = s.grad_lower_bound;
    j["grad_bound_ok"] = s.grad_bound_ok;
    j["reduced_form_err"] = s.reduced_form_err;
  }
  j["records"] = json::array();
  for (const auto& r : result.records)
    j["records"].push_back(json{{"c", r.c}, {"level", r.level}, {"lambda", r.lambda}, {"grad2", r.grad2},
                                {"gradq", r.gradq}, {"lp", r.lp}, {"converged", r.converged}});
  j["warnings"] = result.warnings;
  return j.dump(2);
}

}  // namespace normsol
