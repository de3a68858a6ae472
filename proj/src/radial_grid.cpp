#include "normsol/radial_grid.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "normsol/errors.hpp"

namespace normsol {

RadialGrid::RadialGrid(int N, double R, std::size_t M) : N_(N), R_(R) {
  if (N < 2) throw ParameterError("grid dimension must satisfy N >= 2");
  if (!std::isfinite(R) || !(R > 0.0)) throw ParameterError("grid radius must satisfy R > 0");
  if (M < 64) throw ParameterError("grid size must satisfy M >= 64");

  h_ = R / static_cast<double>(M - 1);
  omega_ = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);

  nodes_.resize(M);
  weights_.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    nodes_[i] = h_ * static_cast<double>(i);
    weights_[i] = omega_ * std::pow(nodes_[i], N - 1) * h_;
  }
  weights_.front() = omega_ * std::pow(0.5 * h_, N) / N;
  weights_.back() *= 0.5;

  flux_weights_.resize(M - 1);
  for (std::size_t j = 0; j + 1 < M; ++j) {
    const double mid = h_ * (static_cast<double>(j) + 0.5);
    flux_weights_[j] = omega_ * std::pow(mid, N - 1) * h_;
  }
}

GridPtr make_grid(int N, double R, std::size_t M) {
  return std::make_shared<const RadialGrid>(N, R, M);
}

RadialField::RadialField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw ParameterError("field needs a grid");
  if (values.size() != grid->size()) throw ParameterError("field length does not match grid size");
}

bool RadialField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double integrate(std::span<const double> values, const RadialGrid& grid) {
  if (values.size() != grid.size()) throw ParameterError("integrate: length mismatch");
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += w[i] * values[i];
  return s;
}

RadialField radial_derivative(const RadialField& u) {
  const std::size_t M = u.size();
  const double h = u.grid->spacing();
  const auto& v = u.values;
  std::vector<double> d(M, 0.0);
  for (std::size_t i = 1; i + 1 < M; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[M - 1] = (3.0 * v[M - 1] - 4.0 * v[M - 2] + v[M - 3]) / (2.0 * h);
  return RadialField(u.grid, std::move(d));
}

std::vector<double> staggered_derivative(const RadialField& u) {
  const std::size_t M = u.size();
  const double h = u.grid->spacing();
  std::vector<double> d(M - 1);
  for (std::size_t j = 0; j + 1 < M; ++j) d[j] = (u.values[j + 1] - u.values[j]) / h;
  return d;
}

FieldNorms norms(const RadialField& u, double q, double p) {
  const auto w = u.grid->weights();
  const auto W = u.grid->flux_weights();
  FieldNorms n;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u.values[i]);
    n.mass2 += w[i] * a * a;
    n.lp += w[i] * std::pow(a, p);
  }
  const std::vector<double> d = staggered_derivative(u);
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double a = std::abs(d[j]);
    n.grad2 += W[j] * a * a;
    n.gradq += W[j] * std::pow(a, q);
  }
  return n;
}

RadialField resample_dilation(const RadialField& u, double t) {
  if (!std::isfinite(t) || !(t > 0.0)) throw ParameterError("dilation factor must be finite and positive");
  const RadialGrid& g = *u.grid;
  const std::size_t M = g.size();
  const double h = g.spacing();
  const double amp = std::pow(t, 0.5 * g.dimension());
  std::vector<double> v(M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    const double s = t * g.nodes()[i] / h;
    if (s >= static_cast<double>(M - 1)) {
      v[i] = s == static_cast<double>(M - 1) ? amp * u.values[M - 1] : 0.0;
      continue;
    }
    const auto k = static_cast<std::size_t>(s);
    const double f = s - static_cast<double>(k);
    v[i] = amp * ((1.0 - f) * u.values[k] + f * u.values[k + 1]);
  }
  RadialField out(u.grid, std::move(v));
  const double m_in = norms(u, 2.0, 2.0).mass2;
  const double m_out = norms(out, 2.0, 2.0).mass2;
  if (m_out > 0.0) {
    const double s = std::sqrt(m_in / m_out);
    for (double& x : out.values) x *= s;
  }
  return out;
}

void write_field_csv(const std::string& path, const RadialField& u) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.precision(17);
  os << "r,u\n";
  for (std::size_t i = 0; i < u.size(); ++i) os << u.grid->nodes()[i] << ',' << u.values[i] << '\n';
  if (!os) throw IoError("write failed for " + path);
}

RadialField read_field_csv(const std::string& path, int N) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError(path + ": empty file");
  std::vector<double> r, u;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    char comma = 0;
    if (!(ls >> a >> comma >> b) || comma != ',') throw IoError(path + ": malformed row '" + line + "'");
    r.push_back(a);
    u.push_back(b);
  }
  if (r.size() < 64) throw IoError(path + ": need at least 64 rows");
  if (r.front() != 0.0) throw IoError(path + ": first node must be r = 0");
  const double R = r.back();
  GridPtr g = make_grid(N, R, r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(r[i] - g->nodes()[i]) > 1e-9 * R) throw IoError(path + ": nodes are not uniform");
  return RadialField(std::move(g), std::move(u));
}

}  // namespace normsol
