#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace normsol {

/// Uniform radial grid on [0, R] carrying quadrature weights for ∫_{ℝ^N}.
///
/// Node weights are composite trapezoid weights against ω_N r^{N-1} dr.
/// The centre node additionally carries the volume of the ball of radius
/// h/2, which is O(h^N) and keeps the L² gradient defined at r = 0.
/// Gradient terms are integrated on the staggered midpoints r_{j+1/2}
/// (midpoint rule), which is the flux form the energy gradient is built on.
class RadialGrid {
 public:
  RadialGrid(int N, double R, std::size_t M);

  int dimension() const { return N_; }
  double radius() const { return R_; }
  std::size_t size() const { return nodes_.size(); }
  double spacing() const { return h_; }
  /// Surface area ω_N = 2π^{N/2}/Γ(N/2) of the unit sphere.
  double sphere_area() const { return omega_; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  /// Midpoint weights ω_N r_{j+1/2}^{N-1} h, j = 0..M-2.
  std::span<const double> flux_weights() const { return flux_weights_; }

 private:
  int N_;
  double R_;
  double h_;
  double omega_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> flux_weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Throws ParameterError unless N >= 2, R > 0, M >= 64.
GridPtr make_grid(int N, double R, std::size_t M);

/// A radial profile sampled at the nodes of a grid.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;

  RadialField() = default;
  RadialField(GridPtr g, std::vector<double> v);
  /// Samples f(r) at the grid nodes.
  template <class F>
  static RadialField sample(GridPtr g, F&& f) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g->nodes()[i]);
    return RadialField(std::move(g), std::move(v));
  }
  std::size_t size() const { return values.size(); }
  bool all_finite() const;
};

struct FieldNorms {
  double mass2 = 0.0;  ///< ‖u‖₂²
  double grad2 = 0.0;  ///< ‖∇u‖₂²
  double gradq = 0.0;  ///< ‖∇u‖_q^q
  double lp = 0.0;     ///< ‖u‖_p^p
};

/// Σ w_i f_i. Throws ParameterError on a length mismatch.
double integrate(std::span<const double> values, const RadialGrid& grid);

/// Nodal u'(r): central differences inside, u'(0) = 0, second-order
/// one-sided difference at r = R.
RadialField radial_derivative(const RadialField& u);

/// Staggered differences D_j = (u_{j+1} - u_j)/h at r_{j+1/2}.
std::vector<double> staggered_derivative(const RadialField& u);

/// Mass, kinetic and potential norms; gradient norms use the staggered
/// differences integrated with the flux weights.
FieldNorms norms(const RadialField& u, double q, double p);

/// v(r) = t^{N/2} u(t r) by linear interpolation (u = 0 past R), then
/// rescaled to the mass of u.
RadialField resample_dilation(const RadialField& u, double t);

/// Two-column CSV (r,u) with header, 17 significant digits.
void write_field_csv(const std::string& path, const RadialField& u);
/// Reads a field written by write_field_csv; the nodes must be uniform and start at 0.
RadialField read_field_csv(const std::string& path, int N);

}  // namespace normsol
