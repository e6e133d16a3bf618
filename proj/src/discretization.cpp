#include "bdtaxis/discretization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bdtaxis/errors.hpp"

namespace bdtaxis {

namespace {

void require_size(std::size_t got, const Grid& grid, const char* what) {
  if (got != grid.size())
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(grid.size()) +
                                " nodes, got " + std::to_string(got));
}

}  // namespace

Grid::Grid(int intervals) : intervals_(intervals), spacing_(0.0) {
  if (intervals < 2) throw std::invalid_argument("grid needs at least 2 intervals");
  spacing_ = 1.0 / intervals;
  nodes_.resize(size());
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    nodes_[j] = static_cast<double>(j) / intervals;
}

void laplacian(std::span<const double> f, const Grid& grid, std::span<double> out) {
  require_size(f.size(), grid, "laplacian field");
  require_size(out.size(), grid, "laplacian output");
  const std::size_t n = grid.size() - 1;
  const double inv = 1.0 / (grid.spacing() * grid.spacing());
  out[0] = 2.0 * (f[1] - f[0]) * inv;
  for (std::size_t j = 1; j < n; ++j) out[j] = (f[j - 1] - 2.0 * f[j] + f[j + 1]) * inv;
  out[n] = 0.0;
}

std::vector<double> laplacian(std::span<const double> field, const Grid& grid) {
  std::vector<double> out(grid.size());
  laplacian(field, grid, out);
  return out;
}

void advect_upwind(std::span<const double> f, std::span<const double> s, const Grid& grid,
                   std::span<double> out) {
  require_size(f.size(), grid, "advect_upwind field");
  require_size(s.size(), grid, "advect_upwind speed");
  require_size(out.size(), grid, "advect_upwind output");
  const std::size_t n = grid.size() - 1;
  const double inv = 1.0 / grid.spacing();
  for (std::size_t j = 0; j <= n; ++j) {
    const bool backward = (s[j] > 0.0 && j > 0) || j == n;
    const double diff = backward ? f[j] - f[j - 1] : f[j + 1] - f[j];
    out[j] = s[j] == 0.0 ? 0.0 : s[j] * diff * inv;
  }
}

std::vector<double> advect_upwind(std::span<const double> field, std::span<const double> speed,
                                  const Grid& grid) {
  std::vector<double> out(grid.size());
  advect_upwind(field, speed, grid, out);
  return out;
}

void gradient(std::span<const double> f, const Grid& grid, std::span<double> out) {
  require_size(f.size(), grid, "gradient field");
  require_size(out.size(), grid, "gradient output");
  const std::size_t n = grid.size() - 1;
  const double inv = 0.5 / grid.spacing();
  out[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) out[j] = (f[j + 1] - f[j - 1]) * inv;
  out[n] = boundary_gradient(f, grid);
}

double boundary_gradient(std::span<const double> z, const Grid& grid) {
  if (z.size() < 3) throw std::invalid_argument("boundary_gradient needs N >= 2");
  require_size(z.size(), grid, "boundary_gradient field");
  const std::size_t n = z.size() - 1;
  return (3.0 * z[n] - 4.0 * z[n - 1] + z[n - 2]) / (2.0 * grid.spacing());
}

PhysicalProfiles to_physical(std::span<const double> w, std::span<const double> z, double h,
                             const Grid& grid) {
  require_size(w.size(), grid, "to_physical w");
  require_size(z.size(), grid, "to_physical z");
  if (!(h > 0.0)) throw std::invalid_argument("to_physical needs h > 0");
  PhysicalProfiles out;
  out.x.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out.x[j] = h * grid.node(j);
  out.u.assign(w.begin(), w.end());
  out.v.assign(z.begin(), z.end());
  return out;
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || scratch.size() < n)
    throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
  double pivot = diag[0];
  if (!(std::abs(pivot) > 0.0)) throw TridiagonalSingular("zero pivot at row 0");
  double inv = 1.0 / pivot;
  rhs[0] *= inv;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i - 1] = upper[i - 1] * inv;
    pivot = diag[i] - lower[i] * scratch[i - 1];
    if (!(std::abs(pivot) > 0.0))
      throw TridiagonalSingular("zero pivot at row " + std::to_string(i));
    inv = 1.0 / pivot;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * inv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

}  // namespace bdtaxis
