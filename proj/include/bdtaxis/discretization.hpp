#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bdtaxis {

/// Uniform nodes y_j = j/N, j = 0..N, on the front-fixed interval [0, 1].
/// Node 0 carries the Neumann condition, node N the Dirichlet condition.
class Grid {
 public:
  explicit Grid(int intervals);

  int intervals() const { return intervals_; }
  std::size_t size() const { return static_cast<std::size_t>(intervals_) + 1; }
  double spacing() const { return spacing_; }
  double node(std::size_t j) const { return nodes_[j]; }
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  int intervals_;
  double spacing_;
  std::vector<double> nodes_;
};

/// Second differences with the mirror ghost f_{-1} = f_1 at j = 0 and zero at
/// the Dirichlet node.
std::vector<double> laplacian(std::span<const double> field, const Grid& grid);
void laplacian(std::span<const double> field, const Grid& grid, std::span<double> out);

/// Upwinded s * f_y for the transport equation f_t + s f_y = 0: backward
/// differences where s > 0, forward where s < 0. End nodes fall back to the
/// one-sided stencil that exists.
std::vector<double> advect_upwind(std::span<const double> field, std::span<const double> speed,
                                  const Grid& grid);
void advect_upwind(std::span<const double> field, std::span<const double> speed,
                   const Grid& grid, std::span<double> out);

/// Central first differences; zero at j = 0 (Neumann) and the second-order
/// one-sided stencil at j = N.
void gradient(std::span<const double> field, const Grid& grid, std::span<double> out);

/// z_y at y = 1 from (3 z_N - 4 z_{N-1} + z_{N-2}) / (2 dy).
double boundary_gradient(std::span<const double> z, const Grid& grid);

struct PhysicalProfiles {
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> v;
};

/// Relabel front-fixed nodes as physical ones, x_j = h * y_j.
PhysicalProfiles to_physical(std::span<const double> w, std::span<const double> z, double h,
                             const Grid& grid);

/// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
/// upper[n-1] are ignored. rhs is overwritten by the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch);

}  // namespace bdtaxis
