#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "bdtaxis/discretization.hpp"
#include "bdtaxis/errors.hpp"

using namespace bdtaxis;

namespace {

std::vector<double> sample(const Grid& g, auto f) {
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = f(g.node(j));
  return out;
}

double max_interior_error(const Grid& g, auto f, auto fyy) {
  const auto lap = laplacian(sample(g, f), g);
  double err = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) err = std::max(err, std::abs(lap[j] - fyy(g.node(j))));
  return err;
}

}  // namespace

TEST_CASE("uniform grid") {
  const Grid g(4);
  CHECK(g.size() == 5);
  CHECK(g.spacing() == 0.25);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(4) == 1.0);
  CHECK_THROWS_AS(Grid(1), std::invalid_argument);
}

TEST_CASE("laplacian") {
  const Grid g(10);
  SUBCASE("constant field has zero second difference") {
    const auto lap = laplacian(std::vector<double>(g.size(), 3.7), g);
    for (double v : lap) CHECK(v == 0.0);
  }
  SUBCASE("y^2 is reproduced exactly, including the mirrored origin") {
    const auto lap = laplacian(sample(g, [](double y) { return y * y; }), g);
    for (std::size_t j = 0; j + 1 < g.size(); ++j) CHECK(lap[j] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lap.back() == 0.0);
  }
  SUBCASE("second-order convergence on an even cosine") {
    const double k = std::numbers::pi / 2;
    auto f = [k](double y) { return std::cos(k * y); };
    auto fyy = [k](double y) { return -k * k * std::cos(k * y); };
    const double e1 = max_interior_error(Grid(20), f, fyy);
    const double e2 = max_interior_error(Grid(40), f, fyy);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
  }
  SUBCASE("linear in the field") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> f(g.size()), h(g.size()), comb(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      f[j] = U(rng);
      h[j] = U(rng);
      comb[j] = 2.0 * f[j] - 3.0 * h[j];
    }
    const auto lf = laplacian(f, g), lh = laplacian(h, g), lc = laplacian(comb, g);
    for (std::size_t j = 0; j < g.size(); ++j)
      CHECK(lc[j] == doctest::Approx(2.0 * lf[j] - 3.0 * lh[j]).epsilon(1e-12));
  }
  SUBCASE("size mismatch") {
    CHECK_THROWS_AS(laplacian(std::vector<double>(5, 0.0), g), std::invalid_argument);
  }
}

TEST_CASE("upwind advection") {
  const Grid g(8);
  const auto f = sample(g, [](double y) { return 2.0 - 3.0 * y; });
  SUBCASE("exact on a linear field for either sign") {
    for (double s : {1.5, -0.75}) {
      const auto out = advect_upwind(f, std::vector<double>(g.size(), s), g);
      for (double v : out) CHECK(v == doctest::Approx(-3.0 * s).epsilon(1e-12));
    }
  }
  SUBCASE("stencil direction follows the speed") {
    std::vector<double> step(g.size(), 0.0);
    step[4] = 1.0;
    std::vector<double> pos(g.size(), 1.0), neg(g.size(), -1.0);
    const auto a = advect_upwind(step, pos, g);
    const auto b = advect_upwind(step, neg, g);
    // backward differences see the bump at j = 4 and j = 5, forward at j = 3 and j = 4
    CHECK(a[4] == doctest::Approx(8.0));
    CHECK(a[5] == doctest::Approx(-8.0));
    CHECK(a[3] == 0.0);
    CHECK(b[3] == doctest::Approx(-8.0));
    CHECK(b[4] == doctest::Approx(8.0));
    CHECK(b[5] == 0.0);
  }
  SUBCASE("zero speed gives zero") {
    const auto out = advect_upwind(f, std::vector<double>(g.size(), 0.0), g);
    for (double v : out) CHECK(v == 0.0);
  }
}

TEST_CASE("front gradient") {
  SUBCASE("exact on linear and quadratic fields") {
    const Grid g(16);
    CHECK(boundary_gradient(sample(g, [](double y) { return 1.0 - y; }), g) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(boundary_gradient(sample(g, [](double y) { return 1.0 - y * y; }), g) ==
          doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("cosine profile") {
    for (int n : {50, 200, 800}) {
      const Grid g(n);
      const auto z = sample(g, [](double y) { return std::cos(std::numbers::pi * y / 2); });
      CHECK(boundary_gradient(z, g) == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-3));
    }
  }
  SUBCASE("zero field") {
    const Grid g(16);
    CHECK(boundary_gradient(std::vector<double>(g.size(), 0.0), g) == 0.0);
  }
  SUBCASE("gradient uses Neumann at the origin and the one-sided stencil at the front") {
    const Grid g(16);
    const auto z = sample(g, [](double y) { return 1.0 - y * y; });
    std::vector<double> out(g.size());
    gradient(z, g, out);
    CHECK(out[0] == 0.0);
    for (std::size_t j = 1; j < g.size(); ++j)
      CHECK(out[j] == doctest::Approx(-2.0 * g.node(j)).epsilon(1e-12));
  }
}

TEST_CASE("physical relabelling") {
  const Grid g(4);
  const std::vector<double> w{1, 2, 3, 4, 0}, z{5, 6, 7, 8, 0};
  const auto p = to_physical(w, z, 2.0, g);
  const std::vector<double> x{0.0, 0.5, 1.0, 1.5, 2.0};
  CHECK(p.x == x);
  CHECK(p.u == w);
  CHECK(p.v == z);
  CHECK_THROWS_AS(to_physical(w, z, 0.0, g), std::invalid_argument);
}

TEST_CASE("tridiagonal solve") {
  SUBCASE("agrees with a dense Gaussian elimination") {
    const std::size_t n = 12;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> lo(n), di(n), up(n), rhs(n), scratch(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = U(rng);
      up[i] = U(rng);
      di[i] = 3.0 + U(rng);
      rhs[i] = U(rng);
    }
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      A[i][i] = di[i];
      if (i > 0) A[i][i - 1] = lo[i];
      if (i + 1 < n) A[i][i + 1] = up[i];
      A[i][n] = rhs[i];
    }
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
      std::swap(A[k], A[piv]);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = A[i][k] / A[k][k];
        for (std::size_t j = k; j <= n; ++j) A[i][j] -= f * A[k][j];
      }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
      double s = A[i][n];
      for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
      x[i] = s / A[i][i];
    }
    solve_tridiagonal(lo, di, up, rhs, scratch);
    for (std::size_t i = 0; i < n; ++i) CHECK(rhs[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
  SUBCASE("singular pivot") {
    std::vector<double> lo{0, 1}, di{1, 1}, up{1, 0}, rhs{1, 1}, scratch(2);
    CHECK_THROWS_AS(solve_tridiagonal(lo, di, up, rhs, scratch), TridiagonalSingular);
  }
}
