#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdtaxis/errors.hpp"
#include "bdtaxis/model.hpp"
#include "fixtures.hpp"

using namespace bdtaxis;

namespace {

ModelParams unit_kinetics() {
  ModelParams p = fixtures::reference();
  p.a = p.b = p.c = p.m = p.q = p.r = 1.0;
  return p;
}

bool mentions(const ValidationReport& r, const std::string& needle) {
  for (const auto& v : r.violations)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("predator kinetics") {
  const ModelParams p = unit_kinetics();
  CHECK(reaction_f(0.0, 5.0, p) == 0.0);
  CHECK(reaction_f(1.0, 1.0, p) == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));

  ModelParams q = p;
  q.a = 0.1;
  q.b = 1.0;
  q.c = 1.0;
  q.m = 0.5;
  // long double re-evaluation of b u v / (c + u + m v) - a u at (2, 3)
  const long double expected = 1.0L * 2 * 3 / (1.0L + 2 + 0.5L * 3) - 0.1L * 2;
  CHECK(reaction_f(2.0, 3.0, q) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-14));
  CHECK(reaction_f(2.0, 3.0, q) == doctest::Approx(1.1333333333).epsilon(1e-9));
}

TEST_CASE("prey kinetics") {
  const ModelParams p = unit_kinetics();
  CHECK(reaction_g(3.0, 0.0, p) == 0.0);
  CHECK(reaction_g(1.0, 1.0, p) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  for (double q : {0.5, 1.0, 3.0}) {
    ModelParams pq = p;
    pq.q = q;
    CHECK(reaction_g(0.0, q / 2, pq) == doctest::Approx(q * q / 4).epsilon(1e-15));
  }
}

TEST_CASE("kinetics vanish on the axes and f has the sign structure of the bound") {
  const ModelParams p = fixtures::reference();
  for (double s = 0.0; s <= 5.0; s += 0.25) {
    CHECK(reaction_f(0.0, s, p) == 0.0);
    CHECK(reaction_g(s, 0.0, p) == 0.0);
  }
  for (double u = 0.1; u < 4.0; u += 0.3) {
    for (double v = 0.0; v < 3.0; v += 0.3) {
      const double lhs = reaction_f(u, v, p);
      const double rhs = ((p.b - p.a * p.m) * v - p.a * p.c - p.a * u) / (p.c + u + p.m * v) * u;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      if (p.a * u > (p.b - p.a * p.m) * v - p.a * p.c + 1e-9) CHECK(lhs < 0.0);
    }
  }
}

TEST_CASE("taxis sensitivity") {
  ModelParams p = fixtures::reference();
  CHECK(chi(p.u_m, p) == 0.0);
  CHECK(chi(3.0 * p.u_m, p) == 0.0);
  CHECK(chi(0.0, p) == p.chi0);
  p.chi0 = 1.0;
  CHECK(chi(p.u_m / 2, p) == doctest::Approx(std::pow(1.0 - 0.25, 2)).epsilon(1e-15));
  CHECK(chi(p.u_m / 2, p) == doctest::Approx(0.5625));

  SUBCASE("range and C1 continuity at the cutoff") {
    for (double u = 0.0; u <= 2.0 * p.u_m; u += 0.01) {
      CHECK(chi(u, p) >= 0.0);
      CHECK(chi(u, p) <= p.chi0);
    }
    const double below = p.u_m * (1.0 - 1e-9);
    CHECK(chi(below, p) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(chi_prime(below, p)) < 1e-8);
    CHECK(chi_prime(p.u_m, p) == 0.0);
  }

  SUBCASE("Lipschitz constant of chi' matches a dense difference-quotient scan") {
    double L = 0.0;
    const int n = 200000;
    const double hstep = 1.5 * p.u_m / n;
    for (int i = 0; i < n; ++i) {
      const double u = i * hstep;
      L = std::max(L, std::abs(chi_prime(u + hstep, p) - chi_prime(u, p)) / hstep);
    }
    CHECK(p.chi_lipschitz() == doctest::Approx(L).epsilon(1e-3));
  }
}

TEST_CASE("flux coefficient eta and its derivative") {
  const ModelParams p = fixtures::reference();
  CHECK(eta(p.u_m, p) == 0.0);
  CHECK(eta_prime(p.u_m, p) == 0.0);
  CHECK(eta(1.7 * p.u_m, p) == 0.0);
  CHECK(eta_prime(1.7 * p.u_m, p) == 0.0);
  CHECK(eta(0.0, p) == 0.0);
  CHECK(eta_prime(0.0, p) == p.chi0);

  SUBCASE("central differences agree to second order") {
    // third derivative is at most 48 chi0 / u_m^2 below the cutoff
    const double bound = 48.0 * p.chi0 / (p.u_m * p.u_m) / 6.0;
    for (double e : {1e-2, 1e-3}) {
      for (double u = 0.0; u <= 2.0 * p.u_m; u += 0.013) {
        if (std::abs(u - p.u_m) <= e) continue;
        const double fd = (eta(u + e, p) - eta(u - e, p)) / (2.0 * e);
        CHECK(std::abs(eta_prime(u, p) - fd) <= bound * e * e * 1.01 + 1e-12);
      }
    }
  }

  SUBCASE("bounded by chi0 u_m") {
    for (double u = 0.0; u <= 3.0 * p.u_m; u += 0.01) CHECK(eta(u, p) <= p.chi0 * p.u_m);
  }
}

TEST_CASE("validation of initial data") {
  const ModelParams p = fixtures::reference();
  const double V = 0.5;

  SUBCASE("default cosine profiles are accepted with h* = mu V pi / (2 h0)") {
    const ValidationReport r = validate(p, fixtures::cosine_data(0.5, V, p.h0));
    CHECK(r.ok());
    CHECK(r.h_star == doctest::Approx(p.mu * V * std::numbers::pi / (2.0 * p.h0)).epsilon(1e-12));
  }
  SUBCASE("v0 identically zero is rejected") {
    const ValidationReport r = validate(p, {Profile::cosine(0.5, p.h0), Profile::zero(p.h0)});
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "not identically zero"));
  }
  SUBCASE("u0(h0) = 0.1 is rejected") {
    const Profile lifted(
        p.h0, [](double x) { return 0.5 * std::cos(std::numbers::pi * x / 2) + 0.1; },
        [](double x) { return -0.25 * std::numbers::pi * std::sin(std::numbers::pi * x / 2); },
        "lifted");
    const ValidationReport r = validate(p, {lifted, Profile::cosine(V, p.h0)});
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "support"));
  }
  SUBCASE("v0'(h0) >= 0 is rejected") {
    const Profile flat(
        p.h0, [](double x) { return (1.0 - x) * (1.0 - x) * 0.5; },
        [](double x) { return -(1.0 - x); }, "double root");
    // derivative 0 at h0 and nonzero at 0: both conditions fail
    const ValidationReport r = validate(p, {Profile::cosine(0.5, p.h0), flat});
    CHECK(mentions(r, "v0'(h0) < 0"));
  }
  SUBCASE("non-positive parameters are named") {
    ModelParams bad = p;
    bad.q = 0.0;
    bad.chi0 = -1.0;
    const ValidationReport r = validate(bad, fixtures::cosine_data(0.5, V, p.h0));
    CHECK(mentions(r, "q > 0"));
    CHECK(mentions(r, "chi0 >= 0"));
    CHECK_THROWS_AS(require_valid(bad, fixtures::cosine_data(0.5, V, p.h0)), InvalidInput);
  }
  SUBCASE("u0 identically zero only when single-species runs are requested") {
    const InitialData id = fixtures::cosine_data(0.0, V, p.h0);
    CHECK_FALSE(validate(p, id).ok());
    ValidationOptions opt;
    opt.allow_zero_predator = true;
    CHECK(validate(p, id, opt).ok());
  }
}

TEST_CASE("sampled profiles") {
  const double h0 = 2.0;
  std::vector<double> values;
  for (int i = 0; i <= 200; ++i) values.push_back(std::cos(std::numbers::pi * i / 400.0));
  const Profile f = Profile::sampled(values, h0);
  CHECK(f(0.0) == 1.0);
  CHECK(f(h0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f(1.0) == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-4));
  CHECK(f.derivative(0.0) == 0.0);
  CHECK(f.derivative(h0) == doctest::Approx(-std::numbers::pi / 4).epsilon(1e-4));
  ModelParams p = fixtures::reference();
  p.h0 = h0;
  CHECK(validate(p, {f, f}).ok());
}
