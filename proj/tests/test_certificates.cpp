#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdtaxis/certificates.hpp"
#include "fixtures.hpp"

using namespace bdtaxis;

namespace {

constexpr double pi = std::numbers::pi;

// Root of F(delta) = d pi^2 / (4 (1+delta)^2 h0^2) - q - (d pi^2 / (4 h0^2) - q) / 2 by bisection.
double delta_by_bisection(double h0, double d, double q) {
  const double A = d * pi * pi / (4 * h0 * h0);
  auto F = [&](double delta) { return A / ((1 + delta) * (1 + delta)) - q - 0.5 * (A - q); };
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Plain max over an extra-dense grid.
double cap_by_scan(const Profile& v0, double h0, double L) {
  double best = 0.0;
  const int n = 400000;
  for (int i = 0; i <= n; ++i) {
    const double x = h0 * i / n;
    best = std::max(best, v0(x) / std::cos(pi * x / (2 * L)));
  }
  return best;
}

}  // namespace

TEST_CASE("a-priori bounds") {
  ModelParams p = fixtures::reference();
  p.mu = 1.0;
  SUBCASE("reference profiles") {
    const Bounds b = compute_bounds(p, fixtures::cosine_data(0.5, 0.5, 1.0));
    CHECK(b.M2 == 1.0);
    CHECK(b.K == doctest::Approx(1.0));
    CHECK(b.M3 == doctest::Approx(2.0));
    CHECK(b.M1 == doctest::Approx(2.0));  // max(u_m=2, 0.5, (1-0.3)/0.3 - 1 = 1.333)
  }
  SUBCASE("M1 from the kinetic term") {
    p.a = 0.5;
    p.b = 1.0;
    p.m = 1.0;
    p.c = 1.0;
    p.u_m = 2.0;
    ProfileNorms n;
    n.sup_u0 = 1.0;
    n.sup_v0 = 0.5;
    n.sup_dv0 = 0.5;
    const Bounds b = compute_bounds(p, n);
    CHECK(b.M2 == 1.0);
    CHECK(b.M1 == 2.0);
    p.a = 0.1;  // (1 - 0.1)/0.1 - 1 = 8
    CHECK(compute_bounds(p, n).M1 == doctest::Approx(8.0));
  }
  SUBCASE("K picks the steepest of its three candidates") {
    ProfileNorms n;
    n.sup_v0 = 2.0;
    n.sup_dv0 = 6.0;
    const Bounds b = compute_bounds(p, n);
    CHECK(b.M2 == 2.0);
    CHECK(b.K == 3.0);
    CHECK(b.M3 == doctest::Approx(2.0 * p.mu * 2.0 * 3.0));
  }
  SUBCASE("profile norms by sampling") {
    const ProfileNorms n = profile_norms(fixtures::cosine_data(0.5, 0.5, 1.0), 1.0);
    CHECK(n.sup_u0 == doctest::Approx(0.5));
    CHECK(n.sup_dv0 == doctest::Approx(0.25 * pi).epsilon(1e-9));
    CHECK(n.integral_v0 == doctest::Approx(1.0 / pi).epsilon(1e-10));
  }
}

TEST_CASE("vanishing barrier") {
  ModelParams p = fixtures::reference();
  CHECK(vanishing_barrier(p) == doctest::Approx(1.5707963).epsilon(1e-7));
  p.d = 4.0;
  CHECK(vanishing_barrier(p) == doctest::Approx(pi).epsilon(1e-14));
  for (double d : {0.3, 1.0, 7.0}) {
    for (double q : {0.5, 2.0}) {
      ModelParams a = p, b = p;
      a.d = d;
      a.q = q;
      b.d = 4 * d;
      b.q = q;
      CHECK(vanishing_barrier(b) == doctest::Approx(2 * vanishing_barrier(a)).epsilon(1e-14));
      b.d = d;
      b.q = 4 * q;
      CHECK(vanishing_barrier(b) == doctest::Approx(0.5 * vanishing_barrier(a)).epsilon(1e-14));
    }
  }
}

TEST_CASE("vanishing certificate") {
  ModelParams p = fixtures::reference();
  SUBCASE("h0 = 1, d = 4, q = 1") {
    p.d = 4.0;
    const auto res = vanishing_certificate(p, fixtures::cosine_data(0.5, 0.5, 1.0));
    const auto& cert = std::get<VanishingCertificate>(res);
    CHECK(cert.delta == doctest::Approx(delta_by_bisection(1.0, 4.0, 1.0)).epsilon(1e-12));
    CHECK(cert.delta == doctest::Approx(0.34766).epsilon(1e-4));
    CHECK(cert.alpha == doctest::Approx(0.5 * (pi * pi - 1.0)).epsilon(1e-14));
    CHECK(cert.alpha == doctest::Approx(4.43480).epsilon(1e-5));
  }
  SUBCASE("reference configuration") {
    const InitialData id = fixtures::cosine_data(0.5, 0.5, 1.0);
    const auto& cert = std::get<VanishingCertificate>(vanishing_certificate(p, id));
    CHECK(cert.delta == doctest::Approx(delta_by_bisection(1.0, 1.0, 1.0)).epsilon(1e-12));
    const double cap = cap_by_scan(id.v0, 1.0, 1.0 + 0.5 * cert.delta);
    CHECK(cert.Mcap == doctest::Approx(cap).epsilon(1e-9));
    CHECK(cert.Mcap == doctest::Approx(0.5).epsilon(1e-12));  // ratio peaks at x = 0 for this shape
    CHECK(cert.mu0 == doctest::Approx(cert.delta * cert.alpha / cert.Mcap).epsilon(1e-14));
    CHECK(cert.mu0 == doctest::Approx(0.283178).epsilon(1e-5));
  }
  SUBCASE("cap of a profile peaking inside the interval matches a dense scan") {
    const Profile bump(
        1.0, [](double x) { return (1.0 - x * x) * (0.3 + x); },
        [](double x) { return -2 * x * (0.3 + x) + (1.0 - x * x); }, "bump");
    const auto& cert = std::get<VanishingCertificate>(vanishing_certificate(p, {bump, bump}));
    const double cap = cap_by_scan(bump, 1.0, 1.0 + 0.5 * cert.delta);
    CHECK(cert.Mcap == doctest::Approx(cap).epsilon(1e-9));
    CHECK(cert.Mcap > bump(0.5));
  }
  SUBCASE("h0 at the barrier is not applicable") {
    p.h0 = vanishing_barrier(p);
    const auto res = vanishing_certificate(p, fixtures::cosine_data(0.5, 0.5, p.h0));
    CHECK(std::holds_alternative<Inapplicable>(res));
  }
}

TEST_CASE("spreading certificate") {
  ModelParams p = fixtures::reference();
  const InitialData id = fixtures::cosine_data(0.5, 0.5, 1.0);
  SUBCASE("reference value by hand") {
    const Bounds b = compute_bounds(p, id);
    CHECK(band_floor(p, b) == doctest::Approx(1.0 / 3.0));
    // d max(1, 0.5/3) (pi/2 - 1) / (1/pi)
    const double expected = (pi / 2 - 1.0) * pi;
    CHECK(std::get<double>(spreading_certificate(p, id, b)) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(1.79321).epsilon(1e-5));
  }
  SUBCASE("r -> 0 leaves the band floor at q and the certificate finite") {
    p.r = 1e-12;
    const Bounds b = compute_bounds(p, id);
    CHECK(band_floor(p, b) == doctest::Approx(p.q).epsilon(1e-11));
    const double mu = std::get<double>(spreading_certificate(p, id, b));
    CHECK(std::isfinite(mu));
    CHECK(mu > 0.0);
  }
  SUBCASE("band floor not positive") {
    p.r = 2.0;  // 2 * 2 / 3 > 1
    const Bounds b = compute_bounds(p, id);
    CHECK(std::holds_alternative<Inapplicable>(spreading_certificate(p, id, b)));
  }
  SUBCASE("mu0 <= mu^0 across configurations") {
    for (double d : {0.5, 1.0, 2.0}) {
      for (double V : {0.2, 0.5, 1.0}) {
        for (double h0 : {0.5, 1.0}) {
          ModelParams c = p;
          c.d = d;
          c.h0 = h0;
          const Certificates certs = compute_certificates(c, fixtures::cosine_data(0.5, V, h0));
          if (!certs.vanishing || !certs.mu_upper) continue;
          CHECK(certs.vanishing->mu0 <= *certs.mu_upper);
        }
      }
    }
  }
}

TEST_CASE("Simpson rule is exact on cubics") {
  const Profile cubic(
      2.0, [](double x) { return x * x * x - x; }, [](double x) { return 3 * x * x - 1; }, "cubic");
  CHECK(simpson(cubic, 2.0, 4) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(simpson(cubic, 2.0, 3) == doctest::Approx(2.0).epsilon(1e-14));
}
