#include "bdtaxis/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bdtaxis {

ProfileNorms profile_norms(const InitialData& id, double h0, int samples) {
  ProfileNorms n;
  for (int i = 0; i <= samples; ++i) {
    const double x = h0 * i / samples;
    n.sup_u0 = std::max(n.sup_u0, std::abs(id.u0(x)));
    n.sup_v0 = std::max(n.sup_v0, std::abs(id.v0(x)));
    n.sup_dv0 = std::max(n.sup_dv0, std::abs(id.v0.derivative(x)));
  }
  n.integral_v0 = simpson(id.v0, h0, 2000);
  return n;
}

Bounds compute_bounds(const ModelParams& p, const ProfileNorms& norms) {
  Bounds b;
  b.M2 = std::max(p.q, norms.sup_v0);
  b.K = std::max({1.0 / p.h0, std::sqrt(p.q / (2.0 * p.d)), norms.sup_dv0 / b.M2});
  b.M3 = 2.0 * p.mu * b.M2 * b.K;
  b.M1 = std::max({p.u_m, norms.sup_u0, (p.b - p.a * p.m) * b.M2 / p.a - p.c});
  return b;
}

Bounds compute_bounds(const ModelParams& p, const InitialData& id) {
  return compute_bounds(p, profile_norms(id, p.h0));
}

double vanishing_barrier(const ModelParams& p) {
  return 0.5 * std::numbers::pi * std::sqrt(p.d / p.q);
}

double band_floor(const ModelParams& p, const Bounds& bounds) {
  return p.q - p.r * bounds.M1 / (p.c + bounds.M1);
}

double simpson(const Profile& f, double h, int panels) {
  if (panels % 2) ++panels;
  const double dx = h / panels;
  double sum = f(0.0) + f(h);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * dx);
  return sum * dx / 3.0;
}

namespace {

/// sup over [0, h0] of v0(x) / cos(pi x / (2 L)) by dense sampling followed by
/// golden-section refinement around the best sample.
double minimal_cosine_cap(const Profile& v0, double h0, double L) {
  const double k = std::numbers::pi / (2.0 * L);
  auto ratio = [&](double x) { return v0(x) / std::cos(k * x); };
  constexpr int samples = 10000;
  int best = 0;
  double best_value = ratio(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double value = ratio(h0 * i / samples);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  double lo = h0 * std::max(best - 1, 0) / samples;
  double hi = h0 * std::min(best + 1, samples) / samples;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = ratio(x1);
  double f2 = ratio(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * h0; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = ratio(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = ratio(x1);
    }
  }
  return std::max({best_value, f1, f2});
}

}  // namespace

VanishingResult vanishing_certificate(const ModelParams& p, const InitialData& id) {
  const double barrier = vanishing_barrier(p);
  if (!(p.h0 < barrier)) {
    std::ostringstream os;
    os << "h0 = " << p.h0 << " is not below the barrier " << barrier;
    return Inapplicable{os.str()};
  }
  const double A = p.d * std::numbers::pi * std::numbers::pi / (4.0 * p.h0 * p.h0);
  VanishingCertificate cert;
  // A/(1+delta)^2 - q = (A - q)/2  <=>  (1+delta)^2 = 2A/(A+q)
  cert.delta = std::sqrt(2.0 * A / (A + p.q)) - 1.0;
  cert.alpha = 0.5 * (A - p.q);
  cert.Mcap = minimal_cosine_cap(id.v0, p.h0, p.h0 * (1.0 + 0.5 * cert.delta));
  cert.mu0 = cert.delta * cert.alpha * p.h0 * p.h0 / cert.Mcap;
  return cert;
}

SpreadingResult spreading_certificate(const ModelParams& p, const InitialData& id,
                                      const Bounds& bounds) {
  const double barrier = vanishing_barrier(p);
  const double floor = band_floor(p, bounds);
  if (!(floor > 0.0)) {
    std::ostringstream os;
    os << "q <= r M1/(c+M1) (band floor " << floor << ")";
    return Inapplicable{os.str()};
  }
  if (!(p.h0 < barrier)) return Inapplicable{"h0 is not below the barrier"};
  const ProfileNorms norms = profile_norms(id, p.h0);
  return p.d * std::max(1.0, norms.sup_v0 * floor) * (barrier - p.h0) / norms.integral_v0;
}

Certificates compute_certificates(const ModelParams& p, const InitialData& id) {
  Certificates c;
  c.bounds = compute_bounds(p, id);
  c.barrier = vanishing_barrier(p);
  c.band_floor = band_floor(p, c.bounds);
  const VanishingResult v = vanishing_certificate(p, id);
  if (const auto* cert = std::get_if<VanishingCertificate>(&v))
    c.vanishing = *cert;
  else
    c.vanishing_reason = std::get<Inapplicable>(v).reason;
  const SpreadingResult s = spreading_certificate(p, id, c.bounds);
  if (const auto* mu = std::get_if<double>(&s))
    c.mu_upper = *mu;
  else
    c.spreading_reason = std::get<Inapplicable>(s).reason;
  return c;
}

}  // namespace bdtaxis
