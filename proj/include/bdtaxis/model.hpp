#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bdtaxis {

/// Kinetic, front and taxis constants of the predator-prey free-boundary system.
///
/// u is the predator, v the prey. Predator diffusivity is normalised to one.
struct ModelParams {
  double a{};     ///< predator mortality
  double b{};     ///< conversion-weighted capture rate
  double c{};     ///< saturation constant
  double m{};     ///< mutual interference
  double q{};     ///< prey intrinsic growth rate
  double r{};     ///< predation rate
  double d{};     ///< prey diffusivity
  double mu{};    ///< front response to the prey gradient
  double h0{};    ///< initial habitat length
  double chi0{};  ///< taxis sensitivity at zero predator density
  double u_m{};   ///< density above which taxis switches off

  /// Lipschitz constant of chi'(u) for the concrete sensitivity below.
  double chi_lipschitz() const;
};

/// Predator kinetics b*u*v/(c+u+m*v) - a*u.
inline double reaction_f(double u, double v, const ModelParams& p) {
  return p.b * u * v / (p.c + u + p.m * v) - p.a * u;
}

/// Prey kinetics v*(q-v) - r*u*v/(c+u+m*v).
inline double reaction_g(double u, double v, const ModelParams& p) {
  return v * (p.q - v) - p.r * u * v / (p.c + u + p.m * v);
}

/// Partial derivatives used for time-step control.
inline double reaction_f_du(double u, double v, const ModelParams& p) {
  const double den = p.c + u + p.m * v;
  return p.b * v * (p.c + p.m * v) / (den * den) - p.a;
}

inline double reaction_g_dv(double u, double v, const ModelParams& p) {
  const double den = p.c + u + p.m * v;
  return p.q - 2.0 * v - p.r * u * (p.c + u) / (den * den);
}

/// chi(u) = chi0 * (1 - (u/u_m)^2)^2 for u < u_m, zero beyond.
inline double chi(double u, const ModelParams& p) {
  if (u >= p.u_m) return 0.0;
  const double s = u / p.u_m;
  const double t = 1.0 - s * s;
  return p.chi0 * t * t;
}

inline double chi_prime(double u, const ModelParams& p) {
  if (u >= p.u_m) return 0.0;
  const double s = u / p.u_m;
  return -4.0 * p.chi0 * s * (1.0 - s * s) / p.u_m;
}

/// Taxis flux coefficient eta(u) = u*chi(u) and its exact derivative.
inline double eta(double u, const ModelParams& p) { return u * chi(u, p); }

inline double eta_prime(double u, const ModelParams& p) {
  if (u >= p.u_m) return 0.0;
  const double s2 = (u / p.u_m) * (u / p.u_m);
  return p.chi0 * (1.0 - s2) * (1.0 - 5.0 * s2);
}

/// A scalar profile on [0, length]. Either analytic (value and derivative
/// supplied in closed form) or sampled on uniform nodes.
///
/// Sampled profiles interpolate linearly. Their derivative uses central
/// differences inside, a second-order one-sided stencil at x = length, and
/// the even reflection at x = 0 (the same mirror rule the solver applies),
/// so the Neumann compatibility at the origin holds by construction.
class Profile {
 public:
  using Fn = std::function<double(double)>;

  Profile() = default;
  Profile(double length, Fn value, Fn derivative, std::string description);

  /// A*cos(pi*x/(2*length)).
  static Profile cosine(double amplitude, double length);
  static Profile zero(double length);
  static Profile sampled(std::vector<double> values, double length);

  double operator()(double x) const { return value_(x); }
  double derivative(double x) const { return derivative_(x); }
  double length() const { return length_; }
  const std::string& description() const { return description_; }

  /// Same shape, values multiplied by factor.
  Profile scaled(double factor) const;

 private:
  double length_{0.0};
  Fn value_;
  Fn derivative_;
  std::string description_;
};

struct InitialData {
  Profile u0;  ///< predator
  Profile v0;  ///< prey
};

struct ValidationOptions {
  /// Single-species runs start from u0 == 0; the full model forbids it.
  bool allow_zero_predator{false};
  /// Relative tolerance for the boundary compatibility conditions.
  double tolerance{1e-8};
  int samples{4001};
};

struct ValidationReport {
  std::vector<std::string> violations;
  double h_star{0.0};  ///< -mu * v0'(h0)

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const ModelParams& p, const InitialData& id,
                          const ValidationOptions& options = {});

/// Throws InvalidInput carrying every violation when validation fails.
ValidationReport require_valid(const ModelParams& p, const InitialData& id,
                               const ValidationOptions& options = {});

}  // namespace bdtaxis
