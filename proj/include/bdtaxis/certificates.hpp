#pragma once

#include <optional>
#include <string>
#include <variant>

#include "bdtaxis/model.hpp"

namespace bdtaxis {

/// Sup-norms and mass of the initial profiles, from dense sampling.
struct ProfileNorms {
  double sup_u0{0.0};
  double sup_v0{0.0};
  double sup_dv0{0.0};
  double integral_v0{0.0};
};

ProfileNorms profile_norms(const InitialData& id, double h0, int samples = 20000);

/// A-priori bounds 0 < u <= M1, 0 < v <= M2, 0 < h' <= M3 and the slope of
/// the boundary-layer barrier M2*(2K(h-x) - K^2(h-x)^2) that produces M3.
struct Bounds {
  double M1{0.0};
  double M2{0.0};
  double M3{0.0};
  double K{0.0};
};

Bounds compute_bounds(const ModelParams& p, const InitialData& id);
Bounds compute_bounds(const ModelParams& p, const ProfileNorms& norms);

/// Critical habitat length (pi/2) sqrt(d/q): a front that stays bounded never
/// passes it.
double vanishing_barrier(const ModelParams& p);

/// Prey density band floor q - r M1/(c + M1).
double band_floor(const ModelParams& p, const Bounds& bounds);

/// Parameters of the decaying cosine supersolution that traps the front
/// below h0 (1 + delta) whenever mu <= mu0.
struct VanishingCertificate {
  double delta{0.0};
  double alpha{0.0};
  double Mcap{0.0};  ///< smallest M with v0(x) <= M cos(pi x / (2 h0 (1 + delta/2)))
  double mu0{0.0};
};

struct Inapplicable {
  std::string reason;
};

using VanishingResult = std::variant<VanishingCertificate, Inapplicable>;
using SpreadingResult = std::variant<double, Inapplicable>;

VanishingResult vanishing_certificate(const ModelParams& p, const InitialData& id);

/// Front response mu^0 above which the front is guaranteed to pass the barrier.
SpreadingResult spreading_certificate(const ModelParams& p, const InitialData& id,
                                      const Bounds& bounds);

/// Composite Simpson rule on [0, h] with an even number of panels.
double simpson(const Profile& f, double h, int panels);

/// Everything closed-form for one configuration.
struct Certificates {
  Bounds bounds;
  double barrier{0.0};
  double band_floor{0.0};
  std::optional<VanishingCertificate> vanishing;
  std::string vanishing_reason;
  std::optional<double> mu_upper;
  std::string spreading_reason;
};

Certificates compute_certificates(const ModelParams& p, const InitialData& id);

}  // namespace bdtaxis
