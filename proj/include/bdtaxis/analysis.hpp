#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bdtaxis/certificates.hpp"
#include "bdtaxis/solver.hpp"

namespace bdtaxis {

enum class VerdictKind { Spreading, Vanishing, Undetermined };

const char* to_string(VerdictKind kind);

struct ClassifyTolerances {
  double eps_margin{1e-6};
  /// Unset thresholds default to 1e-4*M2 (eps_v, eps_u) and 1e-5*M3 (eps_h).
  std::optional<double> eps_v;
  std::optional<double> eps_u;
  std::optional<double> eps_h;
  double window_fraction{0.2};
};

struct LineFit {
  double slope{0.0};
  double intercept{0.0};
  double residual{0.0};  ///< RMS deviation from the fitted line
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct SpeedEstimate {
  double k{0.0};
  double residual{0.0};           ///< RMS of h - (intercept + k t) over the fit window
  double relative_residual{0.0};  ///< residual / h(t_end)
  double t_from{0.0};
};

struct Verdict {
  VerdictKind kind{VerdictKind::Undetermined};
  std::optional<double> crossing_time;  ///< first sample with h above the barrier
  double window_start{0.0};
  double trailing_max_u{0.0};
  double trailing_max_v{0.0};
  double trailing_max_hprime{0.0};
  double h_end{0.0};
  std::optional<double> h_infinity;  ///< vanishing runs only
  std::optional<SpeedEstimate> speed;
  std::string note;
};

/// Spreading once h passes the barrier, Vanishing when u, v and h' are all
/// small over the trailing window, Undetermined otherwise.
/// Throws InvalidInput when fewer than two samples fall in the window.
Verdict classify(const Trajectory& traj, const Certificates& certs,
                 const ClassifyTolerances& tol = {});

/// Least-squares front speed over the final half of the run. Throws
/// NotApplicable unless the trajectory crossed the barrier.
SpeedEstimate estimate_speed(const Trajectory& traj, double barrier);

class BisectionError : public std::runtime_error {
 public:
  enum class Kind { UndeterminedProbe, SameVerdict, ReversedBracket };
  BisectionError(Kind kind, double mu, const std::string& what)
      : std::runtime_error(what), kind_(kind), mu_(mu) {}
  Kind kind() const { return kind_; }
  double mu() const { return mu_; }

 private:
  Kind kind_;
  double mu_;
};

struct BisectOptions {
  int iterations{8};
  ClassifyTolerances tolerances{};
  /// An Undetermined probe is rerun with t_max doubled this many times.
  int max_extensions{3};
  /// Verify both bracket ends on separate threads.
  bool parallel_ends{false};
};

struct Probe {
  double mu{0.0};
  Verdict verdict;
  double t_end{0.0};
};

struct BisectionResult {
  double mu_lo{0.0};
  double mu_hi{0.0};
  std::vector<Probe> probes;  ///< bracket ends first, then in bisection order
};

/// Classification of a single run at the given mu. Spreading runs stop at the
/// barrier; undetermined runs are extended up to options.max_extensions times.
Probe probe_mu(const ModelParams& p, const InitialData& id, const Grid& grid,
               const Controls& controls, double mu, const BisectOptions& options);

/// Bisection on the predicate "Spreading". The left end must vanish and the
/// right end must spread.
BisectionResult bisect_mu_star(const ModelParams& p, const InitialData& id, const Grid& grid,
                               const Controls& controls, std::pair<double, double> bracket,
                               const BisectOptions& options = {});

struct BandOptions {
  double x_obs{1.0};
  double window_fraction{0.2};
  double tol{0.0};  ///< absolute
  std::optional<double> floor;  ///< overrides the certificate band floor
};

struct BandReport {
  bool pass{false};
  double lower{0.0};
  double upper{0.0};
  double v_min{0.0};
  double v_max{0.0};
  double window_start{0.0};
  std::size_t snapshots_checked{0};
};

/// Envelope of v on [0, x_obs] over the snapshots of the trailing window,
/// against [floor - tol, q + tol].
BandReport band_check(const Trajectory& traj, const Certificates& certs, double q,
                      const BandOptions& options);

}  // namespace bdtaxis
