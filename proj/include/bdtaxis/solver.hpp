#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bdtaxis/certificates.hpp"
#include "bdtaxis/discretization.hpp"
#include "bdtaxis/model.hpp"

namespace bdtaxis {

/// Switches that alter the physics. Only verification code sets these.
struct TestHooks {
  bool disable_reactions{false};
  bool freeze_front{false};
  bool flip_predation_sign{false};  ///< deliberately wrong prey kinetics
};

struct Tolerances {
  double positivity{0.0};  ///< clip floor for slightly negative nodes
  double front{0.0};       ///< allowed negative h' before failing
};

/// 1e-12*max(M1,M2) and 1e-8*M3.
Tolerances default_tolerances(const Bounds& bounds);

struct Controls {
  double t_max{200.0};
  double sample_dt{0.1};
  std::vector<double> snapshot_times;
  double cfl{0.4};
  double dt_max{1e-3};
  double react_cap{0.2};
  std::optional<Tolerances> tolerances;  ///< defaults from the a-priori bounds
  /// Stop as soon as h exceeds this length (e.g. the vanishing barrier).
  std::optional<double> stop_above_h;
  ValidationOptions validation{};
  TestHooks hooks{};
};

/// Front-fixed state: y = x/h, w(y) = u(h y), z(y) = v(h y).
struct SolverState {
  double t{0.0};
  double h{0.0};
  double hprime{0.0};
  std::vector<double> w;
  std::vector<double> z;
  double zeta{0.0};  ///< 1/h^2
  double xi{0.0};    ///< h'/h

  void refresh_coefficients();
};

struct Sample {
  double t{0.0};
  double h{0.0};
  double hprime{0.0};
  double max_u{0.0};
  double max_v{0.0};
  double mass_u{0.0};
  double mass_v{0.0};
  double zy1{0.0};      ///< z_y(t, 1)
  double max_vxx{0.0};  ///< max |v_xx| from discrete second differences
};

struct Snapshot {
  double t{0.0};
  PhysicalProfiles profiles;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Snapshot> snapshots;
  std::size_t steps{0};
  double dt_min{0.0};
  double dt_max{0.0};
  bool stopped_early{false};

  double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

SolverState init_state(const ModelParams& p, const InitialData& id, const Grid& grid,
                       const ValidationOptions& validation = {});

/// Largest admissible step for the explicit parts of the split.
double stable_dt(const SolverState& state, const ModelParams& p, const Grid& grid,
                 const Controls& controls);

struct StepContext {
  Tolerances tolerances{};
  TestHooks hooks{};
};

/// One IMEX step: front first, then z (implicit diffusion), then w using the
/// freshly updated z. Throws InstabilityDetected.
SolverState step(const SolverState& state, const ModelParams& p, const Grid& grid, double dt,
                 const StepContext& context = {});

/// Observables of a state as one trajectory row.
Sample observe(const SolverState& state, const Grid& grid);

/// Incremental driver. Samples land exactly on multiples of sample_dt and on
/// the requested snapshot times, so extending a run is bit-identical to
/// running to the later end time directly.
class Simulation {
 public:
  Simulation(const ModelParams& p, const InitialData& id, const Grid& grid,
             const Controls& controls);

  /// Advances to t_end (or until stop_above_h triggers).
  void advance_to(double t_end);

  const SolverState& state() const { return state_; }
  const Trajectory& trajectory() const { return trajectory_; }
  const Bounds& bounds() const { return bounds_; }
  const Grid& grid() const { return grid_; }
  bool stopped() const { return trajectory_.stopped_early; }

 private:
  void record_sample();
  void take_snapshot();
  double next_event_time() const;

  ModelParams params_;
  Grid grid_;
  Controls controls_;
  Bounds bounds_;
  StepContext context_;
  SolverState state_;
  Trajectory trajectory_;
  long next_sample_index_{1};
  std::size_t next_snapshot_{0};
  std::vector<double> snapshot_times_;
};

Trajectory run(const ModelParams& p, const InitialData& id, const Grid& grid,
               const Controls& controls);

}  // namespace bdtaxis
