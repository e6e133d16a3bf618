#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdtaxis/analysis.hpp"
#include "bdtaxis/certificates.hpp"
#include "bdtaxis/solver.hpp"

namespace bdtaxis {

// Reference solver in physical coordinates ---------------------------------

struct MovingMeshControls {
  double t_max{10.0};
  double sample_dt{0.1};
  std::vector<double> snapshot_times;
  std::optional<double> dx;  ///< defaults to h0/100
  double cfl{0.2};           ///< dt <= cfl*dx^2/max(1, d)
  double advection_cfl{0.4};
  double dt_max{1e-3};
  double react_cap{0.2};
  std::optional<Tolerances> tolerances;
  ValidationOptions validation{};
  TestHooks hooks{};
};

/// Explicit finite volumes on the fixed nodes x_j = j*dx inside [0, h(t)].
///
/// Nodes with x_j <= h - dx/2 are active. The last active cell is closed by
/// the Dirichlet value at the front, giving the Shortley-Weller stencil; the
/// node or nodes between it and the front, if any, are passive and carry the
/// linear interpolant to zero. A node entering the domain starts at zero.
/// The front moves with the slope of the quadratic through the last two active
/// nodes and (h, 0).
Trajectory run_moving_mesh(const ModelParams& p, const InitialData& id,
                           const MovingMeshControls& controls);

// Comparison principle ----------------------------------------------------

/// Two configurations run on the same grid and sample times. The lower one is
/// expected to stay below the upper one in h and in v.
struct OrderedPair {
  ModelParams lower_params;
  InitialData lower_data;
  TestHooks lower_hooks{};
  ModelParams upper_params;
  InitialData upper_data;
  TestHooks upper_hooks{};
};

/// Lower: the given configuration. Upper: the same prey alone (u0 = 0).
OrderedPair single_species_majorant(const ModelParams& p, const InitialData& id);

struct OrderingReport {
  bool pass{false};
  double tol{0.0};
  /// Smallest slack h_u(1+tol) - h_l and v_u + tol*M2 - v_l seen; negative means violated.
  double h_slack{0.0};
  double v_slack{0.0};
  double h_slack_time{0.0};
  double v_slack_time{0.0};
  std::size_t samples_checked{0};
};

/// Throws InvalidInput when v0 or h0 of the pair are not ordered.
OrderingReport comparison_test(const OrderedPair& pair, const Grid& grid,
                               const Controls& controls, double tol = 1e-3);

// Vanishing supersolution ----------------------------------------------------

struct SupersolutionReport {
  bool pass{false};
  VanishingCertificate cert;
  double max_v_ratio{0.0};     ///< max v / vbar over all samples and nodes
  double max_h_ratio{0.0};     ///< max h / beta
  double envelope_excess{0.0}; ///< max of log max_v + alpha t - log Mcap
  double h_end{0.0};
  double h_limit{0.0};         ///< h0 (1 + delta)
  double tol{0.0};
  Trajectory trajectory;
};

/// Runs the front-fixed solver and checks v <= vbar(1+tol) with
/// vbar = Mcap e^{-alpha t} cos(pi x / (2 beta)), beta = h0(1 + delta - delta/2 e^{-alpha t}),
/// together with h <= beta(1+tol) and the decay envelope. Throws NotApplicable
/// when the certificate does not exist or mu exceeds mu0.
SupersolutionReport barrier_supersolution_test(const ModelParams& p, const InitialData& id,
                                               const Grid& grid, const Controls& controls,
                                               double tol = 1e-3);

// Predator decay -----------------------------------------------------------------

struct DecayReport {
  bool pass{false};
  bool reached{false};     ///< the smallness regime was entered
  bool trivial{false};     ///< max_u vanished identically
  double epsilon{0.0};     ///< a / (2 (1 + chi0))
  double T{0.0};
  double rate{0.0};        ///< fitted decay rate of max_u after T
  double required_rate{0.0};
  double envelope_ratio{0.0};  ///< max of max_u / (M1 e^{-(a/2)(t-T)})
  std::size_t fitted_samples{0};
};

/// T is the first sample from which b max_v / c <= eps and max_vxx <= eps hold
/// for the rest of the run.
DecayReport predator_decay_test(const Trajectory& traj, const Certificates& certs,
                                const ModelParams& p, double tol = 0.2);

// Heat-equation eigenmode -------------------------------------------------------

enum class SolverKind { FrontFixed, MovingMesh };

struct EigenmodeReport {
  bool pass{false};
  double expected_rate{0.0};  ///< d (pi / (2 h0))^2
  double measured_rate{0.0};  ///< ln 2 / t_half
  double t_half{0.0};
  double relative_error{0.0};
};

/// Frozen front, reactions off, u0 = 0 and v0 = cos(pi x / (2 h0)).
EigenmodeReport eigenmode_decay_test(const ModelParams& p, int N, SolverKind kind,
                                     double tol = 0.02);

// Cross-solver agreement --------------------------------------------------------

struct AgreementLevel {
  int N{0};
  double dx{0.0};
  double dt_max{0.0};
  double h_front_fixed{0.0};
  double h_moving_mesh{0.0};
  double v_front_fixed{0.0};
  double v_moving_mesh{0.0};
  double h_rel_diff{0.0};
  double v_rel_diff{0.0};
};

struct AgreementReport {
  bool pass{false};
  double tol{0.0};
  AgreementLevel coarse;
  AgreementLevel fine;
  double h_order{0.0};  ///< log2 of the coarse/fine discrepancy ratio
  double v_order{0.0};
};

/// Compares h(t_max) and max_v(t_max) of both solvers at (N, dx) and at
/// (2N, dx/2) with dt_max halved.
AgreementReport agreement_test(const ModelParams& p, const InitialData& id, int N,
                               const Controls& controls, double dx, double tol = 0.03,
                               double min_order = 1.0);

}  // namespace bdtaxis
