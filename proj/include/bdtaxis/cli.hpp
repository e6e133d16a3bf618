#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bdtaxis/analysis.hpp"
#include "bdtaxis/config.hpp"
#include "bdtaxis/oracle.hpp"

namespace bdtaxis {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int config = 2;
inline constexpr int instability = 3;
inline constexpr int output_exists = 4;
inline constexpr int bracket = 5;
inline constexpr int undetermined = 6;
}  // namespace exit_code

struct SimulateOptions {
  std::optional<std::string> out_dir;  ///< overrides [output] directory
  bool force{false};
  TestHooks hooks{};
};

struct SweepOptions {
  std::string param;
  std::vector<double> values;
  std::optional<std::string> out_dir;
  bool force{false};
  int jobs{1};
};

struct BisectCliOptions {
  std::optional<double> lo;  ///< defaults to the vanishing certificate mu0
  std::optional<double> hi;  ///< defaults to the spreading certificate mu^0
  int iterations{8};
  int max_extensions{3};
  int jobs{1};
};

struct VerifyOptions {
  bool verbose{false};
  double horizon{10.0};            ///< comparison and cross-solver runs
  double vanishing_horizon{60.0};  ///< supersolution and predator decay runs
  TestHooks hooks{};
};

int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out,
                 std::ostream& err);
int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, const SweepOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bisect(const RunConfig& cfg, const BisectCliOptions& opt, std::ostream& out,
               std::ostream& err);
int cmd_verify(const RunConfig& cfg, const VerifyOptions& opt, std::ostream& out,
               std::ostream& err);

// Serialization ------------------------------------------------------------

/// 17 significant digits.
std::string csv_number(double x);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_snapshot_csv(std::ostream& os, const PhysicalProfiles& profiles);
std::string snapshot_filename(double t);

/// "key = value" lines for the report sections.
std::string certificates_report(const Certificates& certs);
std::string verdict_report(const Verdict& verdict);

/// "a,b,c" or "lo:hi:n" (n evenly spaced points, endpoints included).
std::vector<double> parse_value_grid(const std::string& spec);

}  // namespace bdtaxis
