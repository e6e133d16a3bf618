#pragma once

#include <istream>
#include <string>
#include <vector>

#include "bdtaxis/errors.hpp"
#include "bdtaxis/model.hpp"
#include "bdtaxis/solver.hpp"

namespace bdtaxis {

class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct InitialSpec {
  std::string family{"cosine"};  ///< "cosine" or "samples"
  double U{0.5};
  double V{0.5};
  std::vector<double> u0_samples;  ///< uniform on [0, h0], endpoints included
  std::vector<double> v0_samples;
};

struct NumericsSpec {
  int N{400};
  double cfl{0.4};
  double dt_max{1e-3};
  double t_max{200.0};
  double sample_dt{0.1};
  double react_cap{0.2};
  std::vector<double> snapshot_times;  ///< empty means {0, t_max}; times past t_max are dropped
};

struct OutputSpec {
  std::string directory{"out"};
  std::vector<std::string> formats{"trajectory", "snapshots", "manifest"};

  bool wants(const std::string& what) const;
};

/// Resolved configuration: [model] has no defaults, every other key does.
struct RunConfig {
  ModelParams model;
  InitialSpec initial;
  NumericsSpec numerics;
  OutputSpec output;

  InitialData initial_data() const;
  Grid grid() const;
  Controls controls() const;
  std::vector<double> snapshot_times() const;

  /// Every resolved key as "section.key = value" lines, in a fixed order.
  std::string echo() const;
};

/// Model keys in canonical order.
const std::vector<std::string>& model_keys();

/// Sets one [model] field by name; throws ConfigError for unknown names.
void set_model_param(ModelParams& p, const std::string& name, double value);
double get_model_param(const ModelParams& p, const std::string& name);

/// Parses the INI-style document. Each override is "section.key=value" and is
/// applied before resolution, so it may also supply a missing key.
RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace bdtaxis
