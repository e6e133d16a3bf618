#pragma once

#include "bdtaxis/model.hpp"

namespace fixtures {

/// Reference kinetics used throughout the suite.
inline bdtaxis::ModelParams reference() { return {0.3, 1, 1, 1, 1, 1, 1, 2, 1, 0.5, 2}; }

inline bdtaxis::InitialData cosine_data(double U, double V, double h0) {
  return {U == 0.0 ? bdtaxis::Profile::zero(h0) : bdtaxis::Profile::cosine(U, h0),
          bdtaxis::Profile::cosine(V, h0)};
}

}  // namespace fixtures
