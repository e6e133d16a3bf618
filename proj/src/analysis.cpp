#include "bdtaxis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "bdtaxis/errors.hpp"

namespace bdtaxis {

const char* to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Spreading:
      return "Spreading";
    case VerdictKind::Vanishing:
      return "Vanishing";
    case VerdictKind::Undetermined:
      break;
  }
  return "Undetermined";
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInput("fit_line needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("fit_line needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

SpeedEstimate estimate_speed(const Trajectory& traj, double barrier) {
  if (traj.samples.empty() || !(traj.samples.back().h > barrier))
    throw NotApplicable("speed estimate needs a trajectory that crossed the barrier");
  const double t_from = 0.5 * traj.t_end();
  std::vector<double> t, h;
  for (const Sample& s : traj.samples) {
    if (s.t < t_from) continue;
    t.push_back(s.t);
    h.push_back(s.h);
  }
  if (t.size() < 3) throw NotApplicable("too few samples in the final half for a speed fit");
  const LineFit fit = fit_line(t, h);
  SpeedEstimate est;
  est.k = fit.slope;
  est.residual = fit.residual;
  est.relative_residual = fit.residual / traj.samples.back().h;
  est.t_from = t_from;
  return est;
}

Verdict classify(const Trajectory& traj, const Certificates& certs,
                 const ClassifyTolerances& tol) {
  if (traj.samples.size() < 2 || !(traj.t_end() > 0.0))
    throw InvalidInput("trajectory too short to classify");
  const double eps_v = tol.eps_v.value_or(1e-4 * certs.bounds.M2);
  const double eps_u = tol.eps_u.value_or(1e-4 * certs.bounds.M2);
  const double eps_h = tol.eps_h.value_or(1e-5 * certs.bounds.M3);
  const double threshold = certs.barrier * (1.0 + tol.eps_margin);

  Verdict v;
  v.h_end = traj.samples.back().h;
  for (const Sample& s : traj.samples) {
    if (s.h > threshold) {
      v.crossing_time = s.t;
      break;
    }
  }

  v.window_start = traj.t_end() * (1.0 - tol.window_fraction);
  std::size_t in_window = 0;
  for (const Sample& s : traj.samples) {
    if (s.t < v.window_start) continue;
    ++in_window;
    v.trailing_max_u = std::max(v.trailing_max_u, s.max_u);
    v.trailing_max_v = std::max(v.trailing_max_v, s.max_v);
    v.trailing_max_hprime = std::max(v.trailing_max_hprime, s.hprime);
  }

  if (v.crossing_time) {
    v.kind = VerdictKind::Spreading;
    if (!traj.stopped_early) {
      try {
        v.speed = estimate_speed(traj, threshold);
      } catch (const NotApplicable& e) {
        v.note = e.what();
      }
    }
    return v;
  }
  if (in_window < 2) throw InvalidInput("trajectory too short: trailing window holds < 2 samples");
  if (v.trailing_max_v < eps_v && v.trailing_max_u < eps_u && v.trailing_max_hprime < eps_h) {
    v.kind = VerdictKind::Vanishing;
    v.h_infinity = v.h_end;
    return v;
  }
  v.kind = VerdictKind::Undetermined;
  v.note = "neither the barrier crossing nor the trailing smallness signature was observed; "
           "raise t_max";
  return v;
}

Probe probe_mu(const ModelParams& p, const InitialData& id, const Grid& grid,
               const Controls& controls, double mu, const BisectOptions& options) {
  ModelParams q = p;
  q.mu = mu;
  const Certificates certs = compute_certificates(q, id);
  Controls c = controls;
  c.stop_above_h = certs.barrier * (1.0 + options.tolerances.eps_margin);
  Simulation sim(q, id, grid, c);
  double t_end = c.t_max;
  Probe probe{mu, {}, 0.0};
  for (int ext = 0;; ++ext) {
    sim.advance_to(t_end);
    probe.verdict = classify(sim.trajectory(), certs, options.tolerances);
    probe.t_end = sim.state().t;
    if (probe.verdict.kind != VerdictKind::Undetermined || ext >= options.max_extensions) break;
    t_end *= 2.0;
  }
  return probe;
}

BisectionResult bisect_mu_star(const ModelParams& p, const InitialData& id, const Grid& grid,
                               const Controls& controls, std::pair<double, double> bracket,
                               const BisectOptions& options) {
  auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("bisection bracket must satisfy 0 < lo < hi");
  auto probe = [&](double mu) { return probe_mu(p, id, grid, controls, mu, options); };
  auto require_definite = [](const Probe& pr) {
    if (pr.verdict.kind == VerdictKind::Undetermined) {
      std::ostringstream os;
      os << "undetermined verdict at mu = " << pr.mu << " after t = " << pr.t_end;
      throw BisectionError(BisectionError::Kind::UndeterminedProbe, pr.mu, os.str());
    }
  };

  BisectionResult result;
  Probe left, right;
  if (options.parallel_ends) {
    auto f = std::async(std::launch::async, probe, hi);
    left = probe(lo);
    right = f.get();
  } else {
    left = probe(lo);
    right = probe(hi);
  }
  result.probes = {left, right};
  require_definite(left);
  require_definite(right);
  if (left.verdict.kind == right.verdict.kind) {
    std::ostringstream os;
    os << "both bracket ends are " << to_string(left.verdict.kind) << " (mu = " << lo << ", "
       << hi << ")";
    throw BisectionError(BisectionError::Kind::SameVerdict, lo, os.str());
  }
  if (left.verdict.kind != VerdictKind::Vanishing) {
    std::ostringstream os;
    os << "bracket is reversed: mu = " << lo << " spreads while mu = " << hi << " vanishes";
    throw BisectionError(BisectionError::Kind::ReversedBracket, lo, os.str());
  }

  for (int it = 0; it < options.iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    Probe pr = probe(mid);
    result.probes.push_back(pr);
    require_definite(pr);
    (pr.verdict.kind == VerdictKind::Spreading ? hi : lo) = mid;
  }
  result.mu_lo = lo;
  result.mu_hi = hi;
  return result;
}

BandReport band_check(const Trajectory& traj, const Certificates& certs, double q,
                      const BandOptions& options) {
  BandReport r;
  r.window_start = traj.t_end() * (1.0 - options.window_fraction);
  r.lower = options.floor.value_or(certs.band_floor) - options.tol;
  r.upper = q + options.tol;
  r.v_min = std::numeric_limits<double>::infinity();
  r.v_max = -std::numeric_limits<double>::infinity();
  for (const Snapshot& snap : traj.snapshots) {
    if (snap.t < r.window_start) continue;
    const PhysicalProfiles& prof = snap.profiles;
    if (!(options.x_obs < prof.x.back())) {
      std::ostringstream os;
      os << "observation interval [0, " << options.x_obs << "] exits the domain [0, "
         << prof.x.back() << "] at t = " << snap.t;
      throw InvalidInput(os.str());
    }
    for (std::size_t j = 0; j < prof.x.size() && prof.x[j] <= options.x_obs; ++j) {
      r.v_min = std::min(r.v_min, prof.v[j]);
      r.v_max = std::max(r.v_max, prof.v[j]);
    }
    ++r.snapshots_checked;
  }
  if (r.snapshots_checked == 0) throw InvalidInput("no snapshots inside the trailing window");
  r.pass = r.v_min >= r.lower && r.v_max <= r.upper;
  return r;
}

}  // namespace bdtaxis
