#include "bdtaxis/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "bdtaxis/errors.hpp"

namespace bdtaxis {

namespace fs = std::filesystem;

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,h,hprime,max_u,max_v,mass_u,mass_v,zy1\n";
  for (const Sample& s : traj.samples) {
    os << csv_number(s.t) << ',' << csv_number(s.h) << ',' << csv_number(s.hprime) << ','
       << csv_number(s.max_u) << ',' << csv_number(s.max_v) << ',' << csv_number(s.mass_u) << ','
       << csv_number(s.mass_v) << ',' << csv_number(s.zy1) << '\n';
  }
}

void write_snapshot_csv(std::ostream& os, const PhysicalProfiles& p) {
  os << "x,u,v\n";
  for (std::size_t j = 0; j < p.x.size(); ++j)
    os << csv_number(p.x[j]) << ',' << csv_number(p.u[j]) << ',' << csv_number(p.v[j]) << '\n';
}

std::string snapshot_filename(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_t%.10g.csv", t);
  return buf;
}

std::string certificates_report(const Certificates& c) {
  std::ostringstream os;
  os << "M1 = " << format_double(c.bounds.M1) << '\n'
     << "M2 = " << format_double(c.bounds.M2) << '\n'
     << "M3 = " << format_double(c.bounds.M3) << '\n'
     << "K = " << format_double(c.bounds.K) << '\n'
     << "barrier = " << format_double(c.barrier) << '\n'
     << "band_floor = " << format_double(c.band_floor) << '\n';
  if (c.vanishing) {
    os << "delta = " << format_double(c.vanishing->delta) << '\n'
       << "alpha = " << format_double(c.vanishing->alpha) << '\n'
       << "Mcap = " << format_double(c.vanishing->Mcap) << '\n'
       << "mu0 = " << format_double(c.vanishing->mu0) << '\n';
  } else {
    os << "mu0 = not applicable (" << c.vanishing_reason << ")\n";
  }
  if (c.mu_upper)
    os << "mu_upper = " << format_double(*c.mu_upper) << '\n';
  else
    os << "mu_upper = not applicable (" << c.spreading_reason << ")\n";
  return os.str();
}

std::string verdict_report(const Verdict& v) {
  std::ostringstream os;
  os << "kind = " << to_string(v.kind) << '\n';
  if (v.crossing_time) os << "crossing_time = " << format_double(*v.crossing_time) << '\n';
  os << "window_start = " << format_double(v.window_start) << '\n'
     << "trailing_max_u = " << format_double(v.trailing_max_u) << '\n'
     << "trailing_max_v = " << format_double(v.trailing_max_v) << '\n'
     << "trailing_max_hprime = " << format_double(v.trailing_max_hprime) << '\n'
     << "h_end = " << format_double(v.h_end) << '\n';
  if (v.h_infinity) os << "h_infinity = " << format_double(*v.h_infinity) << '\n';
  if (v.speed) {
    os << "speed_k = " << format_double(v.speed->k) << '\n'
       << "speed_residual = " << format_double(v.speed->residual) << '\n'
       << "speed_relative_residual = " << format_double(v.speed->relative_residual) << '\n';
  }
  if (!v.note.empty()) os << "note = " << v.note << '\n';
  return os.str();
}

std::vector<double> parse_value_grid(const std::string& spec) {
  auto number = [&](const std::string& s) {
    std::istringstream is(s);
    double x = 0.0;
    if (!(is >> x) || !(is >> std::ws).eof()) throw ConfigError("bad value '" + s + "' in grid");
    return x;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("range grid must be lo:hi:n");
    const double lo = number(parts[0]);
    const double hi = number(parts[1]);
    const double n = number(parts[2]);
    if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError("range grid needs an integer n >= 1");
    const int count = static_cast<int>(n);
    for (int i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::string s = spec;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  for (std::string item; is >> item;) out.push_back(number(item));
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << content;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

bool occupied(const fs::path& dir) {
  return fs::exists(dir) && (!fs::is_directory(dir) || !fs::is_empty(dir));
}

Verdict classify_or_note(const Trajectory& traj, const Certificates& certs) {
  try {
    return classify(traj, certs);
  } catch (const InvalidInput& e) {
    Verdict v;
    v.h_end = traj.samples.empty() ? 0.0 : traj.samples.back().h;
    v.note = e.what();
    return v;
  }
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out,
                 std::ostream& err) {
  const fs::path dir = opt.out_dir.value_or(cfg.output.directory);
  if (occupied(dir) && !opt.force) {
    err << "output directory " << dir.string() << " is not empty; pass --force to overwrite\n";
    return exit_code::output_exists;
  }
  Trajectory traj;
  Certificates certs;
  try {
    const InitialData id = cfg.initial_data();
    Controls controls = cfg.controls();
    controls.hooks = opt.hooks;
    require_valid(cfg.model, id, controls.validation);
    certs = compute_certificates(cfg.model, id);
    traj = run(cfg.model, id, cfg.grid(), controls);
  } catch (const InvalidInput& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return exit_code::config;
  } catch (const InstabilityDetected& e) {
    err << "instability: " << e.what() << '\n';
    return exit_code::instability;
  }
  const Verdict verdict = classify_or_note(traj, certs);

  if (opt.force && fs::exists(dir) && fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name == "trajectory.csv" || name == "manifest.txt" || name.rfind("snapshot_t", 0) == 0)
        fs::remove(entry.path());
    }
  }
  fs::create_directories(dir);
  if (cfg.output.wants("trajectory")) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    write_file(dir / "trajectory.csv", os.str());
  }
  if (cfg.output.wants("snapshots")) {
    for (const Snapshot& s : traj.snapshots) {
      std::ostringstream os;
      write_snapshot_csv(os, s.profiles);
      write_file(dir / snapshot_filename(s.t), os.str());
    }
  }
  if (cfg.output.wants("manifest")) {
    std::ostringstream os;
    os << "[config]\n" << cfg.echo() << "\n[certificates]\n" << certificates_report(certs)
       << "\n[verdict]\n" << verdict_report(verdict) << "\n[run]\n"
       << "steps = " << traj.steps << '\n'
       << "dt_min = " << format_double(traj.dt_min) << '\n'
       << "dt_max = " << format_double(traj.dt_max) << '\n'
       << "samples = " << traj.samples.size() << '\n'
       << "snapshots = " << traj.snapshots.size() << '\n'
       << "t_end = " << format_double(traj.t_end()) << '\n';
    write_file(dir / "manifest.txt", os.str());
  }
  out << "wrote " << dir.string() << " (" << traj.samples.size() << " samples, "
      << traj.snapshots.size() << " snapshots), verdict " << to_string(verdict.kind) << '\n';
  return exit_code::ok;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const InitialData id = cfg.initial_data();
    const Certificates certs = compute_certificates(cfg.model, id);
    Controls controls = cfg.controls();
    controls.snapshot_times.clear();
    const Trajectory traj = run(cfg.model, id, cfg.grid(), controls);
    const Verdict v = classify(traj, certs);
    out << "verdict: " << to_string(v.kind) << '\n';
    if (v.kind == VerdictKind::Vanishing)
      out << "h_infinity: " << format_double(*v.h_infinity) << " (barrier "
          << format_double(certs.barrier) << ")\n";
    if (v.kind == VerdictKind::Spreading && v.speed)
      out << "speed k: " << format_double(v.speed->k) << '\n';
    if (v.kind == VerdictKind::Undetermined)
      out << "undetermined at t_max = " << format_double(cfg.numerics.t_max)
          << "; raise numerics.t_max (e.g. --set numerics.t_max="
          << format_double(2.0 * cfg.numerics.t_max) << ")\n";
    out << "\n[verdict]\n" << verdict_report(v) << "\n[certificates]\n"
        << certificates_report(certs);
  } catch (const InvalidInput& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return exit_code::config;
  } catch (const InstabilityDetected& e) {
    err << "instability: " << e.what() << '\n';
    return exit_code::instability;
  }
  return exit_code::ok;
}

int cmd_sweep(const RunConfig& cfg, const SweepOptions& opt, std::ostream& out,
              std::ostream& err) {
  try {
    (void)get_model_param(cfg.model, opt.param);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return exit_code::config;
  }
  if (opt.values.empty()) {
    err << "sweep grid is empty\n";
    return exit_code::config;
  }
  const fs::path dir = opt.out_dir.value_or(cfg.output.directory);
  if (fs::exists(dir / "phase.csv") && !opt.force) {
    err << (dir / "phase.csv").string() << " exists; pass --force to overwrite\n";
    return exit_code::output_exists;
  }

  struct Row {
    std::string verdict;
    double h_end{0.0};
    double k_or_hinf{0.0};
    int code{exit_code::ok};
  };
  std::vector<Row> rows(opt.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      Row& row = rows[i];
      RunConfig point = cfg;
      set_model_param(point.model, opt.param, opt.values[i]);
      try {
        const InitialData id = point.initial_data();
        const Certificates certs = compute_certificates(point.model, id);
        Controls controls = point.controls();
        controls.snapshot_times.clear();
        const Trajectory traj = run(point.model, id, point.grid(), controls);
        const Verdict v = classify(traj, certs);
        row.verdict = to_string(v.kind);
        row.h_end = v.h_end;
        row.k_or_hinf = v.h_infinity ? *v.h_infinity
                        : v.speed    ? v.speed->k
                                     : std::numeric_limits<double>::quiet_NaN();
      } catch (const InstabilityDetected&) {
        row.verdict = "Unstable";
        row.k_or_hinf = row.h_end = std::numeric_limits<double>::quiet_NaN();
        row.code = exit_code::instability;
      } catch (const InvalidInput&) {
        row.verdict = "Invalid";
        row.k_or_hinf = row.h_end = std::numeric_limits<double>::quiet_NaN();
        row.code = exit_code::config;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "param_value,verdict,h_end,k_or_hinf\n";
  int code = exit_code::ok;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << csv_number(opt.values[i]) << ',' << rows[i].verdict << ',' << csv_number(rows[i].h_end)
        << ',' << csv_number(rows[i].k_or_hinf) << '\n';
    out << opt.param << " = " << format_double(opt.values[i]) << ": " << rows[i].verdict << '\n';
    if (rows[i].code != exit_code::ok) code = rows[i].code;
  }
  fs::create_directories(dir);
  write_file(dir / "phase.csv", csv.str());
  out << "wrote " << (dir / "phase.csv").string() << '\n';
  return code;
}

int cmd_bisect(const RunConfig& cfg, const BisectCliOptions& opt, std::ostream& out,
               std::ostream& err) {
  try {
    const InitialData id = cfg.initial_data();
    const Certificates certs = compute_certificates(cfg.model, id);
    if ((!opt.lo && !certs.vanishing) || (!opt.hi && !certs.mu_upper)) {
      err << "certificate bracket unavailable (" << certs.vanishing_reason
          << (certs.vanishing_reason.empty() ? "" : "; ") << certs.spreading_reason
          << "); pass --lo and --hi\n";
      return exit_code::config;
    }
    const double lo = opt.lo.value_or(certs.vanishing ? certs.vanishing->mu0 : 0.0);
    const double hi = opt.hi.value_or(certs.mu_upper.value_or(0.0));
    if (certs.vanishing && certs.mu_upper)
      out << "certificate bracket: [" << format_double(certs.vanishing->mu0) << ", "
          << format_double(*certs.mu_upper) << "]\n";
    BisectOptions bo;
    bo.iterations = opt.iterations;
    bo.max_extensions = opt.max_extensions;
    bo.parallel_ends = opt.jobs > 1;
    Controls controls = cfg.controls();
    controls.snapshot_times.clear();
    const BisectionResult r = bisect_mu_star(cfg.model, id, cfg.grid(), controls, {lo, hi}, bo);
    for (const Probe& p : r.probes)
      out << "probe mu = " << format_double(p.mu) << ": " << to_string(p.verdict.kind)
          << " (t_end " << format_double(p.t_end) << ")\n";
    out << "mu_lo = " << format_double(r.mu_lo) << '\n'
        << "mu_hi = " << format_double(r.mu_hi) << '\n'
        << "width = " << format_double(r.mu_hi - r.mu_lo) << '\n';
  } catch (const BisectionError& e) {
    err << "bisection failed: " << e.what() << '\n';
    return e.kind() == BisectionError::Kind::UndeterminedProbe ? exit_code::undetermined
                                                              : exit_code::bracket;
  } catch (const InvalidInput& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return exit_code::config;
  } catch (const InstabilityDetected& e) {
    err << "instability: " << e.what() << '\n';
    return exit_code::instability;
  }
  return exit_code::ok;
}

int cmd_verify(const RunConfig& cfg, const VerifyOptions& opt, std::ostream& out,
               std::ostream& err) {
  struct Check {
    std::string name;
    bool pass{false};
    std::string detail;
  };
  std::vector<Check> checks;
  auto num = [](double x) { return format_double(x); };
  try {
    const ModelParams& p = cfg.model;
    const InitialData id = cfg.initial_data();
    require_valid(p, id);
    const Grid grid = cfg.grid();
    Controls base = cfg.controls();
    base.snapshot_times.clear();
    base.hooks = opt.hooks;

    for (auto kind : {SolverKind::FrontFixed, SolverKind::MovingMesh}) {
      const EigenmodeReport r = eigenmode_decay_test(p, 200, kind);
      checks.push_back({kind == SolverKind::FrontFixed ? "eigenmode_front_fixed"
                                                       : "eigenmode_moving_mesh",
                        r.pass,
                        "expected rate " + num(r.expected_rate) + ", measured " +
                            num(r.measured_rate) + ", relative error " +
                            num(r.relative_error)});
    }

    Controls horizon = base;
    horizon.t_max = opt.horizon;
    {
      OrderedPair pair = single_species_majorant(p, id);
      pair.lower_hooks = opt.hooks;
      const OrderingReport r = comparison_test(pair, grid, horizon);
      checks.push_back({"comparison_single_species", r.pass,
                        "worst h slack " + num(r.h_slack) + " at t=" + num(r.h_slack_time) +
                            ", worst v slack " + num(r.v_slack) + " at t=" +
                            num(r.v_slack_time)});
    }
    {
      OrderedPair pair;
      pair.lower_params = pair.upper_params = p;
      pair.lower_data = {id.u0, id.v0.scaled(0.5)};
      pair.upper_data = id;
      pair.lower_hooks = pair.upper_hooks = opt.hooks;
      Controls c = horizon;
      c.t_max = std::min(opt.horizon, 10.0);
      const OrderingReport r = comparison_test(pair, grid, c);
      checks.push_back({"comparison_scaled_prey", r.pass,
                        "worst h slack " + num(r.h_slack) + ", worst v slack " +
                            num(r.v_slack)});
    }
    {
      const AgreementReport r = agreement_test(p, id, cfg.numerics.N, horizon, p.h0 / 100.0);
      checks.push_back({"cross_solver_agreement", r.pass,
                        "h diff " + num(r.coarse.h_rel_diff) + " -> " + num(r.fine.h_rel_diff) +
                            " (order " + num(r.h_order) + "), max_v diff " +
                            num(r.coarse.v_rel_diff) + " -> " + num(r.fine.v_rel_diff) +
                            " (order " + num(r.v_order) + ")"});
    }
    const Certificates certs = compute_certificates(p, id);
    if (certs.vanishing) {
      ModelParams q = p;
      q.mu = 0.9 * certs.vanishing->mu0;
      Controls c = base;
      c.t_max = opt.vanishing_horizon;
      const SupersolutionReport r = barrier_supersolution_test(q, id, grid, c);
      checks.push_back({"barrier_supersolution", r.pass,
                        "max v/vbar " + num(r.max_v_ratio) + ", max h/beta " +
                            num(r.max_h_ratio) + ", envelope excess " +
                            num(r.envelope_excess) + ", h_end " + num(r.h_end) + " <= " +
                            num(r.h_limit)});
      const Certificates cq = compute_certificates(q, id);
      const Verdict v = classify(r.trajectory, cq);
      const DecayReport d = predator_decay_test(r.trajectory, cq, q);
      checks.push_back({"predator_decay", v.kind == VerdictKind::Vanishing && d.pass,
                        std::string("verdict ") + to_string(v.kind) + ", T " + num(d.T) +
                            ", rate " + num(d.rate) + " >= " + num(d.required_rate) +
                            ", envelope ratio " + num(d.envelope_ratio)});
    } else {
      checks.push_back({"barrier_supersolution", true,
                        "skipped: " + certs.vanishing_reason});
    }
  } catch (const std::exception& e) {
    for (const Check& c : checks) out << (c.pass ? "PASS " : "FAIL ") << c.name << '\n';
    err << "oracle error: " << e.what() << '\n';
    return exit_code::instability;
  }
  bool all = true;
  for (const Check& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (opt.verbose) out << ": " << c.detail;
    out << '\n';
    all = all && c.pass;
  }
  return all ? exit_code::ok : exit_code::check_failed;
}

}  // namespace bdtaxis
