#include "bdtaxis/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <utility>

#include "bdtaxis/errors.hpp"

namespace bdtaxis {

double ModelParams::chi_lipschitz() const {
  // chi'' = -4 chi0 (1 - 3 s^2) / u_m^2 on [0, u_m); |1 - 3 s^2| peaks at s -> 1.
  return 8.0 * chi0 / (u_m * u_m);
}

Profile::Profile(double length, Fn value, Fn derivative, std::string description)
    : length_(length),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      description_(std::move(description)) {}

Profile Profile::cosine(double amplitude, double length) {
  const double k = std::numbers::pi / (2.0 * length);
  std::ostringstream os;
  os << "cosine(amplitude=" << amplitude << ")";
  return Profile(
      length, [=](double x) { return amplitude * std::cos(k * x); },
      [=](double x) { return -amplitude * k * std::sin(k * x); }, os.str());
}

Profile Profile::zero(double length) {
  return Profile(
      length, [](double) { return 0.0; }, [](double) { return 0.0; }, "zero");
}

Profile Profile::sampled(std::vector<double> values, double length) {
  if (values.size() < 3) throw InvalidInput("sampled profile needs at least 3 samples");
  const auto n = static_cast<double>(values.size() - 1);
  const double dx = length / n;
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  auto value = [shared, dx, n](double x) {
    const auto& f = *shared;
    const double s = std::clamp(x / dx, 0.0, n);
    const auto j = std::min(static_cast<std::size_t>(s), f.size() - 2);
    const double frac = s - static_cast<double>(j);
    return f[j] + frac * (f[j + 1] - f[j]);
  };
  auto derivative = [shared, dx, n](double x) {
    const auto& f = *shared;
    const std::size_t last = f.size() - 1;
    const double s = std::clamp(x / dx, 0.0, n);
    const auto j = static_cast<std::size_t>(std::lround(s));
    if (j == 0) return 0.0;
    if (j >= last) return (3.0 * f[last] - 4.0 * f[last - 1] + f[last - 2]) / (2.0 * dx);
    return (f[j + 1] - f[j - 1]) / (2.0 * dx);
  };
  std::ostringstream os;
  os << "samples(n=" << shared->size() << ")";
  return Profile(length, value, derivative, os.str());
}

Profile Profile::scaled(double factor) const {
  auto value = value_;
  auto derivative = derivative_;
  std::ostringstream os;
  os << factor << "*" << description_;
  return Profile(
      length_, [=](double x) { return factor * value(x); },
      [=](double x) { return factor * derivative(x); }, os.str());
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

namespace {

struct ProfileScan {
  double min{0.0};
  double max_abs{0.0};
  double max_abs_derivative{0.0};
};

ProfileScan scan(const Profile& f, double h0, int samples) {
  ProfileScan s;
  s.min = f(0.0);
  for (int i = 0; i <= samples; ++i) {
    const double x = h0 * i / samples;
    const double v = f(x);
    s.min = std::min(s.min, v);
    s.max_abs = std::max(s.max_abs, std::abs(v));
    s.max_abs_derivative = std::max(s.max_abs_derivative, std::abs(f.derivative(x)));
  }
  return s;
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_profile(const Profile& f, const std::string& name, double h0, bool allow_zero,
                   const ValidationOptions& opt, std::vector<std::string>& out) {
  if (!f.length() || std::abs(f.length() - h0) > 1e-12 * h0) {
    out.push_back(name + ": profile domain does not match h0");
    return;
  }
  const ProfileScan s = scan(f, h0, opt.samples);
  if (!std::isfinite(s.max_abs) || !std::isfinite(s.max_abs_derivative)) {
    out.push_back(name + ": non-finite values");
    return;
  }
  if (s.min < -opt.tolerance * std::max(s.max_abs, 1.0)) out.push_back(name + " >= 0 violated");
  if (s.max_abs == 0.0) {
    if (!allow_zero) out.push_back(name + " not identically zero violated");
    return;
  }
  if (std::abs(f(h0)) > opt.tolerance * s.max_abs)
    out.push_back(name + "(h0) = 0 violated (support condition)");
  const double slope_scale = std::max(s.max_abs / h0, s.max_abs_derivative);
  if (std::abs(f.derivative(0.0)) > opt.tolerance * slope_scale)
    out.push_back(name + "'(0) = 0 violated");
}

}  // namespace

ValidationReport validate(const ModelParams& p, const InitialData& id,
                          const ValidationOptions& options) {
  ValidationReport report;
  auto& out = report.violations;
  const std::pair<const char*, double> positive[] = {
      {"a", p.a}, {"b", p.b},   {"c", p.c},   {"m", p.m},   {"q", p.q},
      {"r", p.r}, {"d", p.d},   {"mu", p.mu}, {"h0", p.h0}, {"u_m", p.u_m}};
  for (const auto& [name, value] : positive)
    if (!finite_positive(value)) out.push_back(std::string(name) + " > 0 violated");
  if (!std::isfinite(p.chi0) || p.chi0 < 0.0) out.push_back("chi0 >= 0 violated");
  if (!finite_positive(p.h0)) return report;

  check_profile(id.u0, "u0", p.h0, options.allow_zero_predator, options, out);
  check_profile(id.v0, "v0", p.h0, false, options, out);

  if (id.v0.length() && id.v0.derivative(p.h0) >= 0.0) out.push_back("v0'(h0) < 0 violated");
  if (id.v0.length()) report.h_star = -p.mu * id.v0.derivative(p.h0);
  return report;
}

ValidationReport require_valid(const ModelParams& p, const InitialData& id,
                               const ValidationOptions& options) {
  ValidationReport report = validate(p, id, options);
  if (!report.ok()) throw InvalidInput("invalid configuration: " + report.summary());
  return report;
}

}  // namespace bdtaxis
