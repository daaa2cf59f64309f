#include "psfexp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace psf {

namespace {

constexpr Complex kI{0.0, 1.0};
// Largest accepted distance between consecutive continuity samples of a ray;
// a wrong branch would move the sample by about 2 pi.
constexpr double kMaxJump = 1.0;

void require_parameter(Complex lambda) {
  if (lambda == Complex{}) {
    throw Error(ErrorKind::invalid_argument, "lambda = 0 is not a parameter");
  }
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
    throw Error(ErrorKind::invalid_argument, "lambda must be finite");
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// log(1 + w), accurate for small |w|.
Complex log1p(Complex w) {
  const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  const double im = std::atan2(w.imag(), 1.0 + w.real());
  return {re, im};
}

}  // namespace

Complex principal_log(Complex w) {
  Complex z = std::log(w);
  if (z.imag() <= -kPi) z.imag(kPi);
  return z;
}

Complex eval_map(Complex lambda, Complex z) {
  require_parameter(lambda);
  if (z.real() > kOverflowRe) {
    throw Error(ErrorKind::overflow, "exp overflow at Re z = " + fmt(z.real()));
  }
  return lambda * std::exp(z);
}

Complex inverse_branch(Complex lambda, Complex w, Digit j) {
  require_parameter(lambda);
  if (w == Complex{}) {
    throw Error(ErrorKind::invalid_argument, "w = 0 is the omitted value and has no preimage");
  }
  return principal_log(w) - principal_log(lambda) + kI * (kTwoPi * static_cast<double>(j));
}

double strip_offset(Complex lambda, Complex z, Digit j) {
  return z.imag() + principal_log(lambda).imag() - kTwoPi * static_cast<double>(j);
}

double potential_map(double t) { return std::expm1(t); }

std::pair<std::size_t, double> initialization_depth(double t, const RayConfig& config) {
  std::size_t n = 0;
  while (t < config.t_cap) {
    const double next = std::expm1(t);
    if (!std::isfinite(next)) break;
    if (n == config.max_depth) {
      throw Error(ErrorKind::resource, "potential needs more than " +
                                           std::to_string(config.max_depth) +
                                           " pullback levels");
    }
    t = next;
    ++n;
  }
  return {n, t};
}

// ---------------------------------------------------------------------------

RayTracer::RayTracer(Complex lambda, ExternalAddress address, RayConfig config)
    : lambda_(lambda), address_(std::move(address)), config_(config) {
  require_parameter(lambda_);
  log_lambda_ = principal_log(lambda_);
  const std::size_t n = address_.preperiod_length() + address_.period_length();
  ExternalAddress a = address_;
  for (std::size_t m = 0; m < n; ++m) {
    rays_.push_back(a);
    a = shift(a);
  }
  samples_.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    samples_[m].emplace(config_.static_potential, static_point(m, config_.static_potential));
  }
}

std::size_t RayTracer::next(std::size_t m) const noexcept {
  return m + 1 < rays_.size() ? m + 1 : address_.preperiod_length();
}

Digit RayTracer::entry(std::size_t m, std::size_t n) const { return address_[m + n]; }

Complex RayTracer::pull(Complex w) const {
  if (w == Complex{}) {
    throw Error(ErrorKind::on_ray_collision,
                "singular value lies on the ray (pullback of w = 0) at address " +
                    to_string(address_));
  }
  return principal_log(w) - log_lambda_;
}

Complex RayTracer::static_point(std::size_t m, double t) const {
  std::vector<double> ts{t};
  while (ts.back() < config_.t_cap) {
    const double next = std::expm1(ts.back());
    if (!std::isfinite(next) || ts.size() > config_.max_depth) break;
    ts.push_back(next);
  }
  const std::size_t depth = ts.size() - 1;
  Complex z = ts[depth] - log_lambda_ + kI * (kTwoPi * static_cast<double>(entry(m, depth + 1)));
  for (std::size_t n = depth; n-- > 0;) {
    z = pull(z) + kI * (kTwoPi * static_cast<double>(entry(m, n + 1)));
  }
  return z;
}

Complex RayTracer::continued_point(std::size_t m, double t) {
  std::vector<double> ts{t};
  std::vector<std::size_t> ray{m};
  while (ts.back() < config_.static_potential) {
    if (ts.size() > config_.max_depth) {
      throw Error(ErrorKind::resource, "potential " + fmt(t) + " needs more than " +
                                           std::to_string(config_.max_depth) +
                                           " pullback levels");
    }
    ts.push_back(std::expm1(ts.back()));
    ray.push_back(next(ray.back()));
  }
  const std::size_t depth = ts.size() - 1;
  for (std::size_t i = depth; i-- > 1;) ensure(ray[i], ts[i]);

  Complex z = static_point(ray[depth], ts[depth]);
  for (std::size_t i = depth; i-- > 0;) {
    const Complex base = pull(z);
    const auto& ladder = samples_[ray[i]];
    const auto ref = ladder.lower_bound(ts[i]);
    const double target = ref->second.imag();
    const double j = std::round((target - base.imag()) / kTwoPi);
    z = base + kI * (kTwoPi * j);
  }
  return z;
}

void RayTracer::ensure(std::size_t m, double t) {
  // Keeps a sample within one ladder ratio above t; samples stay on the
  // geometric grid below static_potential unless a jump forces a finer step.
  auto& ladder = samples_[m];
  const double reach = t / config_.ladder_ratio;
  double step = config_.ladder_ratio;
  while (ladder.begin()->first > reach) {
    const double low = ladder.begin()->first;
    const Complex z_low = ladder.begin()->second;
    const double tn = low * step;
    const Complex z = continued_point(m, tn);
    if (std::abs(z - z_low) > kMaxJump && step < 1.0 - 1e-9) {
      step = std::sqrt(step);
      continue;
    }
    ladder.emplace(tn, z);
    step = config_.ladder_ratio;
  }
}

RayTrace RayTracer::trace(double t, std::size_t m) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::invalid_argument, "potential must be positive, got " + fmt(t));
  }
  if (m >= rays_.size()) {
    throw Error(ErrorKind::invalid_argument, "ray index out of range");
  }
  const auto [depth, t_n] = initialization_depth(t, config_);
  RayTrace out;
  out.lambda = lambda_;
  out.address = rays_[m];
  out.potential = t;
  out.depth = depth;
  if (t >= config_.static_potential) {
    out.point = static_point(m, t);
  } else {
    ensure(m, t);
    out.point = continued_point(m, t);
  }
  out.tail_error_bound = 2.0 * std::exp(-t_n) * (std::abs(log_lambda_) + config_.error_constant);
  return out;
}

RayTrace trace_dynamic_ray(Complex lambda, const ExternalAddress& s, double t,
                           const RayConfig& config) {
  if (!(t > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "potential must be positive, got " + fmt(t));
  }
  return RayTracer(lambda, s, config).trace(t);
}

Complex asymptotic_remainder(Complex lambda, const ExternalAddress& s, double t,
                             const RayConfig& config) {
  require_parameter(lambda);
  if (!(t >= config.static_potential)) {
    throw Error(ErrorKind::precondition, "remainder recursion needs t >= " +
                                             fmt(config.static_potential));
  }
  const Complex log_lambda = principal_log(lambda);
  std::vector<double> ts{t};
  while (ts.back() < config.t_cap) {
    const double next = std::expm1(ts.back());
    if (!std::isfinite(next) || ts.size() > config.max_depth) break;
    ts.push_back(next);
  }
  Complex r{};
  for (std::size_t n = ts.size() - 1; n-- > 0;) {
    const Complex c = -1.0 - log_lambda + kI * (kTwoPi * static_cast<double>(s[n + 2])) + r;
    r = log1p(std::exp(-ts[n]) * c);
  }
  return r;
}

// ---------------------------------------------------------------------------

SingularOrbit singular_orbit(Complex lambda, std::size_t n) {
  require_parameter(lambda);
  SingularOrbit orbit{lambda, {Complex{}}, {Complex{}}, false};
  const Complex inv = 1.0 / lambda;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex z = orbit.points.back();
    if (z.real() > kOverflowRe) {
      orbit.overflow = true;
      break;
    }
    const Complex next = lambda * std::exp(z);
    orbit.derivatives.push_back(next * (inv + orbit.derivatives.back()));
    orbit.points.push_back(next);
  }
  return orbit;
}

double preperiodicity_residual(Complex lambda, std::size_t l, std::size_t k) {
  const SingularOrbit orbit = singular_orbit(lambda, l + k);
  if (orbit.overflow) return std::numeric_limits<double>::infinity();
  return std::abs(orbit.points[l + k] - orbit.points[l]);
}

double preperiodicity_scale(Complex lambda, std::size_t l) {
  const SingularOrbit orbit = singular_orbit(lambda, l);
  if (orbit.overflow) return std::numeric_limits<double>::infinity();
  return 1.0 + std::abs(orbit.points[l]);
}

std::optional<std::pair<std::size_t, std::size_t>> smaller_shape(
    Complex lambda, std::size_t l, std::size_t k, double tolerance) {
  const SingularOrbit orbit = singular_orbit(lambda, l + k);
  for (std::size_t kk = 1; kk <= k; ++kk) {
    if (k % kk != 0) continue;
    for (std::size_t ll = 0; ll <= l; ++ll) {
      if (ll == l && kk == k) continue;
      if (ll + kk >= orbit.points.size()) continue;
      if (std::abs(orbit.points[ll + kk] - orbit.points[ll]) < tolerance) {
        return std::pair{ll, kk};
      }
    }
  }
  return std::nullopt;
}

namespace {

constexpr double kEpsilon = std::numeric_limits<double>::epsilon();
constexpr double kRootUlps = 8.0;

struct PhiValue {
  Complex value;
  Complex derivative;
  double scale = 1.0;  // 1 + |z_l|
  bool finite = true;
};

PhiValue phi(Complex lambda, std::size_t l, std::size_t k) {
  const SingularOrbit orbit = singular_orbit(lambda, l + k);
  if (orbit.overflow) return {{}, {}, false};
  PhiValue out{orbit.points[l + k] - orbit.points[l],
               orbit.derivatives[l + k] - orbit.derivatives[l], 1.0 + std::abs(orbit.points[l]), true};
  out.finite = std::isfinite(std::abs(out.value)) && std::isfinite(std::abs(out.derivative));
  return out;
}

}  // namespace

bool preperiodicity_converged(Complex lambda, std::size_t l, std::size_t k, double tolerance) {
  const PhiValue f = phi(lambda, l, k);
  if (!f.finite) return false;
  return std::abs(f.value) < tolerance * f.scale ||
         std::abs(f.value) <= kRootUlps * kEpsilon * std::abs(lambda) * std::abs(f.derivative);
}

Complex misiurewicz_newton(Complex seed, std::size_t l, std::size_t k, const NewtonConfig& config) {
  if (seed == Complex{}) throw Error(ErrorKind::invalid_argument, "Newton seed must be nonzero");
  if (l < 1 || k < 1) throw Error(ErrorKind::invalid_argument, "need l >= 1 and k >= 1");

  Complex lambda = seed;
  bool converged = false;
  for (std::size_t it = 0; it <= config.max_iterations; ++it) {
    if (lambda == Complex{}) break;
    const PhiValue f = phi(lambda, l, k);
    if (!f.finite) break;
    const bool small_step = f.derivative != Complex{} &&
                            std::abs(f.value / f.derivative) <= config.step_tolerance * (1 + std::abs(lambda));
    if ((std::abs(f.value) < config.tolerance * f.scale && small_step) ||
        std::abs(f.value) <= kRootUlps * kEpsilon * std::abs(lambda) * std::abs(f.derivative)) {
      converged = true;
      break;
    }
    if (it == config.max_iterations || f.derivative == Complex{}) break;
    const Complex step = f.value / f.derivative;
    double a = 1.0;
    Complex trial = lambda - step;
    for (int h = 0; h < 30; ++h) {
      trial = lambda - a * step;
      if (trial != Complex{}) {
        const PhiValue g = phi(trial, l, k);
        if (g.finite && std::abs(g.value) < std::abs(f.value)) break;
      }
      a *= 0.5;
    }
    lambda = trial;
  }
  if (!converged) {
    throw Error(ErrorKind::non_convergence,
                "Newton on z_{l+k} - z_l did not converge from seed " + fmt(seed.real()) + "+" +
                    fmt(seed.imag()) + "i");
  }
  if (std::abs(lambda) < config.shape_tolerance) {
    throw Error(ErrorKind::spurious_root, "Newton converged to lambda = 0");
  }
  if (auto smaller = smaller_shape(lambda, l, k, config.shape_tolerance)) {
    throw Error(ErrorKind::spurious_root,
                "root has smaller shape (" + std::to_string(smaller->first) + ", " +
                    std::to_string(smaller->second) + ") than requested (" + std::to_string(l) +
                    ", " + std::to_string(k) + ")");
  }
  return lambda;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ConvergenceTag tag) {
  switch (tag) {
    case ConvergenceTag::attracting_or_parabolic: return "attracting_or_parabolic";
    case ConvergenceTag::eventually_constant: return "eventually_constant";
    case ConvergenceTag::escaping: return "escaping";
    case ConvergenceTag::undecided: return "undecided";
    case ConvergenceTag::excluded: return "excluded";
  }
  return "undecided";
}

ConvergenceTag parse_convergence_tag(std::string_view name) {
  for (auto tag : {ConvergenceTag::attracting_or_parabolic, ConvergenceTag::eventually_constant,
                   ConvergenceTag::escaping, ConvergenceTag::undecided, ConvergenceTag::excluded}) {
    if (to_string(tag) == name) return tag;
  }
  throw Error(ErrorKind::syntax, "unknown convergence tag \"" + std::string(name) + "\"");
}

namespace {

// Fixed point of z = lambda e^z near `z`, if Newton settles.
std::optional<Complex> fixed_point(Complex lambda, Complex z) {
  for (int it = 0; it < 60; ++it) {
    if (z.real() > kOverflowRe) return std::nullopt;
    const Complex e = lambda * std::exp(z);
    const Complex h = z - e;
    const Complex dh = 1.0 - e;
    if (dh == Complex{}) return std::nullopt;
    const Complex step = h / dh;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) return z;
  }
  const Complex h = z - lambda * std::exp(z);
  if (std::abs(h) < 1e-12 * (1.0 + std::abs(z))) return z;
  return std::nullopt;
}

}  // namespace

ConvergenceClass classify_convergence(Complex lambda, const ConvergenceConfig& config) {
  require_parameter(lambda);
  ConvergenceClass out;
  std::vector<Complex> z{Complex{}};
  auto close = [&](Complex a, Complex b) {
    return std::abs(a - b) <= config.tolerance * (1.0 + std::abs(b));
  };

  for (std::size_t n = 1; n <= config.max_iterations; ++n) {
    if (z.back().real() > kOverflowRe) {
      out.tag = ConvergenceTag::escaping;
      out.escape_iterate = n - 1;
      return out;
    }
    z.push_back(lambda * std::exp(z.back()));
    if (n <= config.coincidence_window) {
      for (std::size_t m = 0; m < n; ++m) {
        if (!close(z[n], z[m])) continue;
        const std::size_t k = n - m;
        Complex multiplier{1.0, 0.0};
        for (std::size_t i = m + 1; i <= n; ++i) multiplier *= z[i];
        if (std::abs(multiplier) > 1.0 + config.tolerance) {
          out.tag = ConvergenceTag::eventually_constant;
          out.preperiod = m;
          out.period = k;
          return out;
        }
        if (k == 1) {
          if (auto mu = fixed_point(lambda, z[n]); mu && std::abs(*mu) <= 1.0 + config.tolerance) {
            out.tag = ConvergenceTag::attracting_or_parabolic;
            out.fixed_point = *mu;
            return out;
          }
        }
        return out;  // attracting cycle of period > 1 or unresolved
      }
    } else if (close(z[n], z[n - 1])) {
      if (auto mu = fixed_point(lambda, z[n]); mu && std::abs(*mu) <= 1.0 + config.tolerance) {
        out.tag = ConvergenceTag::attracting_or_parabolic;
        out.fixed_point = *mu;
      }
      return out;
    }
  }
  // Slow (parabolic-like) convergence: accept a nearby non-repelling fixed point.
  if (auto mu = fixed_point(lambda, z.back());
      mu && std::abs(*mu) <= 1.0 + config.tolerance && std::abs(z.back() - *mu) < 1e-2 &&
      std::abs(z.back() - *mu) < std::abs(z[z.size() / 2] - *mu)) {
    out.tag = ConvergenceTag::attracting_or_parabolic;
    out.fixed_point = *mu;
  }
  return out;
}

}  // namespace psf
