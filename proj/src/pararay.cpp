#include "psfexp/pararay.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "psfexp/serialize.hpp"

namespace psf {

namespace {

void require_coding_address(const ExternalAddress& s) {
  if (!s.is_preperiodic()) {
    throw Error(ErrorKind::precondition,
                "expected a strictly preperiodic address, got " + to_string(s));
  }
  if (s[1] != 0) {
    throw Error(ErrorKind::first_entry_nonzero,
                "the address of a postsingularly finite map starts with 0, got " + to_string(s));
  }
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. fn writes only to
// slot i of its own output, so the result does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(name, e);
  }
}

}  // namespace

ParameterRaySample trace_parameter_ray(const ExternalAddress& s, double t,
                                       std::optional<Complex> seed,
                                       const ParameterRayConfig& config) {
  require_coding_address(s);
  if (!(t >= config.min_potential) || !std::isfinite(t)) {
    throw Error(ErrorKind::invalid_argument,
                "parameter ray potential must be at least " + format_real(config.min_potential) +
                    ", got " + format_real(t));
  }
  auto g = [&](Complex lambda) -> std::optional<Complex> {
    if (lambda == Complex{}) return std::nullopt;
    try {
      return RayTracer(lambda, s, config.ray).trace(t).point;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  Complex lambda = seed.value_or(std::exp(Complex{t, 0.0}));
  std::optional<Complex> value = g(lambda);
  if (!value) {
    throw Error(ErrorKind::non_convergence, "ray cannot be traced at the seed parameter");
  }
  for (std::size_t it = 0; std::abs(*value) >= config.residual_tolerance; ++it) {
    if (it == config.max_iterations) {
      throw Error(ErrorKind::non_convergence,
                  "parameter ray Newton stalled at t = " + format_real(t) + " with residual " +
                      format_real(std::abs(*value)));
    }
    const double h = 1e-7 * (1.0 + std::abs(lambda));
    const auto plus = g(lambda + h);
    const auto minus = g(lambda - h);
    if (!plus || !minus) {
      throw Error(ErrorKind::non_convergence, "finite difference left the traceable region");
    }
    const Complex derivative = (*plus - *minus) / (2.0 * h);
    if (derivative == Complex{}) throw Error(ErrorKind::non_convergence, "zero derivative");
    const Complex step = *value / derivative;
    double a = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 30 && !improved; ++halving, a *= 0.5) {
      const Complex trial = lambda - a * step;
      if (auto v = g(trial); v && std::abs(*v) < std::abs(*value)) {
        lambda = trial;
        value = v;
        improved = true;
      }
    }
    if (!improved) {
      throw Error(ErrorKind::non_convergence,
                  "damped Newton made no progress at t = " + format_real(t));
    }
  }
  return {t, lambda, std::abs(*value)};
}

PsfParameter land_parameter_ray(const ExternalAddress& s, const ContinuationSchedule& schedule) {
  require_coding_address(s);
  PsfParameter out;
  out.address = s;
  out.l = s.preperiod_length();
  out.k = s.period_length();

  ParameterRaySample current = trace_parameter_ray(s, schedule.t_start, std::nullopt, schedule.solver);
  out.path.push_back(current);

  // Reach `target` from `current`, inserting geometric midpoints on failure.
  auto advance = [&](auto&& self, double target, std::size_t depth) -> void {
    try {
      current = trace_parameter_ray(s, target, current.lambda, schedule.solver);
      out.path.push_back(current);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::non_convergence) throw;
      if (depth == schedule.max_refinements) {
        throw Error(ErrorKind::continuation_divergence,
                    "continuation failed between t = " + format_real(current.t) + " and t = " +
                        format_real(target) + ": " + e.what());
      }
      self(self, std::sqrt(current.t * target), depth + 1);
      self(self, target, depth + 1);
    }
  };

  out.landing_gap = std::numeric_limits<double>::infinity();
  while (current.t > schedule.t_stop) {
    const Complex before = current.lambda;
    advance(advance, std::max(current.t * 0.5, schedule.t_stop), 0);
    out.landing_gap = std::abs(current.lambda - before);
    if (out.landing_gap < schedule.stabilization) break;
  }
  out.lambda = current.lambda;
  return out;
}

PsfParameter find_lambda(const ExternalAddress& s, const FindConfig& config) {
  require_coding_address(s);
  const AddressClass cls = stage("class", [&] { return equivalence_class(s); });
  PsfParameter out = stage("landing", [&] { return land_parameter_ray(s, config.schedule); });
  out.address_class = cls;
  out.orbit_period = cls.kneading_period;
  const std::size_t l = out.l;
  const std::size_t kp = out.orbit_period;

  const Complex landing = out.lambda;
  out.lambda = stage("newton", [&] {
    const Complex root = misiurewicz_newton(landing, l, kp, config.newton);
    if (std::abs(root - landing) > config.seed_agreement) {
      throw Error(ErrorKind::spurious_root,
                  "Newton moved from the ray landing point " + format_complex(landing) + " to " +
                      format_complex(root));
    }
    return root;
  });
  out.newton_residual = preperiodicity_residual(out.lambda, l, kp);

  stage("verify", [&] {
    if (!preperiodicity_converged(out.lambda, l, kp, config.newton.tolerance)) {
      throw Error(ErrorKind::non_convergence,
                  "preperiodicity residual " + format_real(out.newton_residual));
    }
    RayTracer tracer(out.lambda, s, config.schedule.solver.ray);
    std::vector<double> ts = config.landing_potentials;
    std::sort(ts.begin(), ts.end(), std::greater<>());
    for (double t : ts) {
      const double r = std::abs(tracer.trace(t).point);
      if (!out.landing_profile.empty() &&
          r > out.landing_profile.back().residual + config.landing_noise) {
        throw Error(ErrorKind::inconsistency,
                    "dynamic ray does not approach 0: |g(" + format_real(t) + ")| = " +
                        format_real(r) + " after " + format_real(out.landing_profile.back().residual));
      }
      out.landing_profile.push_back({t, r});
    }
    out.dynamic_landing_residual = out.landing_profile.empty() ? 0.0 : out.landing_profile.back().residual;
    if (!(out.dynamic_landing_residual < config.landing_bound)) {
      throw Error(ErrorKind::inconsistency,
                  "dynamic ray ends at distance " + format_real(out.dynamic_landing_residual) +
                      " from 0");
    }
    const ConvergenceClass cc = classify_convergence(out.lambda);
    if (cc.tag != ConvergenceTag::eventually_constant || cc.preperiod != l || cc.period != kp) {
      throw Error(ErrorKind::spurious_root,
                  "singular orbit classified as " + std::string(to_string(cc.tag)) + " (" +
                      std::to_string(cc.preperiod) + ", " + std::to_string(cc.period) +
                      "), expected eventually_constant (" + std::to_string(l) + ", " +
                      std::to_string(kp) + ")");
    }
    return 0;
  });
  return out;
}

DistinctnessReport distinctness_check(const std::vector<AddressClass>& classes,
                                      const FindConfig& config, unsigned threads) {
  DistinctnessReport report;
  for (const auto& c : classes) {
    if (c.members.empty()) throw Error(ErrorKind::precondition, "empty class");
    report.representatives.push_back(c.members.front());
  }
  const std::size_t n = classes.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = report.representatives[i];
      const auto& b = report.representatives[j];
      const bool same_shape = a.preperiod_length() == b.preperiod_length() &&
                              a.period_length() == b.period_length();
      if (classes[i] == classes[j] || (same_shape && are_equivalent(a, b))) {
        throw Error(ErrorKind::precondition, "classes of " + to_string(a) + " and " + to_string(b) +
                                                 " are equivalent");
      }
    }
  }
  report.parameters.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    report.parameters[i] = find_lambda(report.representatives[i], config).lambda;
  });
  report.distances.assign(n, std::vector<double>(n, 0.0));
  report.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = std::abs(report.parameters[i] - report.parameters[j]);
      report.distances[i][j] = d;
      if (i < j) {
        report.min_distance = std::min(report.min_distance, d);
        if (d <= kCollisionDistance) report.collisions.push_back({i, j});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

Complex ScanResult::parameter(std::size_t col, std::size_t row) const {
  const double re = width > 1 ? rect.re_min + static_cast<double>(col) * (rect.re_max - rect.re_min) /
                                                  static_cast<double>(width - 1)
                              : rect.re_min;
  const double im = height > 1 ? rect.im_max - static_cast<double>(row) * (rect.im_max - rect.im_min) /
                                                   static_cast<double>(height - 1)
                               : rect.im_max;
  return {re, im};
}

ScanResult scan_parameter_plane(const Rect& rect, std::size_t width, std::size_t height,
                                const ConvergenceConfig& config, unsigned threads) {
  if (width == 0 || height == 0) {
    throw Error(ErrorKind::invalid_argument, "scan resolution must be positive");
  }
  if (!(rect.re_min <= rect.re_max) || !(rect.im_min <= rect.im_max)) {
    throw Error(ErrorKind::invalid_argument, "scan rectangle is empty");
  }
  ScanResult out{rect, width, height, std::vector<ConvergenceClass>(width * height)};
  parallel_for(height, threads, [&](std::size_t row) {
    for (std::size_t col = 0; col < width; ++col) {
      const Complex lambda = out.parameter(col, row);
      ConvergenceClass& cell = out.cells[row * width + col];
      if (lambda == Complex{}) {
        cell.tag = ConvergenceTag::excluded;
      } else {
        cell = classify_convergence(lambda, config);
      }
    }
  });
  return out;
}

unsigned char gray_level(ConvergenceTag tag) {
  switch (tag) {
    case ConvergenceTag::escaping: return 0;
    case ConvergenceTag::excluded: return 32;
    case ConvergenceTag::undecided: return 96;
    case ConvergenceTag::eventually_constant: return 160;
    case ConvergenceTag::attracting_or_parabolic: return 255;
  }
  return 96;
}

std::string scan_to_csv(const ScanResult& scan) {
  std::string out = "re,im,class,preperiod,period,escape_iterate,fixed_point\n";
  for (std::size_t row = 0; row < scan.height; ++row) {
    for (std::size_t col = 0; col < scan.width; ++col) {
      const Complex lambda = scan.parameter(col, row);
      const ConvergenceClass& c = scan.at(col, row);
      out += format_real(lambda.real()) + "," + format_real(lambda.imag()) + "," +
             std::string(to_string(c.tag)) + "," + std::to_string(c.preperiod) + "," +
             std::to_string(c.period) + "," + std::to_string(c.escape_iterate) + "," +
             format_complex(c.fixed_point) + "\n";
    }
  }
  return out;
}

std::string scan_to_pgm(const ScanResult& scan) {
  std::string out = "P5\n" + std::to_string(scan.width) + " " + std::to_string(scan.height) + "\n255\n";
  for (const auto& c : scan.cells) out.push_back(static_cast<char>(gray_level(c.tag)));
  return out;
}

// ---------------------------------------------------------------------------

AddressSearchResult address_search(Complex lambda, std::size_t l, std::size_t k, Digit bound,
                                   const FindConfig& config, unsigned threads) {
  if (l < 1 || k < 1) throw Error(ErrorKind::invalid_argument, "need l >= 1 and k >= 1");
  if (bound < 0) throw Error(ErrorKind::invalid_argument, "entry bound must be nonnegative");
  if (lambda == Complex{}) throw Error(ErrorKind::invalid_argument, "lambda = 0 is not a parameter");
  const std::size_t free = l + k - 1;
  const double base = 2.0 * static_cast<double>(bound) + 1.0;
  if (std::pow(base, static_cast<double>(free)) > static_cast<double>(kSearchCap)) {
    throw Error(ErrorKind::resource, "address search over more than " + std::to_string(kSearchCap) +
                                         " candidates");
  }

  std::vector<ExternalAddress> candidates;
  std::vector<Digit> word(l + k, 0);
  std::vector<Digit> digits(free, -bound);
  for (;;) {
    for (std::size_t i = 0; i < free; ++i) word[i + 1] = digits[i];
    ExternalAddress s(std::vector<Digit>(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(l)),
                      std::vector<Digit>(word.begin() + static_cast<std::ptrdiff_t>(l), word.end()));
    if (s.preperiod_length() == l && s.period_length() == k) candidates.push_back(std::move(s));
    std::size_t pos = 0;
    while (pos < free && digits[pos] == bound) digits[pos++] = -bound;
    if (pos == free) break;
    ++digits[pos];
  }
  std::sort(candidates.begin(), candidates.end());

  enum class Outcome { miss, match, failure };
  std::vector<Outcome> outcome(candidates.size(), Outcome::miss);
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    try {
      const PsfParameter p = find_lambda(candidates[i], config);
      if (std::abs(p.lambda - lambda) < kCollisionDistance) outcome[i] = Outcome::match;
    } catch (const Error&) {
      outcome[i] = Outcome::failure;
    }
  });

  AddressSearchResult out;
  out.candidates = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (outcome[i] == Outcome::match) out.matches.push_back(candidates[i]);
    if (outcome[i] == Outcome::failure) out.failures.push_back(candidates[i]);
  }
  return out;
}

}  // namespace psf
