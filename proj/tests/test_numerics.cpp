#include <cmath>

#include "doctest.h"
#include "psfexp/numerics.hpp"
#include "support.hpp"

using namespace psf;

namespace {

const Complex kI{0.0, 1.0};
const Complex k2PiI{0.0, kTwoPi};

ExternalAddress A(const char* text) { return parse_address(text); }

Complex random_lambda(test::Rng& rng, double r) {
  std::uniform_real_distribution<double> d(-r, r);
  Complex z;
  do z = {d(rng), d(rng)};
  while (std::abs(z) < 0.1);
  return z;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::syntax;
}

}  // namespace

TEST_CASE("eval_map") {
  CHECK(std::abs(eval_map(k2PiI, 0.0) - k2PiI) < 1e-15);
  CHECK(std::abs(eval_map(1.0, kI * kPi) - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(eval_map(k2PiI, k2PiI) - k2PiI) < 1e-14);
  CHECK(kind_of([] { eval_map(1.0, 701.0); }) == ErrorKind::overflow);
  CHECK(kind_of([] { eval_map(0.0, 1.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("inverse branches") {
  CHECK(std::abs(inverse_branch(k2PiI, k2PiI, 1) - k2PiI) < 1e-15);
  CHECK(std::abs(inverse_branch(1.0, 1.0, 0)) < 1e-15);
  CHECK(kind_of([] { inverse_branch(1.0, 0.0, 0); }) == ErrorKind::invalid_argument);
  CHECK(principal_log(Complex(-1.0, -0.0)).imag() == doctest::Approx(kPi));

  test::Rng rng(51);
  std::uniform_int_distribution<Digit> jd(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    const Complex lambda = random_lambda(rng, 10.0);
    const Complex w = random_lambda(rng, 50.0);
    const Digit j = jd(rng);
    const Complex z = inverse_branch(lambda, w, j);
    CHECK(std::abs(eval_map(lambda, z) - w) <= 1e-14 * std::abs(w) * 4);
    CHECK(std::abs(z.imag() + std::arg(lambda) - kTwoPi * static_cast<double>(j)) <= kPi + 1e-12);
    CHECK(std::abs(strip_offset(lambda, z, j)) <= kPi + 1e-12);
  }
}

TEST_CASE("dynamic rays satisfy the functional equation") {
  const ExternalAddress s = A("0 (1)");
  for (double t : {0.5, 1.0, 2.0}) {
    const Complex z = trace_dynamic_ray(k2PiI, s, t).point;
    const Complex w = trace_dynamic_ray(k2PiI, shift(s), potential_map(t)).point;
    CHECK(std::abs(eval_map(k2PiI, z) - w) < 1e-8 * (1 + std::abs(z)));
  }
  test::Rng rng(52);
  for (int i = 0; i < 60; ++i) {
    const Complex lambda = random_lambda(rng, 4.0);
    const auto a = test::random_preperiodic(rng, 2, 3, -2, 2, false);
    const double t = std::uniform_real_distribution<double>(0.2, 4.0)(rng);
    RayTracer tracer(lambda, a);
    for (std::size_t m = 0; m + 1 < tracer.orbit_size(); ++m) {
      const Complex z = tracer.trace(t, m).point;
      const Complex w = tracer.trace(potential_map(t), m + 1).point;
      CHECK(std::abs(eval_map(lambda, z) - w) < 1e-8 * (1 + std::abs(z)));
    }
  }
}

TEST_CASE("ray trace metadata and asymptotics") {
  const auto r = trace_dynamic_ray(k2PiI, A("0 (1)"), 30.0);
  const Complex leading = 30.0 - principal_log(k2PiI);
  const double bound = 2 * std::exp(-30.0) * (std::abs(principal_log(k2PiI)) + 2.0);
  CHECK(std::abs(r.point - leading) <= bound);
  CHECK(std::isfinite(r.tail_error_bound));
  CHECK(r.depth >= 1);

  const auto [n, tn] = initialization_depth(1.0);
  CHECK(n == 4);
  CHECK(tn > 1e40);
  CHECK(trace_dynamic_ray(k2PiI, A("0 (1)"), 1.0).depth == n);

  CHECK(kind_of([] { trace_dynamic_ray(k2PiI, A("0 (1)"), 0.0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { trace_dynamic_ray(k2PiI, A("0 (1)"), -1.0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { trace_dynamic_ray(0.0, A("0 (1)"), 1.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("asymptotic remainder agrees with direct subtraction") {
  const Complex lambda{1.0, kTwoPi};
  for (const char* text : {"0 (1)", "0 (2 1)", "0 -1 (3)"}) {
    const auto s = A(text);
    for (double t : {10.0, 12.0}) {
      const Complex g = trace_dynamic_ray(lambda, s, t).point;
      const Complex direct =
          g - (t - principal_log(lambda) + Complex(0.0, kTwoPi * static_cast<double>(s[1])));
      const Complex r = asymptotic_remainder(lambda, s, t);
      CHECK(std::abs(r - direct) < 1e-12);
      CHECK(std::abs(r) > 1e-7);
    }
  }
  CHECK(kind_of([] { asymptotic_remainder(k2PiI, A("0 (1)"), 5.0); }) == ErrorKind::precondition);
}

TEST_CASE("asymptotic remainder matches its first-order term") {
  for (Complex lambda : {k2PiI, Complex(1.0, kTwoPi), Complex(-0.7, 12.5)}) {
    for (const char* text : {"0 (1)", "0 (2 1)", "0 (-3 1)"}) {
      const auto s = A(text);
      const double t = 30.0;
      const Complex first = std::exp(-t) * (-1.0 - principal_log(lambda) +
                                            Complex(0.0, kTwoPi * static_cast<double>(s[2])));
      const Complex r = asymptotic_remainder(lambda, s, t);
      CHECK(std::abs(r - first) <= 1e-10 * std::abs(first));
    }
  }
}

TEST_CASE("trace is stable under deeper initialization") {
  RayConfig deep;
  deep.max_depth = 10'000'000;
  deep.t_cap = 1e300;
  RayConfig shallow;
  shallow.t_cap = 1e40;
  const Complex lambda{0.5, 9.0};
  for (double t : {0.3, 1.0, 3.0}) {
    const auto a = trace_dynamic_ray(lambda, A("0 (2 1)"), t);
    const auto b = trace_dynamic_ray(lambda, A("0 (2 1)"), t, deep);
    const auto c = trace_dynamic_ray(lambda, A("0 (2 1)"), t, shallow);
    CHECK(std::abs(a.point - b.point) < 1e-10);
    CHECK(std::abs(a.point - c.point) < 1e-10);
  }
}

TEST_CASE("singular orbit and derivatives") {
  const auto o = singular_orbit(k2PiI, 3);
  REQUIRE(o.points.size() == 4);
  CHECK(o.points[0] == Complex(0.0, 0.0));
  for (std::size_t i = 1; i <= 3; ++i) CHECK(std::abs(o.points[i] - k2PiI) < 1e-13);
  CHECK(std::abs(o.derivatives[1] - 1.0) < 1e-14);
  CHECK_FALSE(o.overflow);
  CHECK(singular_orbit(3.0, 20).overflow);

  test::Rng rng(53);
  int checked = 0;
  while (checked < 200) {
    const Complex lambda = random_lambda(rng, 3.0);
    const std::size_t n = test::pick(rng, 1, 8);
    const auto orbit = singular_orbit(lambda, n);
    if (orbit.overflow || test::orbit_radius(orbit.points) >= 50) continue;
    const double h = 1e-6 * std::abs(lambda);
    const auto plus = singular_orbit(lambda + h, n);
    const auto minus = singular_orbit(lambda - h, n);
    if (plus.overflow || minus.overflow) continue;
    const Complex fd = (plus.points[n] - minus.points[n]) / (2 * h);
    const Complex an = orbit.derivatives[n];
    CHECK(std::abs(an - fd) / std::abs(an) < 1e-5);
    ++checked;
  }
}

TEST_CASE("Misiurewicz Newton") {
  const Complex a = misiurewicz_newton(Complex(0.0, 6.3), 1, 1);
  CHECK(std::abs(a - k2PiI) < 1e-10);
  const Complex b = misiurewicz_newton(Complex(0.0, 12.6), 1, 1);
  CHECK(std::abs(b - 2.0 * k2PiI) < 1e-10);
  CHECK(misiurewicz_newton(a, 1, 1) == a);
  CHECK(std::abs(misiurewicz_newton(b, 1, 1) - b) < 1e-13);

  const ErrorKind k = kind_of([] { misiurewicz_newton(0.1, 1, 1); });
  CHECK((k == ErrorKind::spurious_root || k == ErrorKind::non_convergence));
  CHECK(kind_of([] { misiurewicz_newton(0.0, 1, 1); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { misiurewicz_newton(1.0, 0, 1); }) == ErrorKind::invalid_argument);

  // 2 pi i has shape (1, 1), so it is spurious as a (1, 2) or (2, 1) root.
  CHECK(kind_of([&] { misiurewicz_newton(k2PiI, 1, 2); }) == ErrorKind::spurious_root);
  CHECK(smaller_shape(k2PiI, 2, 2, 1e-8) == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK_FALSE(smaller_shape(k2PiI, 1, 1, 1e-8));
  CHECK(preperiodicity_residual(k2PiI, 1, 1) < 1e-14);
  CHECK(preperiodicity_converged(k2PiI, 1, 1, 1e-12));
}

TEST_CASE("convergence trichotomy") {
  const auto att = classify_convergence(0.2);
  CHECK(att.tag == ConvergenceTag::attracting_or_parabolic);
  // z = 0.2 e^z by plain fixed-point iteration.
  double z = 0.0;
  for (int i = 0; i < 200; ++i) z = 0.2 * std::exp(z);
  CHECK(std::abs(att.fixed_point - z) < 1e-9);
  CHECK(z == doctest::Approx(0.2592).epsilon(1e-3));

  const auto ec = classify_convergence(k2PiI);
  CHECK(ec.tag == ConvergenceTag::eventually_constant);
  CHECK(ec.preperiod == 1);
  CHECK(ec.period == 1);

  const auto esc = classify_convergence(3.0);
  CHECK(esc.tag == ConvergenceTag::escaping);
  CHECK(esc.escape_iterate > 0);

  const auto circle = classify_convergence(std::exp(-1.0) * 0.9);
  CHECK(circle.tag == ConvergenceTag::attracting_or_parabolic);

  for (auto tag : {ConvergenceTag::attracting_or_parabolic, ConvergenceTag::eventually_constant,
                   ConvergenceTag::escaping, ConvergenceTag::undecided, ConvergenceTag::excluded}) {
    CHECK(parse_convergence_tag(to_string(tag)) == tag);
  }
  CHECK_THROWS_AS(parse_convergence_tag("nope"), Error);
}
