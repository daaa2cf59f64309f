#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "psfexp/classify.hpp"
#include "psfexp/graph.hpp"
#include "psfexp/numerics.hpp"
#include "psfexp/pararay.hpp"
#include "psfexp/serialize.hpp"
#include "support.hpp"

using namespace psf;

namespace {

// Pinned tolerances and sample sizes.
constexpr int kItineraryPairs = 1000;
constexpr int kShapeSamples = 1000;
constexpr int kReversalSamples = 500;
constexpr double kFunctionalTol = 1e-8;
constexpr double kAsymptoticPotential = 30.0;
constexpr double kAsymptoticC = 2.0;
constexpr double kHeadlineTol = 1e-8;
constexpr double kNewtonTol = 1e-12;
constexpr double kLandingBound = 0.05;
constexpr double kSameClassTol = 1e-8;
constexpr double kDistinctTol = 1e-6;
constexpr std::size_t kDistinctClasses = 10;
constexpr int kDerivativeSamples = 200;
constexpr double kDerivativeTol = 1e-5;
constexpr double kScanSeconds = 10.0;

const Complex k2PiI{0.0, kTwoPi};

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Corpus {
  std::vector<ExternalAddress> addresses;
  std::map<ExternalAddress, AddressClass> classes;  // keyed by first member
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    out.addresses = test::corpus(2, 4, 2);
    for (const auto& s : out.addresses) {
      auto cls = equivalence_class(s);
      out.classes.emplace(cls.members.front(), std::move(cls));
    }
    return out;
  }();
  return c;
}

const ExternalAddress kSatellite = parse_address("0 1 (1 0)");

void oracle_equivalence() {
  test::Rng rng(1001);
  int pairs = 0, mismatches = 0;
  while (pairs < kItineraryPairs) {
    auto s = test::random_address(rng, 0, 4, 5, -3, 3);
    auto t = test::random_address(rng, 0, 4, 5, -3, 3);
    if (!itinerary_defined(s, t)) continue;
    ++pairs;
    if (itinerary_by_definition(s, t) != itinerary_by_algorithm(s, t)) ++mismatches;
  }
  report(1, "oracle equivalence", mismatches == 0,
         fmt("%d mismatches over %d pairs", mismatches, pairs));
}

void kneading_shape_law() {
  test::Rng rng(1002);
  int violations = 0;
  for (int i = 0; i < kShapeSamples; ++i) {
    auto s = test::random_preperiodic(rng, 4, 5, -3, 3, false);
    auto k = kneading(s);
    if (k.preperiod_length() != s.preperiod_length() ||
        s.period_length() % k.period_length() != 0) {
      ++violations;
    }
  }
  report(2, "kneading shape law", violations == 0,
         fmt("%d violations over %d addresses", violations, kShapeSamples));
}

void reversal_round_trip() {
  test::Rng rng(1003);
  int bad = 0;
  for (int i = 0; i < kReversalSamples; ++i) {
    auto s = test::random_preperiodic(rng, 4, 5, -3, 3, true);
    try {
      if (recover_address(kneading(s), order_data(s)) != s) ++bad;
    } catch (const Error&) {
      ++bad;
    }
  }
  report(3, "reversal round trip", bad == 0,
         fmt("%d failures over %d addresses", bad, kReversalSamples));
}

void class_size_law() {
  const auto& c = corpus();
  int violations = 0, satellites = 0;
  for (const auto& [key, cls] : c.classes) {
    if (!class_size_admissible(cls.members.size(), cls.period, cls.kneading_period)) ++violations;
    if (cls.kneading_period < cls.period) ++satellites;
  }
  const auto fixture = equivalence_class(kSatellite);
  const bool fixture_ok = fixture.kneading_period < fixture.period &&
                          fixture.members.size() == fixture.period / fixture.kneading_period;
  report(4, "class-size law", violations == 0 && satellites > 0 && fixture_ok,
         fmt("%zu addresses, %zu classes, %d violations, %d k'<k classes; fixture %s size %zu = %zu/%zu",
             c.addresses.size(), c.classes.size(), violations, satellites,
             to_string(kSatellite).c_str(), fixture.members.size(), fixture.period,
             fixture.kneading_period));
}

void unlinking() {
  int bad = 0;
  for (const auto& s : corpus().addresses) {
    if (!check_unlinking(build_graph(s)).holds) ++bad;
  }
  report(5, "unlinking", bad == 0,
         fmt("%d violations over %zu graphs", bad, corpus().addresses.size()));
}

void levy() {
  int found = 0;
  for (const auto& s : corpus().addresses) {
    if (detect_levy(s, true)) ++found;
  }
  const auto w = detect_levy(kSatellite, false);
  report(6, "Levy criterion", found == 0 && w.has_value(),
         fmt("glued witnesses %d over corpus; unglued fixture witness %s", found,
             w ? fmt("e%zu e%zu", w->first, w->second).c_str() : "none"));
}

Complex lambda_star() {
  static const Complex value = find_lambda(parse_address("0 (2 1)")).lambda;
  return value;
}

std::vector<Complex> ray_parameters() { return {k2PiI, Complex(1.0, kTwoPi), lambda_star()}; }

void functional_equation() {
  double worst = 0.0;
  for (Complex lambda : ray_parameters()) {
    for (const char* text : {"0 (1)", "0 (2 1)"}) {
      const auto s = parse_address(text);
      RayTracer tracer(lambda, s);
      for (double t : {0.3, 1.0, 3.0}) {
        const Complex z = tracer.trace(t, 0).point;
        const Complex w = tracer.trace(potential_map(t), 1).point;
        worst = std::max(worst, std::abs(eval_map(lambda, z) - w) / (1 + std::abs(z)));
      }
    }
  }
  report(7, "functional equation", worst < kFunctionalTol,
         fmt("max relative residual %.3g (tol %.0e)", worst, kFunctionalTol));
}

void asymptotics() {
  bool pass = true;
  std::string detail;
  for (Complex lambda : ray_parameters()) {
    for (const char* text : {"0 (1)", "0 (2 1)"}) {
      const auto s = parse_address(text);
      const double t = kAsymptoticPotential;
      const Complex r = asymptotic_remainder(lambda, s, t);
      const double bound = 2 * std::exp(-t) * (std::abs(principal_log(lambda)) + kAsymptoticC);
      const bool ok = std::abs(r) <= bound;
      pass = pass && ok;
      detail += fmt("%s%s@%s ratio %.3f", detail.empty() ? "" : "; ", text,
                    format_complex(lambda).c_str(), std::abs(r) / bound);
    }
  }
  report(8, "asymptotics", pass, "|r|/bound: " + detail);
}

void headline() {
  const auto p = find_lambda(parse_address("0 (1)"));
  bool decreasing = true;
  for (std::size_t i = 1; i < p.landing_profile.size(); ++i) {
    if (p.landing_profile[i].residual > p.landing_profile[i - 1].residual) decreasing = false;
  }
  const double err = std::abs(p.lambda - k2PiI);
  const bool pass = err < kHeadlineTol && p.newton_residual < kNewtonTol &&
                    p.dynamic_landing_residual < kLandingBound && decreasing &&
                    p.landing_profile.back().t == 1e-3;
  report(9, "headline fixture", pass,
         fmt("lambda %s, |lambda-2pi i| %.3g, Newton residual %.3g, |g(0.001)| %.3g, "
             "profile non-increasing %s",
             format_complex(p.lambda).c_str(), err, p.newton_residual,
             p.dynamic_landing_residual, decreasing ? "yes" : "no"));
}

void theorem_classes() {
  double worst_same = 0.0;
  std::size_t multi = 0, failed = 0;
  for (const auto& [key, cls] : corpus().classes) {
    if (cls.members.size() < 2) continue;
    ++multi;
    std::vector<Complex> lambdas;
    try {
      for (const auto& m : cls.members) lambdas.push_back(find_lambda(m).lambda);
    } catch (const Error&) {
      ++failed;
      continue;
    }
    for (const auto& a : lambdas) {
      for (const auto& b : lambdas) worst_same = std::max(worst_same, std::abs(a - b));
    }
  }

  // Ten classes drawn by a fixed seed.
  std::vector<AddressClass> all;
  for (const auto& [key, cls] : corpus().classes) all.push_back(cls);
  test::Rng rng(1010);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(kDistinctClasses);
  double min_distance = 0.0;
  std::size_t collisions = 0;
  try {
    const auto r = distinctness_check(all);
    min_distance = r.min_distance;
    collisions = r.collisions.size();
  } catch (const Error& e) {
    ++failed;
  }
  const bool pass = failed == 0 && worst_same < kSameClassTol && min_distance > kDistinctTol;
  report(10, "classes share parameters", pass,
         fmt("%zu multi-member classes, max intra-class spread %.3g; %zu classes min distance %.3g, "
             "%zu collisions, %zu pipeline failures",
             multi, worst_same, kDistinctClasses, min_distance, collisions, failed));
}

void derivatives() {
  test::Rng rng(1011);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  int samples = 0, bad = 0;
  double worst = 0.0;
  while (samples < kDerivativeSamples) {
    const Complex lambda{d(rng), d(rng)};
    if (std::abs(lambda) < 0.1) continue;
    const std::size_t n = test::pick(rng, 1, 8);
    const auto o = singular_orbit(lambda, n);
    if (o.overflow || test::orbit_radius(o.points) >= 50) continue;
    const double h = 1e-6 * std::abs(lambda);
    const auto p = singular_orbit(lambda + h, n);
    const auto m = singular_orbit(lambda - h, n);
    if (p.overflow || m.overflow) continue;
    const Complex fd = (p.points[n] - m.points[n]) / (2 * h);
    const double rel = std::abs(o.derivatives[n] - fd) / std::abs(o.derivatives[n]);
    worst = std::max(worst, rel);
    if (rel >= kDerivativeTol) ++bad;
    ++samples;
  }
  report(11, "derivative correctness", bad == 0,
         fmt("%d of %d samples above %.0e, max relative error %.3g", bad, samples, kDerivativeTol,
             worst));
}

void trichotomy() {
  const auto a = classify_convergence(0.2).tag;
  const auto b = classify_convergence(k2PiI);
  const auto c = classify_convergence(3.0).tag;
  const bool tags = a == ConvergenceTag::attracting_or_parabolic &&
                    b.tag == ConvergenceTag::eventually_constant && b.preperiod == 1 &&
                    b.period == 1 && c == ConvergenceTag::escaping;
  const Rect rect;
  auto t0 = std::chrono::steady_clock::now();
  const auto one = scan_parameter_plane(rect, 200, 200, {}, 1);
  const double serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto eight = scan_parameter_plane(rect, 200, 200, {}, 8);
  const double parallel = seconds_since(t0);
  const bool same = scan_to_csv(one) == scan_to_csv(eight) && scan_to_pgm(one) == scan_to_pgm(eight);
  report(12, "Euler trichotomy", tags && same && serial < kScanSeconds && parallel < kScanSeconds,
         fmt("0.2 %s, 2pi i %s (%zu,%zu), 3.0 %s; 200x200 scan %.2fs (1 thread) %.2fs (8 threads), "
             "outputs %s",
             std::string(to_string(a)).c_str(), std::string(to_string(b.tag)).c_str(), b.preperiod,
             b.period, std::string(to_string(c)).c_str(), serial, parallel,
             same ? "identical" : "differ"));
}

}  // namespace

int main() {
  void (*checks[])() = {oracle_equivalence, kneading_shape_law, reversal_round_trip, class_size_law,
                        unlinking,          levy,               functional_equation, asymptotics,
                        headline,           theorem_classes,    derivatives,         trichotomy};
  for (auto check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      std::printf("[FAIL] unexpected error: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
