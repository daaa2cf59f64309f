#pragma once

// Double-precision dynamics of E(z) = lambda * exp(z): evaluation, inverse
// branches on the static strips, dynamic rays, the singular orbit with its
// parameter derivative, Newton refinement of preperiodic parameters and the
// convergence trichotomy of the singular orbit.

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "psfexp/symbolic.hpp"

namespace psf {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Re z beyond which exp(z) is treated as overflow, and the orbit as escaping.
inline constexpr double kOverflowRe = 700.0;

/// Principal logarithm with imaginary part in (-pi, pi].
Complex principal_log(Complex w);

/// lambda * exp(z). Throws overflow for Re z > 700 and invalid_argument for
/// lambda = 0.
Complex eval_map(Complex lambda, Complex z);

/// Branch of the inverse onto strip R_j: Log(w) - log(lambda) + 2 pi i j.
Complex inverse_branch(Complex lambda, Complex w, Digit j);

/// Offset of Im z from the centre line of strip R_j; |offset| <= pi inside
/// the closed strip.
double strip_offset(Complex lambda, Complex z, Digit j);

/// F(t) = e^t - 1, the potential map.
double potential_map(double t);

struct RayConfig {
  double t_cap = 1e100;           // stop raising potentials at t_N >= t_cap
  std::size_t max_depth = 1'000'000;
  double error_constant = 2.0;    // the unknown universal constant C, reporting only
  double static_potential = 10.0; // static branches are used at or above this
  double ladder_ratio = 0.95;     // potential ratio between continuity samples
};

struct RayTrace {
  Complex lambda;
  ExternalAddress address;
  double potential = 0.0;  // t
  std::size_t depth = 0;   // N
  Complex point;           // approximation of g_s(t)
  double tail_error_bound = 0.0;  // heuristic: 2 e^{-t_N} (|log lambda| + C)
};

/// Traces all rays on the shift orbit of one preperiodic address for a fixed
/// parameter. Above `static_potential` rays are obtained by pulling back the
/// asymptotic formula through the static branches; below it the branch at
/// every pullback is the one continuous with the ray sampled at a slightly
/// higher potential, so rays that cross the static partition are followed
/// correctly. Samples are cached, so repeated queries are cheap.
class RayTracer {
 public:
  RayTracer(Complex lambda, ExternalAddress address, RayConfig config = {});

  /// g at the shift sigma^m(s), m in [0, l + k).
  RayTrace trace(double t, std::size_t m = 0);

  Complex lambda() const noexcept { return lambda_; }
  const ExternalAddress& address() const noexcept { return address_; }
  std::size_t orbit_size() const noexcept { return rays_.size(); }

 private:
  std::size_t next(std::size_t m) const noexcept;
  Digit entry(std::size_t m, std::size_t n) const;
  Complex static_point(std::size_t m, double t) const;
  Complex continued_point(std::size_t m, double t);
  void ensure(std::size_t m, double t);
  Complex pull(Complex w) const;

  Complex lambda_;
  Complex log_lambda_;
  ExternalAddress address_;
  RayConfig config_;
  std::vector<ExternalAddress> rays_;
  // per ray: potential -> sample, for potentials below static_potential
  std::vector<std::map<double, Complex>> samples_;
};

RayTrace trace_dynamic_ray(Complex lambda, const ExternalAddress& s, double t,
                           const RayConfig& config = {});

/// Initialization depth N and potential t_N = F^N(t) used for potential t.
std::pair<std::size_t, double> initialization_depth(double t, const RayConfig& config = {});

/// r_s(t) = g_s(t) - (t - log lambda + 2 pi i s_1), evaluated without
/// cancellation through r_n = Log(1 + e^{-t_n} (-1 - log lambda + 2 pi i s_{n+2} + r_{n+1})).
/// Requires t >= config.static_potential.
Complex asymptotic_remainder(Complex lambda, const ExternalAddress& s, double t,
                             const RayConfig& config = {});

struct SingularOrbit {
  Complex lambda;
  std::vector<Complex> points;       // z_0 = 0, z_1 = lambda, ...
  std::vector<Complex> derivatives;  // dz_i / dlambda
  bool overflow = false;             // stopped early at Re z > 700
};

SingularOrbit singular_orbit(Complex lambda, std::size_t n);

struct NewtonConfig {
  double tolerance = 1e-12;  // on |z_{l+k} - z_l| / (1 + |z_l|)
  double step_tolerance = 1e-10;  // on the Newton step / (1 + |lambda|); guards multiple roots
  std::size_t max_iterations = 100;
  double shape_tolerance = 1e-8;  // smaller shapes closer than this are spurious
};

/// Root of z_{l+k}(lambda) - z_l(lambda) near `seed`, rejecting roots whose
/// singular orbit has a strictly smaller preperiod or period. Converged per
/// preperiodicity_converged with a small Newton step; a returned root is a
/// fixed point of the iteration.
Complex misiurewicz_newton(Complex seed, std::size_t l, std::size_t k,
                           const NewtonConfig& config = {});

/// |z_{l+k} - z_l| at lambda.
double preperiodicity_residual(Complex lambda, std::size_t l, std::size_t k);
/// 1 + |z_l|, the scale of the preperiodicity residual.
double preperiodicity_scale(Complex lambda, std::size_t l);

/// |z_{l+k} - z_l| < tolerance * (1 + |z_l|), or the residual is explained by
/// rounding lambda: a root lies within 8 ulps of lambda to first order.
bool preperiodicity_converged(Complex lambda, std::size_t l, std::size_t k, double tolerance);

/// The smallest shape (l', k') with l' <= l, k' | k and |z_{l'+k'} - z_{l'}|
/// below `tolerance`, other than (l, k) itself.
std::optional<std::pair<std::size_t, std::size_t>> smaller_shape(
    Complex lambda, std::size_t l, std::size_t k, double tolerance);

enum class ConvergenceTag {
  attracting_or_parabolic,
  eventually_constant,
  escaping,
  undecided,
  excluded,  // lambda = 0 in a parameter scan
};

std::string_view to_string(ConvergenceTag tag);
ConvergenceTag parse_convergence_tag(std::string_view name);

struct ConvergenceClass {
  ConvergenceTag tag = ConvergenceTag::undecided;
  Complex fixed_point;          // attracting or parabolic fixed point mu
  std::size_t preperiod = 0;    // eventually constant shape
  std::size_t period = 0;
  std::size_t escape_iterate = 0;

  bool operator==(const ConvergenceClass&) const = default;
};

struct ConvergenceConfig {
  std::size_t max_iterations = 500;
  double tolerance = 1e-9;
  std::size_t coincidence_window = 64;  // orbit prefix searched for exact repeats
};

ConvergenceClass classify_convergence(Complex lambda, const ConvergenceConfig& config = {});

}  // namespace psf
