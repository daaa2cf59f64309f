#pragma once

// Parameter rays and the search for the postsingularly finite parameter that
// belongs to a preperiodic external address, plus parameter-plane scans.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "psfexp/classify.hpp"
#include "psfexp/numerics.hpp"

namespace psf {

struct ParameterRaySample {
  double t = 0.0;
  Complex lambda;
  double solver_residual = 0.0;

  bool operator==(const ParameterRaySample&) const = default;
};

struct ParameterRayConfig {
  double min_potential = 1e-3;
  double residual_tolerance = 1e-10;
  std::size_t max_iterations = 60;
  RayConfig ray;
};

struct ContinuationSchedule {
  double t_start = 20.0;
  double t_stop = 1e-3;
  double stabilization = 1e-9;    // stop once successive parameters are this close
  std::size_t max_refinements = 8;  // step-halving fallback depth per step
  ParameterRayConfig solver;
};

struct LandingSample {
  double t = 0.0;
  double residual = 0.0;  // |g_s(t)| at the parameter

  bool operator==(const LandingSample&) const = default;
};

struct PsfParameter {
  Complex lambda;
  ExternalAddress address;
  AddressClass address_class;
  std::size_t l = 0;
  std::size_t k = 0;
  std::size_t orbit_period = 0;  // period of the singular orbit, k' of the kneading sequence
  double newton_residual = 0.0;
  double landing_gap = 0.0;
  double dynamic_landing_residual = 0.0;
  std::vector<LandingSample> landing_profile;
  std::vector<ParameterRaySample> path;

  bool operator==(const PsfParameter&) const = default;
};

/// Solves g_s^lambda(t) = 0 for lambda. The seed defaults to exp(t).
ParameterRaySample trace_parameter_ray(const ExternalAddress& s, double t,
                                       std::optional<Complex> seed = std::nullopt,
                                       const ParameterRayConfig& config = {});

/// Follows the parameter ray from t_start down by halving t. Only lambda,
/// address, l, k, landing_gap and path are filled.
PsfParameter land_parameter_ray(const ExternalAddress& s, const ContinuationSchedule& schedule = {});

struct FindConfig {
  ContinuationSchedule schedule;
  NewtonConfig newton;
  std::vector<double> landing_potentials{0.1, 0.03, 0.01, 0.003, 0.001};
  double landing_bound = 0.05;
  double landing_noise = 1e-12;  // tolerated increase between landing samples
  double seed_agreement = 1e-6;  // Newton must stay this close to the ray landing point
};

/// Class search, ray landing, Newton refinement and verification. Errors
/// raised by a stage are rethrown as stage_failure naming the stage.
PsfParameter find_lambda(const ExternalAddress& s, const FindConfig& config = {});

struct DistinctnessReport {
  std::vector<ExternalAddress> representatives;
  std::vector<Complex> parameters;
  std::vector<std::vector<double>> distances;
  double min_distance = 0.0;
  std::vector<std::array<std::size_t, 2>> collisions;
};

inline constexpr double kCollisionDistance = 1e-6;

/// Parameters of pairwise non-equivalent classes (one find_lambda per class
/// representative) and their distance matrix. Pairs closer than
/// kCollisionDistance are listed in `collisions`. Throws precondition if two
/// classes are equivalent.
DistinctnessReport distinctness_check(const std::vector<AddressClass>& classes,
                                      const FindConfig& config = {}, unsigned threads = 1);

struct Rect {
  double re_min = -4.0;
  double re_max = 4.0;
  double im_min = -4.0;
  double im_max = 4.0;
};

struct ScanResult {
  Rect rect;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<ConvergenceClass> cells;  // row-major, row 0 at im_max

  Complex parameter(std::size_t col, std::size_t row) const;
  const ConvergenceClass& at(std::size_t col, std::size_t row) const {
    return cells[row * width + col];
  }
};

ScanResult scan_parameter_plane(const Rect& rect, std::size_t width, std::size_t height,
                                const ConvergenceConfig& config = {}, unsigned threads = 1);

/// Gray levels of the PGM output.
unsigned char gray_level(ConvergenceTag tag);
std::string scan_to_csv(const ScanResult& scan);
std::string scan_to_pgm(const ScanResult& scan);

inline constexpr std::size_t kSearchCap = 100'000;

struct AddressSearchResult {
  std::vector<ExternalAddress> matches;
  std::vector<ExternalAddress> failures;  // candidates whose pipeline raised
  std::size_t candidates = 0;
};

/// Canonical addresses with first entry 0, shape (l, k) and entries in
/// [-bound, bound] whose find_lambda lands within 1e-6 of lambda.
AddressSearchResult address_search(Complex lambda, std::size_t l, std::size_t k, Digit bound,
                                   const FindConfig& config = {}, unsigned threads = 1);

}  // namespace psf
