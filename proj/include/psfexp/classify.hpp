#pragma once

// Which preperiodic addresses describe the same postsingularly finite
// exponential map: two addresses s, s' are equivalent iff It(s'|s) = K(s).

#include <cstddef>
#include <string>
#include <vector>

#include "psfexp/itinerary.hpp"

namespace psf {

struct AddressClass {
  std::vector<ExternalAddress> members;  // sorted lexicographically
  Itinerary kneading;
  std::size_t preperiod = 0;   // l
  std::size_t period = 0;      // k
  std::size_t kneading_period = 0;  // k'

  bool operator==(const AddressClass&) const = default;
};

/// Largest l + k accepted by the exhaustive class search.
inline constexpr std::size_t kMaxClassSpan = 20;

bool are_equivalent(const ExternalAddress& s, const ExternalAddress& s2);

/// All canonical s' with shape (l, k), first entry 0 and It(s'|s) = K(s).
/// Throws class_size when the member count breaks the k/k' law.
AddressClass equivalence_class(const ExternalAddress& s);

/// Class members reachable by pulling back the periodic orbit points that
/// share the tail of the kneading sequence along u_l, ..., u_1. Finds every
/// member when k' < k; used as an independent check of the class search.
std::vector<ExternalAddress> pullback_members(const ExternalAddress& s);

/// Whether `size` is allowed for a class with periods k and k'.
bool class_size_admissible(std::size_t size, std::size_t k, std::size_t k_prime);

struct ClassReport {
  ExternalAddress address;
  AddressClass address_class;
  // Pairwise over ordered member pairs (a, b): It(b|a) = K(a) and
  // It(a|b) = K(b); the three conditions agree on every pair.
  bool itinerary_conditions_agree = true;
  bool pairwise_equivalent = true;
  bool equal_shapes = true;
  bool size_law = true;
  bool pullback_subset = true;
  std::size_t violations = 0;
};

/// Requires a strictly preperiodic address with first entry 0.
ClassReport class_invariants_report(const ExternalAddress& s);

}  // namespace psf
