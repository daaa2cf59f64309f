#pragma once

// Itineraries It(s|t) of one address relative to the partition defined by
// the shift-preimages of another, kneading sequences K(s) = It(s|s), and the
// reconstruction of s from K(s) plus the order of its shift orbit.

#include <compare>
#include <vector>

#include "psfexp/symbolic.hpp"

namespace psf {

/// Relations of sigma^n(s) against s for n = 1 .. l + k. For a strictly
/// preperiodic s no relation is `equal`; later n repeat with period k.
struct OrderData {
  std::vector<std::strong_ordering> relations;

  bool operator==(const OrderData&) const = default;
};

/// Entry-by-entry interval membership. Kept as the reference the faster
/// construction is checked against.
Itinerary itinerary_by_definition(const ExternalAddress& s, const ExternalAddress& t);

/// u_n = s_n - t_1 + delta_n with delta_n in {-1, 0, 1}.
Itinerary itinerary_by_algorithm(const ExternalAddress& s, const ExternalAddress& t);

/// K(s) = It(s|s) for strictly preperiodic s.
Itinerary kneading(const ExternalAddress& s);

OrderData order_data(const ExternalAddress& s);

/// Recovers the address with first entry 0 whose kneading sequence is u and
/// whose shift orbit is ordered as `order`. The result is re-verified; an
/// inconsistent pair throws inconsistency.
ExternalAddress recover_address(const Itinerary& u, const OrderData& order);

/// Throws unless It(s|t) is defined: t non-constant and sigma^n(s) != t for
/// all n >= 1.
void require_itinerary_defined(const ExternalAddress& s, const ExternalAddress& t);

/// Non-throwing definedness test.
bool itinerary_defined(const ExternalAddress& s, const ExternalAddress& t);

}  // namespace psf
