#include "psfexp/itinerary.hpp"

#include <optional>

namespace psf {

namespace {

// Number of entries needed to pin down It(s|t): sigma^{n-1}(s) for
// n = 1 .. l_s + k_s covers every distinct point of the shift orbit.
std::size_t orbit_span(const ExternalAddress& s) {
  return s.preperiod_length() + s.period_length();
}

Itinerary assemble(const std::vector<Digit>& u, std::size_t l) {
  return {std::vector<Digit>(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(l)),
          std::vector<Digit>(u.begin() + static_cast<std::ptrdiff_t>(l), u.end())};
}

}  // namespace

bool itinerary_defined(const ExternalAddress& s, const ExternalAddress& t) {
  if (t.is_constant()) return false;
  ExternalAddress x = s;
  for (std::size_t n = 1; n <= orbit_span(s); ++n) {
    x = shift(x);
    if (x == t) return false;
  }
  return true;
}

void require_itinerary_defined(const ExternalAddress& s, const ExternalAddress& t) {
  if (t.is_constant()) {
    throw Error(ErrorKind::constant_pivot,
                "itinerary relative to constant sequence " + to_string(t) + " is not defined");
  }
  ExternalAddress x = s;
  for (std::size_t n = 1; n <= orbit_span(s); ++n) {
    x = shift(x);
    if (x == t) {
      throw Error(ErrorKind::undefined_itinerary,
                  "itinerary of " + to_string(s) + " with respect to " + to_string(t) +
                      " is undefined: shift " + std::to_string(n) + " equals the pivot");
    }
  }
}

Itinerary itinerary_by_definition(const ExternalAddress& s, const ExternalAddress& t) {
  require_itinerary_defined(s, t);

  // I_0 is whichever of (t_1 t, (t_1+1) t) and ((t_1-1) t, t_1 t) holds t.
  const Digit t1 = t[1];
  Digit a0 = 0;
  if (AddressInterval{prepend(t1, t), prepend(t1 + 1, t)}.contains(t)) {
    a0 = t1;
  } else if (AddressInterval{prepend(t1 - 1, t), prepend(t1, t)}.contains(t)) {
    a0 = t1 - 1;
  } else {
    throw Error(ErrorKind::inconsistency, "pivot lies in neither candidate interval");
  }

  std::vector<Digit> u;
  ExternalAddress x = s;
  for (std::size_t n = 1; n <= orbit_span(s); ++n) {
    std::optional<Digit> slot;
    for (Digit j = x[1] - 2; j <= x[1] + 1; ++j) {
      if (AddressInterval{prepend(j, t), prepend(j + 1, t)}.contains(x)) {
        slot = j;
        break;
      }
    }
    if (!slot) {
      throw Error(ErrorKind::inconsistency,
                  "no partition interval contains " + to_string(x));
    }
    u.push_back(*slot - a0);
    x = shift(x);
  }
  return assemble(u, s.preperiod_length());
}

Itinerary itinerary_by_algorithm(const ExternalAddress& s, const ExternalAddress& t) {
  require_itinerary_defined(s, t);
  const bool pivot_rises = shift(t) > t;
  std::vector<Digit> u;
  ExternalAddress x = s;
  for (std::size_t n = 1; n <= orbit_span(s); ++n) {
    const Digit sn = x[1];
    x = shift(x);
    Digit delta = 0;
    if (pivot_rises && x < t) delta = -1;
    if (!pivot_rises && x > t) delta = 1;
    u.push_back(sn - t[1] + delta);
  }
  return assemble(u, s.preperiod_length());
}

Itinerary kneading(const ExternalAddress& s) {
  if (!s.is_preperiodic()) {
    throw Error(ErrorKind::precondition,
                "kneading sequence requires a strictly preperiodic address, got " + to_string(s));
  }
  return itinerary_by_algorithm(s, s);
}

OrderData order_data(const ExternalAddress& s) {
  if (!s.is_preperiodic()) {
    throw Error(ErrorKind::precondition,
                "order data requires a strictly preperiodic address, got " + to_string(s));
  }
  OrderData out;
  ExternalAddress x = s;
  for (std::size_t n = 1; n <= orbit_span(s); ++n) {
    x = shift(x);
    out.relations.push_back(compare(x, s));
  }
  return out;
}

ExternalAddress recover_address(const Itinerary& u, const OrderData& order) {
  const std::size_t l = u.preperiod_length();
  const std::size_t span = order.relations.size();
  if (l == 0 || span <= l) {
    throw Error(ErrorKind::inconsistency,
                "kneading sequence " + to_string(u) + " and " + std::to_string(span) +
                    " order relations do not describe a preperiodic address");
  }
  const std::size_t k = span - l;
  if (k % u.period_length() != 0) {
    throw Error(ErrorKind::inconsistency, "kneading period does not divide the orbit period");
  }
  for (auto rel : order.relations) {
    if (rel == 0) throw Error(ErrorKind::inconsistency, "order data contains an equality");
  }

  const bool rises = order.relations.front() > 0;
  std::vector<Digit> word(span);
  for (std::size_t n = 1; n <= span; ++n) {
    const auto rel = order.relations[n - 1];
    Digit delta = 0;
    if (rises && rel < 0) delta = -1;
    if (!rises && rel > 0) delta = 1;
    word[n - 1] = u[n] - delta;
  }
  ExternalAddress s(std::vector<Digit>(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(l)),
                    std::vector<Digit>(word.begin() + static_cast<std::ptrdiff_t>(l), word.end()));

  const bool consistent = s.preperiod_length() == l && s.period_length() == k && s[1] == 0 &&
                          kneading(s) == u && order_data(s) == order;
  if (!consistent) {
    throw Error(ErrorKind::inconsistency,
                "no address realizes kneading sequence " + to_string(u) +
                    " with the given orbit order (candidate " + to_string(s) + ")");
  }
  return s;
}

}  // namespace psf
