#include "psfexp/classify.hpp"

#include <algorithm>
#include <set>

namespace psf {

namespace {

void require_coding_address(const ExternalAddress& s) {
  if (!s.is_preperiodic()) {
    throw Error(ErrorKind::precondition,
                "expected a strictly preperiodic address, got " + to_string(s));
  }
  if (s[1] != 0) {
    throw Error(ErrorKind::precondition,
                "expected an address starting with 0, got " + to_string(s));
  }
}

// It(a|b) when defined, compared against `expected`.
bool itinerary_matches(const ExternalAddress& a, const ExternalAddress& b,
                       const Itinerary& expected) {
  return itinerary_defined(a, b) && itinerary_by_algorithm(a, b) == expected;
}

}  // namespace

bool class_size_admissible(std::size_t size, std::size_t k, std::size_t k_prime) {
  if (k_prime == 0 || k % k_prime != 0) return false;
  if (k > k_prime) return size == k / k_prime;
  return size == 1 || size == 2;
}

bool are_equivalent(const ExternalAddress& s, const ExternalAddress& s2) {
  require_coding_address(s);
  require_coding_address(s2);
  const Itinerary ks = kneading(s);
  const Itinerary ks2 = kneading(s2);
  const bool forward = itinerary_matches(s2, s, ks);
  const bool backward = itinerary_matches(s, s2, ks2);
  if (forward != backward) {
    throw Error(ErrorKind::inconsistency,
                "It(" + to_string(s2) + "|" + to_string(s) + ") = K and It(" + to_string(s) + "|" +
                    to_string(s2) + ") = K' disagree");
  }
  if (forward && (s.preperiod_length() != s2.preperiod_length() ||
                  s.period_length() != s2.period_length())) {
    throw Error(ErrorKind::inconsistency,
                "equivalent addresses " + to_string(s) + " and " + to_string(s2) +
                    " have different shapes");
  }
  return forward;
}

AddressClass equivalence_class(const ExternalAddress& s) {
  require_coding_address(s);
  const std::size_t l = s.preperiod_length();
  const std::size_t k = s.period_length();
  const std::size_t span = l + k;
  if (span > kMaxClassSpan) {
    throw Error(ErrorKind::resource, "class search is limited to l + k <= " +
                                         std::to_string(kMaxClassSpan) + ", got " +
                                         std::to_string(span));
  }
  const Itinerary u = kneading(s);

  // s'_n = u_n + s_1 - delta_n; the first entry is pinned to 0.
  std::set<std::vector<Digit>> seen;
  std::vector<ExternalAddress> members;
  std::vector<int> delta(span, -1);
  delta[0] = 0;
  for (;;) {
    std::vector<Digit> word(span);
    for (std::size_t n = 1; n <= span; ++n) word[n - 1] = u[n] + s[1] - delta[n - 1];
    ExternalAddress candidate(std::vector<Digit>(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(l)),
                              std::vector<Digit>(word.begin() + static_cast<std::ptrdiff_t>(l), word.end()));
    if (candidate[1] == 0 && candidate.preperiod_length() == l && candidate.period_length() == k &&
        itinerary_matches(candidate, s, u) && seen.insert(word).second) {
      members.push_back(std::move(candidate));
    }
    // odometer over delta_2 .. delta_{l+k}
    std::size_t pos = 1;
    while (pos < span && delta[pos] == 1) delta[pos++] = -1;
    if (pos >= span) break;
    ++delta[pos];
  }
  std::sort(members.begin(), members.end());

  AddressClass out{std::move(members), u, l, k, u.period_length()};
  if (!class_size_admissible(out.members.size(), k, out.kneading_period)) {
    throw Error(ErrorKind::class_size,
                "class of " + to_string(s) + " has " + std::to_string(out.members.size()) +
                    " members with k = " + std::to_string(k) +
                    ", k' = " + std::to_string(out.kneading_period));
  }
  return out;
}

std::vector<ExternalAddress> pullback_members(const ExternalAddress& s) {
  require_coding_address(s);
  const std::size_t l = s.preperiod_length();
  const std::size_t k = s.period_length();
  const Itinerary u = kneading(s);
  const Itinerary periodic_tail = shift(u, l);

  std::vector<ExternalAddress> out;
  ExternalAddress x = shift(s, l);
  Itinerary tail = periodic_tail;
  for (std::size_t j = 0; j < k; ++j) {
    if (tail == periodic_tail) {
      ExternalAddress y = x;
      for (std::size_t i = l; i >= 1; --i) y = pullback(y, s, u[i]);
      out.push_back(std::move(y));
    }
    x = shift(x);
    tail = shift(tail);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ClassReport class_invariants_report(const ExternalAddress& s) {
  require_coding_address(s);
  ClassReport report{s, equivalence_class(s)};
  const auto& members = report.address_class.members;
  for (const auto& a : members) {
    const Itinerary ka = kneading(a);
    for (const auto& b : members) {
      const Itinerary kb = kneading(b);
      const bool c3 = itinerary_matches(b, a, ka);
      const bool c4 = itinerary_matches(a, b, kb);
      const bool c5 = c3 && c4 && ka == kb;
      if (c3 != c4 || c4 != c5) {
        report.itinerary_conditions_agree = false;
        ++report.violations;
      }
      if (!c3) {
        report.pairwise_equivalent = false;
        ++report.violations;
      }
      if (a.preperiod_length() != b.preperiod_length() || a.period_length() != b.period_length()) {
        report.equal_shapes = false;
        ++report.violations;
      }
    }
  }
  report.size_law = class_size_admissible(members.size(), report.address_class.period,
                                          report.address_class.kneading_period);
  if (!report.size_law) ++report.violations;
  for (const auto& m : pullback_members(s)) {
    if (!std::binary_search(members.begin(), members.end(), m)) {
      report.pullback_subset = false;
      ++report.violations;
    }
  }
  return report;
}

}  // namespace psf
