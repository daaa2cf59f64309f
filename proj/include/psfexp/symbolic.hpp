#pragma once

// Eventually periodic integer sequences: external addresses and itineraries.
//
// A sequence is stored as a finite preperiod word followed by a period word
// repeated forever, s_1 ... s_l (p_1 ... p_k)^inf. Values are always kept in
// canonical form (primitive period word, shortest preperiod), so structural
// equality is sequence equality.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psfexp/error.hpp"

namespace psf {

using Digit = std::int64_t;

/// Parser limits: entries are bounded by 10^6 in magnitude and each word
/// holds at most 64 entries.
inline constexpr Digit kEntryCap = 1'000'000;
inline constexpr std::size_t kWordCap = 64;

namespace detail {
void canonicalize(std::vector<Digit>& preperiod, std::vector<Digit>& period);
}

struct AddressTag {};
struct ItineraryTag {};

template <class Tag>
class EventuallyPeriodic {
 public:
  EventuallyPeriodic() : period_{0} {}

  EventuallyPeriodic(std::vector<Digit> preperiod, std::vector<Digit> period)
      : preperiod_(std::move(preperiod)), period_(std::move(period)) {
    if (period_.empty()) {
      throw Error(ErrorKind::empty_period, "period word must be nonempty");
    }
    detail::canonicalize(preperiod_, period_);
  }

  /// Reinterprets the same integer sequence under another tag.
  template <class Other>
  explicit EventuallyPeriodic(const EventuallyPeriodic<Other>& other)
      : preperiod_(other.preperiod()), period_(other.period()) {}

  const std::vector<Digit>& preperiod() const noexcept { return preperiod_; }
  const std::vector<Digit>& period() const noexcept { return period_; }
  std::size_t preperiod_length() const noexcept { return preperiod_.size(); }
  std::size_t period_length() const noexcept { return period_.size(); }

  bool is_constant() const noexcept {
    return preperiod_.empty() && period_.size() == 1;
  }
  /// Strictly preperiodic: l >= 1 in canonical form.
  bool is_preperiodic() const noexcept { return !preperiod_.empty(); }

  /// Entry s_n of the expanded sequence, n >= 1.
  Digit operator[](std::size_t n) const noexcept {
    const std::size_t l = preperiod_.size();
    if (n <= l) return preperiod_[n - 1];
    return period_[(n - l - 1) % period_.size()];
  }

  bool operator==(const EventuallyPeriodic&) const = default;

 private:
  std::vector<Digit> preperiod_;
  std::vector<Digit> period_;
};

using ExternalAddress = EventuallyPeriodic<AddressTag>;
using Itinerary = EventuallyPeriodic<ItineraryTag>;

/// Number of leading entries that decides equality and order of two
/// eventually periodic sequences: max(l1, l2) + lcm(k1, k2).
std::size_t comparison_bound(std::size_t l1, std::size_t k1, std::size_t l2,
                             std::size_t k2);

template <class Tag>
Digit entry(const EventuallyPeriodic<Tag>& s, std::size_t n) {
  return s[n];
}

template <class Tag>
EventuallyPeriodic<Tag> shift(const EventuallyPeriodic<Tag>& s) {
  if (s.is_preperiodic()) {
    return {std::vector<Digit>(s.preperiod().begin() + 1, s.preperiod().end()),
            s.period()};
  }
  std::vector<Digit> rotated(s.period().begin() + 1, s.period().end());
  rotated.push_back(s.period().front());
  return {{}, std::move(rotated)};
}

template <class Tag>
EventuallyPeriodic<Tag> shift(const EventuallyPeriodic<Tag>& s, std::size_t n) {
  EventuallyPeriodic<Tag> out = s;
  for (std::size_t i = 0; i < n; ++i) out = shift(out);
  return out;
}

/// Concatenation j s.
template <class Tag>
EventuallyPeriodic<Tag> prepend(Digit j, const EventuallyPeriodic<Tag>& s) {
  std::vector<Digit> pre;
  pre.reserve(s.preperiod_length() + 1);
  pre.push_back(j);
  pre.insert(pre.end(), s.preperiod().begin(), s.preperiod().end());
  return {std::move(pre), s.period()};
}

/// Lexicographic order of the infinite expansions.
template <class Tag>
std::strong_ordering compare(const EventuallyPeriodic<Tag>& a,
                             const EventuallyPeriodic<Tag>& b) {
  const std::size_t m = comparison_bound(a.preperiod_length(), a.period_length(),
                                         b.preperiod_length(), b.period_length());
  for (std::size_t n = 1; n <= m; ++n) {
    if (auto c = a[n] <=> b[n]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

template <class Tag>
std::strong_ordering operator<=>(const EventuallyPeriodic<Tag>& a,
                                 const EventuallyPeriodic<Tag>& b) {
  return compare(a, b);
}

/// The first n entries of the expansion.
template <class Tag>
std::vector<Digit> expand(const EventuallyPeriodic<Tag>& s, std::size_t n) {
  std::vector<Digit> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = s[i + 1];
  return out;
}

/// Parses "s_1 ... s_l (p_1 ... p_k)"; throws Error on malformed input.
ExternalAddress parse_address(std::string_view text);
Itinerary parse_itinerary(std::string_view text);

/// Inverse of parsing with single spaces, e.g. "0 (2 1)".
std::string format_words(const std::vector<Digit>& preperiod,
                         const std::vector<Digit>& period);

template <class Tag>
std::string to_string(const EventuallyPeriodic<Tag>& s) {
  return format_words(s.preperiod(), s.period());
}

/// Open lexicographic interval (lower, upper).
struct AddressInterval {
  ExternalAddress lower;
  ExternalAddress upper;

  bool contains(const ExternalAddress& x) const {
    return lower < x && x < upper;
  }
};

/// Offset a_0 such that the pivot t lies in (a_0 t, (a_0 + 1) t).
/// Throws constant_pivot for constant t.
Digit base_offset(const ExternalAddress& pivot);

/// The partition interval I_u = ((a_0 + u) t, (a_0 + u + 1) t) of the
/// pivot t.
AddressInterval partition_interval(const ExternalAddress& pivot, Digit u);

/// The unique concatenation j t lying in the partition interval I_u of the
/// pivot s. Throws boundary when t == s (j s is a partition endpoint for
/// every j) and constant_pivot when s is constant.
ExternalAddress pullback(const ExternalAddress& t, const ExternalAddress& pivot,
                         Digit u);

}  // namespace psf
