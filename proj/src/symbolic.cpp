#include "psfexp/symbolic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

namespace psf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::empty_period: return "empty_period";
    case ErrorKind::entry_range: return "entry_range";
    case ErrorKind::boundary: return "boundary";
    case ErrorKind::constant_pivot: return "constant_pivot";
    case ErrorKind::undefined_itinerary: return "undefined_itinerary";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::inconsistency: return "inconsistency";
    case ErrorKind::class_size: return "class_size";
    case ErrorKind::resource: return "resource";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::on_ray_collision: return "on_ray_collision";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::spurious_root: return "spurious_root";
    case ErrorKind::first_entry_nonzero: return "first_entry_nonzero";
    case ErrorKind::continuation_divergence: return "continuation_divergence";
    case ErrorKind::stage_failure: return "stage_failure";
    case ErrorKind::unsupported_format: return "unsupported_format";
    case ErrorKind::collision: return "collision";
  }
  return "unknown";
}

namespace detail {

void canonicalize(std::vector<Digit>& preperiod, std::vector<Digit>& period) {
  const std::size_t k = period.size();
  for (std::size_t d = 1; d < k; ++d) {
    if (k % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < k && repeats; ++i) repeats = period[i] == period[i - d];
    if (repeats) {
      period.resize(d);
      break;
    }
  }
  // Absorb trailing preperiod entries into the cycle: w a (p a)^inf = w (a p)^inf.
  while (!preperiod.empty() && preperiod.back() == period.back()) {
    preperiod.pop_back();
    std::rotate(period.rbegin(), period.rbegin() + 1, period.rend());
  }
}

}  // namespace detail

std::size_t comparison_bound(std::size_t l1, std::size_t k1, std::size_t l2,
                             std::size_t k2) {
  return std::max(l1, l2) + std::lcm(k1, k2);
}

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool peek_integer() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    if (c == '-' && pos_ + 1 < text_.size()) c = text_[pos_ + 1];
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  }
  Digit integer() {
    skip_space();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    Digit value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) {
      throw Error(ErrorKind::entry_range, "address entry out of range");
    }
    if (ec != std::errc() || ptr == first) fail("expected integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    if (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
        text_[pos_] != '(' && text_[pos_] != ')') {
      fail("integers must be separated by spaces");
    }
    if (value > kEntryCap || value < -kEntryCap) {
      throw Error(ErrorKind::entry_range,
                  "address entry " + std::to_string(value) + " exceeds magnitude 10^6");
    }
    return value;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::syntax, "cannot parse address \"" + std::string(text_) +
                                       "\" at offset " + std::to_string(pos_) + ": " + what +
                                       " (grammar: INT{0,64} \"(\" INT{1,64} \")\")");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::pair<std::vector<Digit>, std::vector<Digit>> parse_words(std::string_view text) {
  Scanner scan(text);
  std::vector<Digit> pre;
  std::vector<Digit> per;
  while (scan.peek_integer()) pre.push_back(scan.integer());
  scan.expect('(');
  while (scan.peek_integer()) per.push_back(scan.integer());
  scan.expect(')');
  if (!scan.at_end()) scan.fail("trailing characters");
  if (per.empty()) throw Error(ErrorKind::empty_period, "period word must be nonempty");
  if (pre.size() > kWordCap || per.size() > kWordCap) {
    throw Error(ErrorKind::syntax, "words are limited to 64 entries");
  }
  return {std::move(pre), std::move(per)};
}

}  // namespace

ExternalAddress parse_address(std::string_view text) {
  auto [pre, per] = parse_words(text);
  return {std::move(pre), std::move(per)};
}

Itinerary parse_itinerary(std::string_view text) {
  auto [pre, per] = parse_words(text);
  return {std::move(pre), std::move(per)};
}

std::string format_words(const std::vector<Digit>& preperiod,
                         const std::vector<Digit>& period) {
  std::ostringstream out;
  for (Digit d : preperiod) out << d << ' ';
  out << '(';
  for (std::size_t i = 0; i < period.size(); ++i) {
    if (i) out << ' ';
    out << period[i];
  }
  out << ')';
  return out.str();
}

Digit base_offset(const ExternalAddress& pivot) {
  if (pivot.is_constant()) {
    throw Error(ErrorKind::constant_pivot,
                "constant sequence " + to_string(pivot) + " cannot be a partition pivot");
  }
  // t lies in (t_1 t, (t_1 + 1) t) iff sigma(t) > t.
  return shift(pivot) > pivot ? pivot[1] : pivot[1] - 1;
}

AddressInterval partition_interval(const ExternalAddress& pivot, Digit u) {
  const Digit a = base_offset(pivot) + u;
  return {prepend(a, pivot), prepend(a + 1, pivot)};
}

ExternalAddress pullback(const ExternalAddress& t, const ExternalAddress& pivot, Digit u) {
  const Digit a = base_offset(pivot) + u;
  if (t == pivot) {
    throw Error(ErrorKind::boundary, "pullback of the pivot itself lands on a partition boundary");
  }
  // j t lies above j s exactly when t > s.
  return prepend(t > pivot ? a : a + 1, t);
}

}  // namespace psf
