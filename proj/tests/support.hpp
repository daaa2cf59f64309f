#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "psfexp/symbolic.hpp"

namespace psf::test {

using Rng = std::mt19937_64;

inline std::vector<Digit> random_word(Rng& rng, std::size_t n, Digit lo, Digit hi) {
  std::uniform_int_distribution<Digit> d(lo, hi);
  std::vector<Digit> w(n);
  for (auto& x : w) x = d(rng);
  return w;
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random address with raw preperiod length in [l_min, l_max] and period
/// length in [1, k_max]; canonical form may be shorter.
inline ExternalAddress random_address(Rng& rng, std::size_t l_min, std::size_t l_max,
                                      std::size_t k_max, Digit lo, Digit hi) {
  auto pre = random_word(rng, pick(rng, l_min, l_max), lo, hi);
  auto per = random_word(rng, pick(rng, 1, k_max), lo, hi);
  return {std::move(pre), std::move(per)};
}

/// Strictly preperiodic address, optionally with s_1 = 0.
inline ExternalAddress random_preperiodic(Rng& rng, std::size_t l_max, std::size_t k_max,
                                          Digit lo, Digit hi, bool first_zero) {
  for (;;) {
    auto pre = random_word(rng, pick(rng, 1, l_max), lo, hi);
    if (first_zero) pre[0] = 0;
    ExternalAddress s(std::move(pre), random_word(rng, pick(rng, 1, k_max), lo, hi));
    if (s.is_preperiodic() && (!first_zero || s[1] == 0)) return s;
  }
}

/// Largest |z| along an orbit prefix.
template <class Points>
double orbit_radius(const Points& points) {
  double r = 0.0;
  for (const auto& z : points) r = std::max(r, std::abs(z));
  return r;
}

/// Canonical addresses with s_1 = 0, exact shape (l, k) and entries in
/// [-bound, bound], for l in [1, l_max] and k in [1, k_max].
inline std::vector<ExternalAddress> corpus(std::size_t l_max, std::size_t k_max, Digit bound) {
  std::vector<ExternalAddress> out;
  const Digit base = 2 * bound + 1;
  for (std::size_t l = 1; l <= l_max; ++l) {
    for (std::size_t k = 1; k <= k_max; ++k) {
      const std::size_t free = l - 1 + k;
      std::size_t total = 1;
      for (std::size_t i = 0; i < free; ++i) total *= static_cast<std::size_t>(base);
      for (std::size_t code = 0; code < total; ++code) {
        std::vector<Digit> digits(free);
        std::size_t c = code;
        for (auto& d : digits) {
          d = static_cast<Digit>(c % static_cast<std::size_t>(base)) - bound;
          c /= static_cast<std::size_t>(base);
        }
        std::vector<Digit> pre{0};
        pre.insert(pre.end(), digits.begin(), digits.begin() + static_cast<long>(l - 1));
        std::vector<Digit> per(digits.begin() + static_cast<long>(l - 1), digits.end());
        ExternalAddress s(pre, per);
        if (s.preperiod_length() == l && s.period_length() == k) out.push_back(s);
      }
    }
  }
  return out;
}

}  // namespace psf::test
