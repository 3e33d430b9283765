#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "errors.hpp"

namespace bellasym {

// Tolerances used across the library.  Exact normalization checks sit at
// 1e-12; aggregate checks that accumulate round-off (mixtures over many
// atoms, no-signaling sums, reported bounds) sit at 1e-9.
inline constexpr double kProbTol = 1e-12;
inline constexpr double kAggregateTol = 1e-9;
inline constexpr double kNoSignalingTol = 1e-9;

namespace detail {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fixed 12-significant-digit form for reports and CSV rows.
inline std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

inline void require_distribution(const std::vector<double>& p,
                                 const std::string& label,
                                 double tol = kProbTol) {
  if (p.empty()) throw ValidationError(label + ": empty distribution");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v)) throw ValidationError(label + ": non-finite entry");
    if (v < 0.0) throw ValidationError(label + ": negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw ValidationError(label + ": entries sum to " + format_double(sum) +
                          ", expected 1");
}

// base^exp, saturating just above `cap` instead of overflowing.
inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp,
                                 std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

}  // namespace detail
}  // namespace bellasym
