#pragma once

#include <cstdint>

namespace permdiv {

/// Hard representation limit: a cell set lives in 128 bits, so n*n <= 128.
inline constexpr int kMaxRepresentableDegree = 11;

/// Tunables shared by the enumeration-backed and exponential operations.
/// The CLI fills these from flags and PERMDIV_* environment variables.
struct Limits {
  /// Cap on constructors that enumerate S_n. Raise with care: 10! = 3.6M.
  int max_enum_degree = 9;
  /// Node/set budget for exponential searches (spread enumeration, sunflower
  /// detection).
  std::uint64_t work_budget = 200'000'000;
  /// Highest working precision (bits) before a comparison is reported undecided.
  unsigned precision_cap = 512;
  /// Worker threads for the parallel loops. Results never depend on it.
  unsigned workers = 1;
};

}  // namespace permdiv
