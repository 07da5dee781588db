#pragma once

// Seeded Monte Carlo experiments over p-random subsets of the n x n grid.
//
// Every trial draws from its own counter-based stream keyed by (seed, trial),
// so results do not depend on the number of worker threads. Cells are visited
// in index order and cell i is kept iff its 64-bit draw u satisfies
// u * b < a * 2^64 for p = a/b. The same seed therefore couples runs at
// different p: raising p only ever adds cells.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permdiv/bounds.hpp"
#include "permdiv/core.hpp"

namespace permdiv {

inline constexpr const char* kGeneratorName = "splitmix64/trial-keyed";

/// SplitMix64 positioned at (seed, trial).
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial);
  std::uint64_t next();
  /// Bernoulli(p) for p = a/b in [0, 1], decided exactly from one draw.
  bool bernoulli(const Rational& p);

 private:
  std::uint64_t state_;
};

struct TrialConfig {
  Rational p{1, 2};
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct EstimateReport {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  Rational estimate;
  /// sqrt(estimate (1 - estimate) / trials).
  Enclosure std_error;
  /// The probability actually sampled (after clamping for the spread lemma).
  Rational p;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorName;

  // Spread-lemma fields; unset for plain estimates.
  std::optional<Enclosure> bound;
  bool bound_vacuous = false;
  bool clamped = false;
  bool consistent = true;
  std::string note;
};

/// Indices of [0, ground_size) kept with probability p each.
std::vector<int> sample_random_subset(int ground_size, const Rational& p, TrialStream& stream);

/// Whether some member's cells all lie in w.
bool covers_member(const PermFamily& family, const CellSet& w);

/// Pr[some member lies inside a p-random subset of the n^2 cells]. Throws
/// InputError for an empty family, p outside [0, 1] or zero trials.
EstimateReport estimate_cover_probability(const PermFamily& family, const TrialConfig& cfg);

/// Runs the cover estimate at p = m * delta (clamped to 1 with a flag) and
/// attaches the certified lower bound 1 - ((1 + H(delta)) / log2(r delta))^m k
/// with k = n. Throws HypothesisError if the family is not r-spread.
EstimateReport verify_spread_lemma(const PermFamily& family, const Rational& r, const Rational& delta,
                                   const Rational& m, const TrialConfig& cfg, const Limits& limits = {});

/// Pr[one member inside U1 and one inside U2] where U1 is a cfg.p-random subset
/// of the grid and U2 its complement. Zero for every intersecting family.
EstimateReport disjoint_split_experiment(const PermFamily& family, const TrialConfig& cfg);

}  // namespace permdiv
