#pragma once

// r-spreadness of permutation families and the spread-approximation
// decomposition that peels off branches rooted at maximal non-spread patterns.
//
// All decisions use the cross-multiplied integer form
//   b^|S| * |F(S)|  >  a^|S| * |F|      (r = a/b)
// so no floating point ever enters a verdict.

#include <optional>
#include <string>
#include <vector>

#include "permdiv/bounds.hpp"
#include "permdiv/core.hpp"

namespace permdiv {

struct SpreadParams {
  /// Spread ratio r = a/b > 0.
  Rational r;
  /// Largest admissible branch root size; compared against integers through
  /// certified enclosures.
  CertifiedReal q_cap;

  /// r = n/3 and q_cap = 4 log2 n.
  static SpreadParams standard(int n);
  static SpreadParams with(const Rational& r, const Rational& q_cap);
};

/// A pattern S violating the spread inequality: lhs = |F(S)| > rhs = r^-|S| |F|.
struct SpreadWitness {
  PartialPerm set;
  std::size_t lhs = 0;
  Rational rhs;
};

struct SpreadCheck {
  bool spread = true;
  /// On failure: the violation with the largest ratio lhs/rhs; ties go to the
  /// smaller pattern, then to (row, col) order.
  std::optional<SpreadWitness> witness;
};

/// Throws InputError for an empty family or r <= 0, BudgetExceeded when the
/// sum over members of 2^|member| exceeds limits.work_budget.
SpreadCheck is_r_spread(const PermFamily& family, const Rational& r, const Limits& limits = {});
SpreadCheck is_r_spread(const PartialFamily& family, const Rational& r, const Limits& limits = {});

/// S(F, r): every nonempty pattern that is not r-spread in F. Only subsets of
/// members can violate, so only those are enumerated.
PartialFamily non_spread_sets(const PermFamily& family, const Rational& r, const Limits& limits = {});
PartialFamily non_spread_sets(const PartialFamily& family, const Rational& r, const Limits& limits = {});

/// S*(F, r): the inclusion-maximal members of S(F, r).
PartialFamily maximal_non_spread(const PermFamily& family, const Rational& r, const Limits& limits = {});

enum class StopReason { exhausted, oversize_witness };
std::string to_string(StopReason s);

struct SpreadBranch {
  PartialPerm root;
  PermFamily members;
  /// Exhaustive re-check that restriction(members, root) is r-spread.
  bool restriction_spread = false;
};

struct SpreadDecomposition {
  int degree = 1;
  std::vector<SpreadBranch> branches;
  PermFamily remainder{1};
  Rational r;
  std::string q_cap_description;
  Enclosure q_cap_enclosure;
  StopReason stop_reason = StopReason::exhausted;
  /// The first oversize maximal pattern (canonical order) when stopped by size.
  std::optional<PartialPerm> oversize_root;
  /// Warning flag: the procedure is defined for any input but meant for
  /// intersecting ones.
  bool input_intersecting = true;
  /// Whether the collected roots form an intersecting family. Reported only.
  bool roots_intersecting = true;

  static constexpr const char* selection_rule = "max |F_i(B)|, then min |B|, then lexicographic cells";
};

/// Peels F_1 = F: at step i, stop if F_i is empty or S*(F_i, r) is empty
/// (exhausted) or some member of S*(F_i, r) exceeds q_cap (oversize_witness);
/// otherwise take B_i from S*(F_i, r) by the selection rule, branch off the
/// members containing B_i and continue with the rest. The output is checked
/// against its invariants (partition, containment, per-branch spreadness,
/// root sizes) and InvariantViolation is thrown if any fails.
SpreadDecomposition spread_decompose(const PermFamily& family, const SpreadParams& params,
                                     const Limits& limits = {});

}  // namespace permdiv
