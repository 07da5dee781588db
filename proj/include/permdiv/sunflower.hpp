#pragma once

// Pseudo sunflowers, the compression A(H, s), and the layered basis cascade
// that turns the roots of a spread decomposition into a star or triangle residue.
//
// A pseudo sunflower of size t with center C is a list F_0, ..., F_{t-1} of
// distinct sets with C a proper subset of F_0 and the sets F_i \ C pairwise
// disjoint. Detection only uses members of one fixed size as petals.

#include <optional>
#include <string>
#include <vector>

#include "permdiv/bounds.hpp"
#include "permdiv/core.hpp"

namespace permdiv {

struct PseudoSunflower {
  PartialPerm center;
  PartialPerm petal0;
  std::vector<PartialPerm> petals;
};

/// Identifier of the search order and center choice, recorded in reports.
inline constexpr const char* kDetectionRule =
    "F0 canonical; C proper subset of F0 by size then cells; petals backtracked in canonical order; "
    "center reported as the union of pairwise petal intersections";

/// An s-uniform pseudo sunflower of size s+1 in H, or none. The returned center
/// is the inclusion-minimal one for the petals found. Throws InputError if a
/// member has more than s cells or s < 1, BudgetExceeded past the work budget.
std::optional<PseudoSunflower> find_pseudo_sunflower(const PartialFamily& h, int s, const Limits& limits = {});

/// A(H, s): while H holds an s-uniform pseudo sunflower of size s+1 with
/// center C, drop every member containing C and add C.
PartialFamily compress(const PartialFamily& h, int s, const Limits& limits = {});

/// Members of B with no proper subset in B.
PartialFamily minimal_members(const PartialFamily& b);

enum class ResidueShape { star, triangle, other };
std::string to_string(ResidueShape s);

struct Classification {
  ResidueShape shape = ResidueShape::other;
  /// Star center: the smallest cell lying in every member.
  std::optional<Cell> center;
  /// Triangle cells in (row, col) order.
  std::vector<Cell> triangle;
  std::string note;
};

/// Throws InputError if a member has more than 2 cells.
Classification classify_two_uniform(const PartialFamily& a);

struct CascadeLayer {
  int size = 0;
  PartialFamily members{1};
  BigInt furedi_bound;  // size^size
};

struct CascadeResult {
  int q_int = 0;
  PartialFamily minimal{1};
  /// A_i for i = q_int down to 3 (empty when q_int < 3).
  std::vector<CascadeLayer> layers;
  /// A_2, members of size at most 2.
  PartialFamily residue{1};
  Classification classification;
};

/// T = minimal_members(B); P_q = A(T, q); for i = q..4, A_i = i-sets of P_i and
/// P_{i-1} = A(P_i \ A_i, i-1); A_3 = 3-sets of P_3; A_2 = P_3 \ A_3. For q < 3
/// the residue is A(T, q) directly. Every |A_i| <= i^i is checked and a failure
/// throws InvariantViolation. Members must have between 1 and q cells.
CascadeResult basis_cascade(const PartialFamily& b, int q_int, const Limits& limits = {});

/// floor(4 log2 n), decided through certified enclosures.
int cascade_uniformity(unsigned n, const Limits& limits = {});

struct FurediCheck {
  std::size_t size = 0;  // members with exactly k cells
  BigInt bound;          // s^k
  bool sunflower_found = false;
  /// sunflower_found or size <= bound.
  bool holds = true;
};

/// The size-k layer of H against the bound s^k, searching k-uniform pseudo
/// sunflowers of size s+1.
FurediCheck furedi_check(const PartialFamily& h, int s, int k, const Limits& limits = {});

}  // namespace permdiv
