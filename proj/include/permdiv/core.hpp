#pragma once

// Permutations of [n] viewed as n-cell subsets of the n x n grid, partial
// permutations ("proper" cell sets), and families of both.

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "permdiv/config.hpp"

namespace permdiv {

/// Grid position (row i, column j), 1-based; stands for the ground element
/// x_{ij}, i.e. "position i maps to j".
struct Cell {
  int row = 1;
  int col = 1;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

std::string to_string(const Cell& c);

/// A set of grid cells of a degree-n grid packed into 128 bits. Bit index of
/// cell (i, j) is (i-1)*n + (j-1), so ascending bit order is (row, col)
/// lexicographic order. The degree is not stored; callers keep it alongside.
class CellSet {
 public:
  constexpr CellSet() = default;

  static constexpr CellSet bit(int index) {
    CellSet s;
    s.set(index);
    return s;
  }

  constexpr bool test(int index) const { return (words_[index >> 6] >> (index & 63)) & 1U; }
  constexpr void set(int index) { words_[index >> 6] |= std::uint64_t{1} << (index & 63); }
  constexpr void reset(int index) { words_[index >> 6] &= ~(std::uint64_t{1} << (index & 63)); }

  constexpr int count() const { return std::popcount(words_[0]) + std::popcount(words_[1]); }
  constexpr bool empty() const { return (words_[0] | words_[1]) == 0; }

  constexpr bool subset_of(const CellSet& o) const {
    return (words_[0] & ~o.words_[0]) == 0 && (words_[1] & ~o.words_[1]) == 0;
  }
  constexpr bool intersects(const CellSet& o) const {
    return (words_[0] & o.words_[0]) != 0 || (words_[1] & o.words_[1]) != 0;
  }

  constexpr CellSet operator&(const CellSet& o) const {
    return CellSet(words_[0] & o.words_[0], words_[1] & o.words_[1]);
  }
  constexpr CellSet operator|(const CellSet& o) const {
    return CellSet(words_[0] | o.words_[0], words_[1] | o.words_[1]);
  }
  constexpr CellSet operator^(const CellSet& o) const {
    return CellSet(words_[0] ^ o.words_[0], words_[1] ^ o.words_[1]);
  }
  /// Set difference.
  constexpr CellSet operator-(const CellSet& o) const {
    return CellSet(words_[0] & ~o.words_[0], words_[1] & ~o.words_[1]);
  }
  constexpr CellSet& operator|=(const CellSet& o) { return *this = *this | o; }
  constexpr CellSet& operator&=(const CellSet& o) { return *this = *this & o; }

  /// Lowest set bit index, or -1 when empty.
  constexpr int lowest() const {
    if (words_[0] != 0) return std::countr_zero(words_[0]);
    if (words_[1] != 0) return 64 + std::countr_zero(words_[1]);
    return -1;
  }

  /// Visits set bit indices in ascending order.
  template <class F>
  constexpr void for_each(F&& f) const {
    for (int w = 0; w < 2; ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        f(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
      }
    }
  }

  /// Visits every subset of *this (including the empty set and *this).
  template <class F>
  void for_each_subset(F&& f) const {
    std::array<int, 128> idx{};
    int k = 0;
    for_each([&](int i) { idx[k++] = i; });
    const std::uint64_t total = std::uint64_t{1} << k;
    for (std::uint64_t m = 0; m < total; ++m) {
      CellSet s;
      for (int b = 0; b < k; ++b) {
        if ((m >> b) & 1U) s.set(idx[b]);
      }
      f(s);
    }
  }

  constexpr const std::array<std::uint64_t, 2>& words() const { return words_; }

  friend constexpr bool operator==(const CellSet&, const CellSet&) = default;

  /// Lexicographic comparison of the ascending cell lists. A proper prefix
  /// sorts first.
  friend constexpr bool lex_less(const CellSet& a, const CellSet& b) {
    const CellSet diff = a ^ b;
    const int x = diff.lowest();
    if (x < 0) return false;
    // Below x the lists agree. The set holding x has x as its next element;
    // the other one continues with something larger, or ends.
    const CellSet above = CellSet::above(x);
    if (a.test(x)) return b.intersects(above);
    return !a.intersects(above);
  }

 private:
  constexpr CellSet(std::uint64_t lo, std::uint64_t hi) : words_{lo, hi} {}

  /// Bits strictly above index x.
  static constexpr CellSet above(int x) {
    CellSet s;
    if (x < 63) {
      s.words_[0] = ~std::uint64_t{0} << (x + 1);
      s.words_[1] = ~std::uint64_t{0};
    } else if (x == 63) {
      s.words_[1] = ~std::uint64_t{0};
    } else if (x < 127) {
      s.words_[1] = ~std::uint64_t{0} << (x - 63);
    }
    return s;
  }

  std::array<std::uint64_t, 2> words_{};
};

struct CellSetHash {
  std::size_t operator()(const CellSet& s) const noexcept {
    std::uint64_t h = s.words()[0] * 0x9E3779B97F4A7C15ULL;
    h ^= s.words()[1] + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

constexpr int cell_index(int degree, const Cell& c) { return (c.row - 1) * degree + (c.col - 1); }
constexpr Cell cell_at(int degree, int index) { return Cell{index / degree + 1, index % degree + 1}; }

/// Validates 1 <= n <= kMaxRepresentableDegree; throws InputError otherwise.
void check_degree(int degree);
/// As check_degree, and additionally n <= limits.max_enum_degree.
void check_enum_degree(int degree, const Limits& limits);

/// A permutation of [n] in one-line notation, with its cell set cached.
class Permutation {
 public:
  /// images[i-1] = sigma(i), values in 1..n. Throws InputError unless the
  /// images form a bijection of [n].
  explicit Permutation(std::span<const int> images);
  Permutation(std::initializer_list<int> images)
      : Permutation(std::span<const int>(images.begin(), images.size())) {}

  static Permutation identity(int degree);

  int degree() const { return degree_; }
  /// sigma(i) for 1-based i.
  int operator()(int i) const { return images_[static_cast<std::size_t>(i - 1)]; }
  std::vector<int> images() const;

  const CellSet& cells() const { return cells_; }
  bool contains(const Cell& c) const { return (*this)(c.row) == c.col; }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.degree_ == b.degree_ && a.cells_ == b.cells_;
  }
  /// Lexicographic on one-line notation (equal to cell-list order).
  friend std::strong_ordering operator<=>(const Permutation& a, const Permutation& b);

 private:
  Permutation() = default;

  int degree_ = 0;
  std::array<std::uint8_t, kMaxRepresentableDegree> images_{};
  CellSet cells_;
};

/// A set of cells with pairwise distinct rows and columns: a restriction
/// pattern shared by some permutations ("proper subset" of the grid).
class PartialPerm {
 public:
  explicit PartialPerm(int degree);
  PartialPerm(int degree, std::span<const Cell> cells);
  PartialPerm(int degree, std::initializer_list<Cell> cells)
      : PartialPerm(degree, std::span<const Cell>(cells.begin(), cells.size())) {}
  /// Throws InputError when two cells share a row or a column.
  static PartialPerm from_cells(int degree, const CellSet& cells);
  static PartialPerm of(const Permutation& p);

  int degree() const { return degree_; }
  int size() const { return cells_.count(); }
  bool empty() const { return cells_.empty(); }
  const CellSet& cells() const { return cells_; }
  std::vector<Cell> cell_list() const;
  bool contains(const Cell& c) const { return cells_.test(cell_index(degree_, c)); }
  bool subset_of(const PartialPerm& o) const { return cells_.subset_of(o.cells_); }

  friend bool operator==(const PartialPerm& a, const PartialPerm& b) {
    return a.degree_ == b.degree_ && a.cells_ == b.cells_;
  }
  /// Lexicographic on the ascending (row, col) cell lists.
  friend bool operator<(const PartialPerm& a, const PartialPerm& b) {
    return lex_less(a.cells_, b.cells_);
  }

 private:
  PartialPerm(int degree, const CellSet& cells, bool /*trusted*/) : degree_(degree), cells_(cells) {}

  int degree_ = 1;
  CellSet cells_;
};

/// True when the cells have pairwise distinct rows and columns.
bool is_proper(int degree, const CellSet& cells);

/// Canonical (sorted, duplicate-free) set of permutations of a common degree.
class PermFamily {
 public:
  explicit PermFamily(int degree);
  /// Sorts and drops duplicates. Throws InputError on a degree mismatch.
  PermFamily(int degree, std::vector<Permutation> members);

  int degree() const { return degree_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const Permutation& operator[](std::size_t i) const { return members_[i]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  std::span<const Permutation> members() const { return members_; }
  bool contains(const Permutation& p) const;

  friend bool operator==(const PermFamily&, const PermFamily&) = default;

 private:
  int degree_;
  std::vector<Permutation> members_;
};

/// Canonical set of partial permutations of a common degree.
class PartialFamily {
 public:
  explicit PartialFamily(int degree);
  PartialFamily(int degree, std::vector<PartialPerm> members);
  /// Trusted constructor for cell sets already known to be proper.
  static PartialFamily from_cell_sets(int degree, std::span<const CellSet> sets);

  int degree() const { return degree_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const PartialPerm& operator[](std::size_t i) const { return members_[i]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  std::span<const PartialPerm> members() const { return members_; }
  bool contains(const PartialPerm& p) const;
  std::vector<CellSet> cell_sets() const;

  friend bool operator==(const PartialFamily&, const PartialFamily&) = default;

 private:
  int degree_;
  std::vector<PartialPerm> members_;
};

/// Co-degree table and diversity of a permutation family.
struct DiversityReport {
  int degree = 0;
  std::size_t family_size = 0;
  std::size_t gamma = 0;
  /// First cell in (row, col) order attaining the minimum avoidance count.
  Cell argmin_cell;
  /// Row-major n x n table; entry (i, j) counts members with sigma(i) = j.
  std::vector<std::size_t> codegree_table;

  std::size_t codegree(const Cell& c) const {
    return codegree_table[static_cast<std::size_t>(cell_index(degree, c))];
  }
  std::size_t avoidance(const Cell& c) const { return family_size - codegree(c); }
};

PermFamily enumerate_symmetric_group(int n, const Limits& limits = {});

/// Every pair of members shares a cell. Empty and singleton families qualify.
bool is_intersecting(const PermFamily& family);
/// Every pair of (not necessarily distinct) members meets, so a family
/// holding the empty pattern is never intersecting.
bool is_intersecting(const PartialFamily& family);

/// |F(S)|: the number of members containing every cell of S.
std::size_t co_degree(const PermFamily& family, const PartialPerm& pattern);
/// F(S) = {F \ S : S subset of F in F}.
PartialFamily restriction(const PermFamily& family, const PartialPerm& pattern);
/// Members avoiding cell x.
PermFamily avoidance(const PermFamily& family, const Cell& x);

/// gamma(F) = min over the n^2 cells of the avoidance count; ties go to the
/// first cell in (row, col) order. Throws InputError on an empty family.
DiversityReport diversity(const PermFamily& family);

/// All permutations with sigma(x.row) = x.col.
PermFamily make_star(int n, const Cell& x, const Limits& limits = {});
/// Permutations fixing at least two of the positions 1, 2, 3.
PermFamily make_triangle_family(int n, const Limits& limits = {});
/// All permutations of S_n containing at least one member of the basis.
PermFamily span(const PartialFamily& basis, int n, const Limits& limits = {});

/// Derangements of [m], D_0 = 1, D_1 = 0, D_m = (m-1)(D_{m-1} + D_{m-2}).
/// Throws InputError for m > 20.
std::uint64_t derangement_count(int m);

}  // namespace permdiv
