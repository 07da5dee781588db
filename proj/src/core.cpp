#include "permdiv/core.hpp"

#include <numeric>

#include "permdiv/errors.hpp"

namespace permdiv {

std::string to_string(const Cell& c) { return std::to_string(c.row) + ":" + std::to_string(c.col); }

void check_degree(int degree) {
  if (degree < 1 || degree > kMaxRepresentableDegree) {
    throw InputError("degree " + std::to_string(degree) + " outside supported range 1.." +
                     std::to_string(kMaxRepresentableDegree));
  }
}

void check_enum_degree(int degree, const Limits& limits) {
  check_degree(degree);
  if (degree > limits.max_enum_degree) {
    throw InputError("degree " + std::to_string(degree) + " exceeds the enumeration cap " +
                     std::to_string(limits.max_enum_degree));
  }
}

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::span<const int> images) {
  const int n = static_cast<int>(images.size());
  check_degree(n);
  degree_ = n;
  std::uint32_t seen = 0;
  for (int i = 0; i < n; ++i) {
    const int v = images[static_cast<std::size_t>(i)];
    if (v < 1 || v > n) {
      throw InputError("image " + std::to_string(v) + " outside 1.." + std::to_string(n));
    }
    if (seen & (1U << v)) {
      throw InputError("not a bijection: value " + std::to_string(v) + " repeated");
    }
    seen |= 1U << v;
    images_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
    cells_.set(i * n + (v - 1));
  }
}

Permutation Permutation::identity(int degree) {
  std::vector<int> img(static_cast<std::size_t>(degree));
  std::iota(img.begin(), img.end(), 1);
  return Permutation(img);
}

std::vector<int> Permutation::images() const {
  return std::vector<int>(images_.begin(), images_.begin() + degree_);
}

std::strong_ordering operator<=>(const Permutation& a, const Permutation& b) {
  if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
  for (int i = 0; i < a.degree_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (a.images_[k] != b.images_[k]) return a.images_[k] <=> b.images_[k];
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// PartialPerm

bool is_proper(int degree, const CellSet& cells) {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  bool ok = true;
  cells.for_each([&](int idx) {
    const std::uint32_t r = 1U << (idx / degree);
    const std::uint32_t c = 1U << (idx % degree);
    if ((rows & r) || (cols & c)) ok = false;
    rows |= r;
    cols |= c;
  });
  return ok;
}

PartialPerm::PartialPerm(int degree) : degree_(degree) { check_degree(degree); }

PartialPerm::PartialPerm(int degree, std::span<const Cell> cells) : degree_(degree) {
  check_degree(degree);
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  for (const Cell& c : cells) {
    if (c.row < 1 || c.row > degree || c.col < 1 || c.col > degree) {
      throw InputError("cell " + to_string(c) + " outside the " + std::to_string(degree) + "x" +
                       std::to_string(degree) + " grid");
    }
    if (rows & (1U << c.row)) throw InputError("repeated row " + std::to_string(c.row));
    if (cols & (1U << c.col)) throw InputError("repeated column " + std::to_string(c.col));
    rows |= 1U << c.row;
    cols |= 1U << c.col;
    cells_.set(cell_index(degree, c));
  }
}

PartialPerm PartialPerm::from_cells(int degree, const CellSet& cells) {
  check_degree(degree);
  CellSet grid;
  for (int i = 0; i < degree * degree; ++i) grid.set(i);
  if (!cells.subset_of(grid)) throw InputError("cell outside the grid");
  if (!is_proper(degree, cells)) throw InputError("cell set repeats a row or a column");
  return PartialPerm(degree, cells, true);
}

PartialPerm PartialPerm::of(const Permutation& p) { return PartialPerm(p.degree(), p.cells(), true); }

std::vector<Cell> PartialPerm::cell_list() const {
  std::vector<Cell> out;
  cells_.for_each([&](int idx) { out.push_back(cell_at(degree_, idx)); });
  return out;
}

// ---------------------------------------------------------------------------
// Families

PermFamily::PermFamily(int degree) : degree_(degree) { check_degree(degree); }

PermFamily::PermFamily(int degree, std::vector<Permutation> members)
    : degree_(degree), members_(std::move(members)) {
  check_degree(degree);
  for (const auto& p : members_) {
    if (p.degree() != degree_) throw InputError("member degree differs from family degree");
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool PermFamily::contains(const Permutation& p) const {
  return std::binary_search(members_.begin(), members_.end(), p);
}

PartialFamily::PartialFamily(int degree) : degree_(degree) { check_degree(degree); }

PartialFamily::PartialFamily(int degree, std::vector<PartialPerm> members)
    : degree_(degree), members_(std::move(members)) {
  check_degree(degree);
  for (const auto& p : members_) {
    if (p.degree() != degree_) throw InputError("member degree differs from family degree");
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

PartialFamily PartialFamily::from_cell_sets(int degree, std::span<const CellSet> sets) {
  std::vector<PartialPerm> members;
  members.reserve(sets.size());
  for (const auto& s : sets) members.push_back(PartialPerm::from_cells(degree, s));
  return PartialFamily(degree, std::move(members));
}

bool PartialFamily::contains(const PartialPerm& p) const {
  return std::binary_search(members_.begin(), members_.end(), p);
}

std::vector<CellSet> PartialFamily::cell_sets() const {
  std::vector<CellSet> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.cells());
  return out;
}

// ---------------------------------------------------------------------------
// Operations

PermFamily enumerate_symmetric_group(int n, const Limits& limits) {
  check_enum_degree(n, limits);
  std::vector<int> img(static_cast<std::size_t>(n));
  std::iota(img.begin(), img.end(), 1);
  std::vector<Permutation> all;
  do {
    all.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return PermFamily(n, std::move(all));
}

bool is_intersecting(const PermFamily& family) {
  const auto m = family.members();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (!m[i].cells().intersects(m[j].cells())) return false;
    }
  }
  return true;
}

bool is_intersecting(const PartialFamily& family) {
  const auto m = family.members();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i; j < m.size(); ++j) {
      if (!m[i].cells().intersects(m[j].cells())) return false;
    }
  }
  return true;
}

std::size_t co_degree(const PermFamily& family, const PartialPerm& pattern) {
  if (pattern.degree() != family.degree()) throw InputError("pattern degree differs from family degree");
  std::size_t count = 0;
  for (const auto& p : family) count += pattern.cells().subset_of(p.cells()) ? 1 : 0;
  return count;
}

PartialFamily restriction(const PermFamily& family, const PartialPerm& pattern) {
  if (pattern.degree() != family.degree()) throw InputError("pattern degree differs from family degree");
  std::vector<CellSet> rest;
  for (const auto& p : family) {
    if (pattern.cells().subset_of(p.cells())) rest.push_back(p.cells() - pattern.cells());
  }
  return PartialFamily::from_cell_sets(family.degree(), rest);
}

PermFamily avoidance(const PermFamily& family, const Cell& x) {
  std::vector<Permutation> out;
  for (const auto& p : family) {
    if (!p.contains(x)) out.push_back(p);
  }
  return PermFamily(family.degree(), std::move(out));
}

DiversityReport diversity(const PermFamily& family) {
  if (family.empty()) throw InputError("diversity of an empty family is undefined");
  const int n = family.degree();
  DiversityReport rep;
  rep.degree = n;
  rep.family_size = family.size();
  rep.codegree_table.assign(static_cast<std::size_t>(n * n), 0);
  for (const auto& p : family) {
    for (int i = 1; i <= n; ++i) ++rep.codegree_table[static_cast<std::size_t>((i - 1) * n + p(i) - 1)];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < rep.codegree_table.size(); ++k) {
    if (rep.codegree_table[k] > rep.codegree_table[best]) best = k;
  }
  rep.argmin_cell = cell_at(n, static_cast<int>(best));
  rep.gamma = rep.family_size - rep.codegree_table[best];
  return rep;
}

PermFamily make_star(int n, const Cell& x, const Limits& limits) {
  check_enum_degree(n, limits);
  if (x.row < 1 || x.row > n || x.col < 1 || x.col > n) {
    throw InputError("star center " + to_string(x) + " outside the grid");
  }
  std::vector<Permutation> out;
  for (const auto& p : enumerate_symmetric_group(n, limits)) {
    if (p.contains(x)) out.push_back(p);
  }
  return PermFamily(n, std::move(out));
}

PermFamily make_triangle_family(int n, const Limits& limits) {
  if (n < 3) throw InputError("triangle family needs n >= 3");
  check_enum_degree(n, limits);
  std::vector<Permutation> out;
  for (const auto& p : enumerate_symmetric_group(n, limits)) {
    const int fixed = (p(1) == 1) + (p(2) == 2) + (p(3) == 3);
    if (fixed >= 2) out.push_back(p);
  }
  return PermFamily(n, std::move(out));
}

PermFamily span(const PartialFamily& basis, int n, const Limits& limits) {
  check_enum_degree(n, limits);
  if (basis.degree() != n) throw InputError("basis degree differs from n");
  std::vector<Permutation> out;
  if (basis.empty()) return PermFamily(n);
  for (const auto& p : enumerate_symmetric_group(n, limits)) {
    for (const auto& b : basis) {
      if (b.cells().subset_of(p.cells())) {
        out.push_back(p);
        break;
      }
    }
  }
  return PermFamily(n, std::move(out));
}

std::uint64_t derangement_count(int m) {
  if (m < 0 || m > 20) throw InputError("derangement_count supports 0 <= m <= 20");
  std::uint64_t prev = 1;  // D_0
  if (m == 0) return prev;
  std::uint64_t cur = 0;  // D_1
  for (int k = 2; k <= m; ++k) {
    const std::uint64_t next = static_cast<std::uint64_t>(k - 1) * (cur + prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace permdiv
