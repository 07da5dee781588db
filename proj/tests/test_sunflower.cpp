#include <algorithm>
#include <random>

#include "doctest.h"
#include "permdiv/errors.hpp"
#include "permdiv/spread.hpp"
#include "permdiv/sunflower.hpp"

using namespace permdiv;

namespace {

PartialPerm pp(int n, std::initializer_list<Cell> cells) { return PartialPerm(n, std::vector<Cell>(cells)); }

// Existence of an s-uniform pseudo sunflower of size s+1, by trying every
// (F0, C, set of s further members) triple.
bool brute_exists(const PartialFamily& h, int s) {
  std::vector<CellSet> uni;
  for (const auto& m : h) {
    if (m.size() == s) uni.push_back(m.cells());
  }
  const std::size_t m = uni.size();
  for (std::size_t i0 = 0; i0 < m; ++i0) {
    bool any = false;
    uni[i0].for_each_subset([&](const CellSet& c) {
      if (any || c == uni[i0]) return;
      for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
        if ((mask >> i0) & 1U) continue;
        if (std::popcount(mask) != s) continue;
        std::vector<CellSet> all{uni[i0] - c};
        for (std::size_t j = 0; j < m; ++j) {
          if ((mask >> j) & 1U) all.push_back(uni[j] - c);
        }
        bool disjoint = true;
        for (std::size_t a = 0; a < all.size(); ++a) {
          for (std::size_t b = a + 1; b < all.size(); ++b) disjoint = disjoint && !all[a].intersects(all[b]);
        }
        if (disjoint) {
          any = true;
          return;
        }
      }
    });
    if (any) return true;
  }
  return false;
}

void check_valid(const PseudoSunflower& sf, const PartialFamily& h, int s) {
  std::vector<PartialPerm> sets{sf.petal0};
  sets.insert(sets.end(), sf.petals.begin(), sf.petals.end());
  CHECK(static_cast<int>(sets.size()) == s + 1);
  CellSet core;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    CHECK(h.contains(sets[a]));
    CHECK(sets[a].size() == s);
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      CHECK_FALSE(sets[a] == sets[b]);
      CHECK_FALSE(((sets[a].cells() - sf.center.cells()) & (sets[b].cells() - sf.center.cells())).count() > 0);
      core |= sets[a].cells() & sets[b].cells();
    }
  }
  CHECK(sf.center.cells().subset_of(sf.petal0.cells()));
  CHECK_FALSE(sf.center.cells() == sf.petal0.cells());
  // The reported center is the smallest valid one.
  CHECK(sf.center.cells() == core);
}

PartialPerm random_pattern(std::mt19937_64& rng, int n, int max_size) {
  const int k = std::uniform_int_distribution<int>(1, std::min(n, max_size))(rng);
  std::vector<int> rows(static_cast<std::size_t>(n)), cols(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = cols[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(rows.begin(), rows.end(), rng);
  std::shuffle(cols.begin(), cols.end(), rng);
  std::vector<Cell> cells;
  for (int i = 0; i < k; ++i) cells.push_back(Cell{rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(i)]});
  return PartialPerm(n, cells);
}

PartialFamily random_family(std::mt19937_64& rng, int n, int s, int max_members, bool intersecting) {
  std::vector<PartialPerm> out;
  const int target = std::uniform_int_distribution<int>(1, max_members)(rng);
  for (int attempt = 0; attempt < 200 && static_cast<int>(out.size()) < target; ++attempt) {
    const auto p = random_pattern(rng, n, s);
    const bool ok = !intersecting || std::all_of(out.begin(), out.end(), [&](const PartialPerm& q) {
      return q.cells().intersects(p.cells());
    });
    if (ok) out.push_back(p);
  }
  return PartialFamily(n, std::move(out));
}

const Cell a{1, 1}, b{2, 2}, c{2, 3}, d{2, 4};

}  // namespace

TEST_CASE("classic sunflower is found with its center") {
  const PartialFamily h(4, {pp(4, {a, b}), pp(4, {a, c}), pp(4, {a, d})});
  const auto sf = find_pseudo_sunflower(h, 2);
  REQUIRE(sf.has_value());
  CHECK(sf->center == pp(4, {a}));
  check_valid(*sf, h, 2);
  CHECK(compress(h, 2) == PartialFamily(4, {pp(4, {a})}));
}

TEST_CASE("too few members means no sunflower") {
  const PartialFamily h(4, {pp(4, {a, b})});
  CHECK_FALSE(find_pseudo_sunflower(h, 2).has_value());
}

TEST_CASE("pairwise disjoint sets form a pseudo sunflower") {
  const PartialFamily h(4, {pp(4, {{1, 1}, {2, 2}}), pp(4, {{3, 3}, {4, 4}}), pp(4, {{1, 2}, {2, 1}})});
  CHECK(brute_exists(h, 2));
  const auto sf = find_pseudo_sunflower(h, 2);
  REQUIRE(sf.has_value());
  check_valid(*sf, h, 2);
  // The minimal center of three disjoint sets is empty; a singleton also works.
  CHECK(sf->center.empty());
}

TEST_CASE("a triangle is already compressed") {
  const PartialFamily t(4, {pp(4, {{1, 1}, {2, 2}}), pp(4, {{1, 1}, {3, 3}}), pp(4, {{2, 2}, {3, 3}})});
  CHECK_FALSE(brute_exists(t, 2));
  CHECK_FALSE(find_pseudo_sunflower(t, 2).has_value());
  CHECK(compress(t, 2) == t);
  CHECK(compress(PartialFamily(4), 3).empty());
}

TEST_CASE("size guard") {
  const PartialFamily h(4, {pp(4, {a, b})});
  CHECK_THROWS_AS(find_pseudo_sunflower(h, 1), InputError);
  CHECK_THROWS_AS(compress(h, 1), InputError);
  CHECK_THROWS_AS(compress(h, 0), InputError);
}

TEST_CASE("detection agrees with brute force on random families") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 3 + trial % 4;
    const int s = 1 + trial % 3;
    const auto h = random_family(rng, n, s, 8, trial % 2 == 0);
    const auto sf = find_pseudo_sunflower(h, s);
    CHECK(sf.has_value() == brute_exists(h, s));
    if (sf) check_valid(*sf, h, s);
  }
}

TEST_CASE("compression preserves intersecting, span and containment") {
  std::mt19937_64 rng(31337);
  int checked = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const int n = 2 + trial % 5;
    const int s = 1 + trial % 4;
    const auto h = random_family(rng, n, s, 10, true);
    REQUIRE(is_intersecting(h));
    const auto out = compress(h, s);
    ++checked;

    CHECK(is_intersecting(out));
    CHECK_FALSE(brute_exists(out, s));
    for (const auto& x : out) {
      CHECK(std::any_of(h.begin(), h.end(), [&](const PartialPerm& y) { return x.subset_of(y); }));
    }
    for (const auto& y : h) {
      CHECK(std::any_of(out.begin(), out.end(), [&](const PartialPerm& x) { return x.subset_of(y); }));
    }
    if (trial % 6 == 0) {
      const auto before = span(h, n);
      const auto after = span(out, n);
      for (const auto& p : before) CHECK(after.contains(p));
    }
    CHECK(compress(h, s) == out);
  }
  CHECK(checked >= 1000);
}

TEST_CASE("non-intersecting inputs compress to a fixed point too") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 3;
    const int s = 1 + trial % 3;
    const auto h = random_family(rng, n, s, 8, false);
    const auto out = compress(h, s);
    CHECK_FALSE(brute_exists(out, s));
    const auto f = furedi_check(out, s, s);
    CHECK_FALSE(f.sunflower_found);
    CHECK(f.holds);
  }
}

TEST_CASE("minimal_members") {
  const Cell e{1, 1}, f{2, 2}, g{3, 3}, h{4, 4}, k{5, 5};
  CHECK(minimal_members(PartialFamily(5, {pp(5, {e}), pp(5, {e, f})})) == PartialFamily(5, {pp(5, {e})}));
  const PartialFamily anti(5, {pp(5, {e, f}), pp(5, {g}), pp(5, {h, k})});
  CHECK(minimal_members(anti) == anti);
  const PartialFamily mixed(5, {pp(5, {e, f}), pp(5, {f}), pp(5, {g, h}), pp(5, {h, k})});
  CHECK(minimal_members(mixed) == PartialFamily(5, {pp(5, {f}), pp(5, {g, h}), pp(5, {h, k})}));
}

TEST_CASE("classify_two_uniform") {
  const Cell x{1, 1}, y{2, 2}, z{3, 3}, w{4, 4};
  auto cl = classify_two_uniform(PartialFamily(4, {pp(4, {x, y}), pp(4, {x, z})}));
  CHECK(cl.shape == ResidueShape::star);
  CHECK(*cl.center == x);

  cl = classify_two_uniform(PartialFamily(4, {pp(4, {x, y}), pp(4, {x, z}), pp(4, {y, z})}));
  CHECK(cl.shape == ResidueShape::triangle);
  CHECK(cl.triangle == std::vector<Cell>{x, y, z});

  CHECK(classify_two_uniform(PartialFamily(4, {pp(4, {x, y}), pp(4, {z, w})})).shape == ResidueShape::other);
  CHECK(classify_two_uniform(PartialFamily(4)).shape == ResidueShape::other);

  cl = classify_two_uniform(PartialFamily(4, {pp(4, {y})}));
  CHECK(cl.shape == ResidueShape::star);
  CHECK(*cl.center == y);

  CHECK_THROWS_AS(classify_two_uniform(PartialFamily(4, {pp(4, {x, y, z})})), InputError);
}

TEST_CASE("intersecting families of small sets are stars or triangles") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto h = random_family(rng, 3 + trial % 4, 2, 6, true);
    if (h.empty()) continue;
    CHECK(classify_two_uniform(h).shape != ResidueShape::other);
  }
}

TEST_CASE("basis_cascade on small inputs") {
  const Cell x{1, 1}, y{2, 2}, z{3, 3};
  const PartialFamily tri(4, {pp(4, {x, y}), pp(4, {x, z}), pp(4, {y, z})});
  auto res = basis_cascade(tri, 5);
  CHECK(res.layers.size() == 3);
  for (const auto& l : res.layers) CHECK(l.members.empty());
  CHECK(res.residue == tri);
  CHECK(res.classification.shape == ResidueShape::triangle);

  res = basis_cascade(PartialFamily(4, {pp(4, {x})}), 5);
  CHECK(res.classification.shape == ResidueShape::star);
  CHECK(*res.classification.center == x);

  CHECK_THROWS_AS(basis_cascade(PartialFamily(4, {pp(4, {x, y, z})}), 2), InputError);
  CHECK_THROWS_AS(basis_cascade(PartialFamily(4, {PartialPerm(4)}), 3), InputError);

  res = basis_cascade(PartialFamily(4, {pp(4, {x, y}), pp(4, {x, z})}), 2);
  CHECK(res.layers.empty());
  CHECK(res.classification.shape == ResidueShape::star);
}

TEST_CASE("cascade on decomposition roots obeys the layer bound") {
  std::mt19937_64 rng(4242);
  const auto s5 = enumerate_symmetric_group(5);
  const int q = cascade_uniformity(5);
  int classified = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Permutation> all(s5.begin(), s5.end());
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Permutation> fam;
    const std::size_t target = std::uniform_int_distribution<std::size_t>(4, 40)(rng);
    for (const auto& p : all) {
      if (fam.size() >= target) break;
      const bool ok = std::all_of(fam.begin(), fam.end(), [&](const Permutation& o) { return o.cells().intersects(p.cells()); });
      if (ok) fam.push_back(p);
    }
    const PermFamily f(5, fam);
    REQUIRE(is_intersecting(f));
    const auto dec = spread_decompose(f, SpreadParams::standard(5));
    std::vector<PartialPerm> roots;
    for (const auto& br : dec.branches) roots.push_back(br.root);
    if (roots.empty()) continue;
    const PartialFamily bfam(5, roots);
    const auto res = basis_cascade(bfam, q);
    for (const auto& l : res.layers) {
      CHECK(BigInt(l.members.size()) <= l.furedi_bound);
      for (const auto& m : l.members) CHECK(m.size() == l.size);
    }
    for (const auto& m : res.residue) CHECK(m.size() <= 2);
    if (is_intersecting(bfam) && !res.residue.empty()) {
      CHECK(res.classification.shape != ResidueShape::other);
      ++classified;
    }
  }
  MESSAGE("classified residues: " << classified);
}

TEST_CASE("cascade_uniformity") {
  CHECK(cascade_uniformity(5) == 9);
  CHECK(cascade_uniformity(16) == 16);
  CHECK(cascade_uniformity(2) == 4);
  CHECK(cascade_uniformity(500) == 35);
  CHECK(cascade_uniformity(1) == 0);
}

TEST_CASE("furedi_check") {
  const PartialFamily two(4, {pp(4, {a, b}), pp(4, {a, c})});
  auto f = furedi_check(two, 1, 2);
  CHECK(f.sunflower_found);
  CHECK(f.size == 2);
  CHECK(f.bound == 1);
  CHECK(f.holds);

  f = furedi_check(PartialFamily(4, {pp(4, {a, b})}), 1, 2);
  CHECK_FALSE(f.sunflower_found);
  CHECK(f.size == 1);
  CHECK(f.holds);

  // Only the size-k layer counts.
  f = furedi_check(PartialFamily(4, {pp(4, {a, b}), pp(4, {a})}), 2, 1);
  CHECK(f.size == 1);
  CHECK(f.bound == 2);
}

TEST_CASE("search budget aborts cleanly") {
  std::vector<PartialPerm> rows;
  for (const auto& p : enumerate_symmetric_group(4)) rows.push_back(pp(4, {{1, p(1)}, {2, p(2)}, {3, p(3)}}));
  const PartialFamily h(4, rows);
  Limits tight;
  tight.work_budget = 1;
  CHECK_THROWS_AS(compress(h, 3, tight), BudgetExceeded);
}
