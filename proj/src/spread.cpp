#include "permdiv/spread.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "permdiv/errors.hpp"

namespace permdiv {

namespace mp = boost::multiprecision;

namespace {

using CountMap = std::unordered_map<CellSet, std::uint32_t, CellSetHash>;

void check_ratio(const Rational& r) {
  if (r <= 0) throw InputError("spread ratio must be positive");
}

std::uint64_t enumeration_cost(std::span<const CellSet> members) {
  std::uint64_t cost = 0;
  for (const auto& m : members) cost += std::uint64_t{1} << m.count();
  return cost;
}

/// |F(S)| for every nonempty S contained in some member.
CountMap subset_counts(std::span<const CellSet> members, const Limits& limits) {
  WorkBudget budget(limits.work_budget);
  budget.charge(enumeration_cost(members), "spread enumeration");
  CountMap counts;
  for (const auto& m : members) {
    m.for_each_subset([&](const CellSet& s) {
      if (!s.empty()) ++counts[s];
    });
  }
  return counts;
}

/// Per pattern size k, the largest co-degree that is still r-spread:
/// floor(b^k |F| / a^k), saturated.
std::vector<std::uint64_t> spread_thresholds(const Rational& r, std::size_t family_size, int max_k) {
  const BigInt a = mp::numerator(r);
  const BigInt b = mp::denominator(r);
  std::vector<std::uint64_t> out(static_cast<std::size_t>(max_k) + 1);
  BigInt ak = 1;
  BigInt bk = 1;
  const BigInt cap = std::numeric_limits<std::uint64_t>::max();
  for (int k = 0; k <= max_k; ++k) {
    const BigInt t = bk * family_size / ak;
    out[static_cast<std::size_t>(k)] = t > cap ? std::numeric_limits<std::uint64_t>::max()
                                               : static_cast<std::uint64_t>(t);
    ak *= a;
    bk *= b;
  }
  return out;
}

struct Violation {
  CellSet set;
  std::uint32_t count;
};

std::vector<Violation> violations(std::span<const CellSet> members, int degree, const Rational& r,
                                  const Limits& limits) {
  check_ratio(r);
  const CountMap counts = subset_counts(members, limits);
  const auto thresh = spread_thresholds(r, members.size(), degree);
  std::vector<Violation> out;
  for (const auto& [set, count] : counts) {
    if (count > thresh[static_cast<std::size_t>(set.count())]) out.push_back({set, count});
  }
  std::sort(out.begin(), out.end(), [](const Violation& x, const Violation& y) { return lex_less(x.set, y.set); });
  return out;
}

/// x violates more than y: c_x a^kx / b^kx > c_y a^ky / b^ky, then smaller
/// pattern, then lexicographic.
bool stronger(const Violation& x, const Violation& y, const Rational& r) {
  const BigInt a = mp::numerator(r);
  const BigInt b = mp::denominator(r);
  const unsigned kx = static_cast<unsigned>(x.set.count());
  const unsigned ky = static_cast<unsigned>(y.set.count());
  const BigInt lhs = BigInt(x.count) * mp::pow(a, kx) * mp::pow(b, ky);
  const BigInt rhs = BigInt(y.count) * mp::pow(a, ky) * mp::pow(b, kx);
  if (lhs != rhs) return lhs > rhs;
  if (kx != ky) return kx < ky;
  return lex_less(x.set, y.set);
}

SpreadCheck check_spread(std::span<const CellSet> members, int degree, const Rational& r, const Limits& limits) {
  if (members.empty()) throw InputError("spreadness of an empty family is undefined");
  const auto viol = violations(members, degree, r, limits);
  SpreadCheck out;
  if (viol.empty()) return out;
  const Violation* best = &viol.front();
  for (const auto& v : viol) {
    if (stronger(v, *best, r)) best = &v;
  }
  out.spread = false;
  const auto k = static_cast<unsigned>(best->set.count());
  out.witness = SpreadWitness{PartialPerm::from_cells(degree, best->set), best->count,
                              Rational(BigInt(members.size()) * mp::pow(mp::denominator(r), k),
                                       mp::pow(mp::numerator(r), k))};
  return out;
}

std::vector<CellSet> maximal_sets(const std::vector<Violation>& viol, const Limits& limits) {
  std::unordered_set<CellSet, CellSetHash> dominated;
  WorkBudget budget(limits.work_budget);
  for (const auto& v : viol) {
    budget.charge(std::uint64_t{1} << v.set.count(), "maximality filter");
    v.set.for_each_subset([&](const CellSet& s) {
      if (!(s == v.set)) dominated.insert(s);
    });
  }
  std::vector<CellSet> out;
  for (const auto& v : viol) {
    if (!dominated.contains(v.set)) out.push_back(v.set);
  }
  return out;
}

std::vector<CellSet> cell_sets_of(const PermFamily& f) {
  std::vector<CellSet> out;
  out.reserve(f.size());
  for (const auto& p : f) out.push_back(p.cells());
  return out;
}

}  // namespace

SpreadParams SpreadParams::standard(int n) {
  return SpreadParams{Rational(n) / 3, CertifiedReal::four_log2(static_cast<unsigned>(n))};
}

SpreadParams SpreadParams::with(const Rational& r, const Rational& q_cap) {
  return SpreadParams{r, CertifiedReal::exact(q_cap)};
}

SpreadCheck is_r_spread(const PermFamily& family, const Rational& r, const Limits& limits) {
  return check_spread(cell_sets_of(family), family.degree(), r, limits);
}

SpreadCheck is_r_spread(const PartialFamily& family, const Rational& r, const Limits& limits) {
  return check_spread(family.cell_sets(), family.degree(), r, limits);
}

PartialFamily non_spread_sets(const PermFamily& family, const Rational& r, const Limits& limits) {
  if (family.empty()) throw InputError("non-spread sets of an empty family are undefined");
  std::vector<CellSet> sets;
  for (const auto& v : violations(cell_sets_of(family), family.degree(), r, limits)) sets.push_back(v.set);
  return PartialFamily::from_cell_sets(family.degree(), sets);
}

PartialFamily non_spread_sets(const PartialFamily& family, const Rational& r, const Limits& limits) {
  if (family.empty()) throw InputError("non-spread sets of an empty family are undefined");
  std::vector<CellSet> sets;
  for (const auto& v : violations(family.cell_sets(), family.degree(), r, limits)) sets.push_back(v.set);
  return PartialFamily::from_cell_sets(family.degree(), sets);
}

PartialFamily maximal_non_spread(const PermFamily& family, const Rational& r, const Limits& limits) {
  if (family.empty()) throw InputError("non-spread sets of an empty family are undefined");
  const auto viol = violations(cell_sets_of(family), family.degree(), r, limits);
  return PartialFamily::from_cell_sets(family.degree(), maximal_sets(viol, limits));
}

std::string to_string(StopReason s) {
  return s == StopReason::exhausted ? "exhausted" : "oversize_witness";
}

SpreadDecomposition spread_decompose(const PermFamily& family, const SpreadParams& params, const Limits& limits) {
  check_ratio(params.r);
  const int n = family.degree();
  SpreadDecomposition out;
  out.degree = n;
  out.r = params.r;
  out.q_cap_description = params.q_cap.description();
  out.q_cap_enclosure = params.q_cap.at(64);
  out.remainder = PermFamily(n);
  out.input_intersecting = is_intersecting(family);

  // |B| <= q_cap, decided with refinement.
  auto within_cap = [&](int size) {
    const Comparison c = compare(params.q_cap, Rational(size), limits.precision_cap);
    if (c.order == Order::undecided) {
      throw InputError("cannot decide |B| = " + std::to_string(size) + " against q_cap " +
                       params.q_cap.description() + " at the precision cap");
    }
    return c.order != Order::less;
  };

  std::vector<Permutation> current(family.begin(), family.end());
  while (!current.empty()) {
    const PermFamily fi(n, current);
    const auto members = cell_sets_of(fi);
    const auto viol = violations(members, n, params.r, limits);
    const auto maximal = maximal_sets(viol, limits);
    if (maximal.empty()) break;

    bool oversize = false;
    for (const auto& b : maximal) {
      if (!within_cap(b.count())) {
        out.stop_reason = StopReason::oversize_witness;
        out.oversize_root = PartialPerm::from_cells(n, b);
        oversize = true;
        break;
      }
    }
    if (oversize) break;

    std::unordered_map<CellSet, std::uint32_t, CellSetHash> count_of;
    for (const auto& v : viol) count_of.emplace(v.set, v.count);
    const CellSet* pick = &maximal.front();
    for (const auto& b : maximal) {
      const auto cb = count_of.at(b);
      const auto cp = count_of.at(*pick);
      if (cb > cp || (cb == cp && (b.count() < pick->count() || (b.count() == pick->count() && lex_less(b, *pick))))) {
        pick = &b;
      }
    }

    std::vector<Permutation> branch;
    std::vector<Permutation> rest;
    for (const auto& p : current) (pick->subset_of(p.cells()) ? branch : rest).push_back(p);
    SpreadBranch br{PartialPerm::from_cells(n, *pick), PermFamily(n, std::move(branch)), false};
    br.restriction_spread = is_r_spread(restriction(br.members, br.root), params.r, limits).spread;
    out.branches.push_back(std::move(br));
    current = std::move(rest);
  }
  out.remainder = PermFamily(n, std::move(current));

  std::vector<PartialPerm> roots;
  for (const auto& b : out.branches) roots.push_back(b.root);
  out.roots_intersecting = is_intersecting(PartialFamily(n, roots));

  // Post-conditions.
  std::size_t total = out.remainder.size();
  std::vector<Permutation> seen(out.remainder.begin(), out.remainder.end());
  for (const auto& b : out.branches) {
    total += b.members.size();
    for (const auto& p : b.members) {
      if (!b.root.cells().subset_of(p.cells())) throw InvariantViolation("branch member does not contain its root");
      seen.push_back(p);
    }
    if (!b.restriction_spread) throw InvariantViolation("branch restriction is not r-spread");
    if (!within_cap(b.root.size())) throw InvariantViolation("branch root exceeds q_cap");
  }
  if (total != family.size() || !(PermFamily(n, seen) == family)) {
    throw InvariantViolation("branches and remainder do not partition the input");
  }
  return out;
}

}  // namespace permdiv
