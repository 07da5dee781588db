#include "permdiv/sunflower.hpp"

#include <algorithm>

#include "permdiv/errors.hpp"

namespace permdiv {

namespace {

struct Found {
  CellSet center;
  std::vector<CellSet> sets;  // sets[0] is F_0
};

bool canonical_less(const CellSet& a, const CellSet& b) { return lex_less(a, b); }

void canonicalize(std::vector<CellSet>& v) {
  std::sort(v.begin(), v.end(), canonical_less);
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

class Detector {
 public:
  Detector(std::span<const CellSet> members, int petal_size, int count, WorkBudget& budget)
      : count_(count), budget_(budget) {
    for (const auto& m : members) {
      if (m.count() == petal_size) uni_.push_back(m);
    }
  }

  std::optional<Found> run() {
    if (static_cast<int>(uni_.size()) < count_) return std::nullopt;
    for (std::size_t i0 = 0; i0 < uni_.size(); ++i0) {
      const CellSet f0 = uni_[i0];
      std::vector<CellSet> centers;
      f0.for_each_subset([&](const CellSet& c) {
        if (!(c == f0)) centers.push_back(c);
      });
      std::sort(centers.begin(), centers.end(), [](const CellSet& a, const CellSet& b) {
        return a.count() != b.count() ? a.count() < b.count() : lex_less(a, b);
      });
      for (const auto& c : centers) {
        budget_.charge(1, "pseudo sunflower search");
        center_ = c;
        cand_.clear();
        for (std::size_t j = 0; j < uni_.size(); ++j) {
          if (j != i0 && ((uni_[j] & f0) - c).empty()) cand_.push_back(uni_[j]);
        }
        if (static_cast<int>(cand_.size()) < count_ - 1) continue;
        chosen_.assign(1, f0);
        if (extend(0)) {
          CellSet core;
          for (std::size_t a = 0; a < chosen_.size(); ++a) {
            for (std::size_t b = a + 1; b < chosen_.size(); ++b) core |= chosen_[a] & chosen_[b];
          }
          return Found{core, chosen_};
        }
      }
    }
    return std::nullopt;
  }

 private:
  bool extend(std::size_t from) {
    if (static_cast<int>(chosen_.size()) == count_) return true;
    const std::size_t need = static_cast<std::size_t>(count_) - chosen_.size();
    for (std::size_t j = from; j + need <= cand_.size(); ++j) {
      budget_.charge(1, "pseudo sunflower search");
      const bool ok = std::all_of(chosen_.begin() + 1, chosen_.end(),
                                  [&](const CellSet& x) { return ((x & cand_[j]) - center_).empty(); });
      if (!ok) continue;
      chosen_.push_back(cand_[j]);
      if (extend(j + 1)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  int count_;
  WorkBudget& budget_;
  std::vector<CellSet> uni_;
  CellSet center_;
  std::vector<CellSet> cand_;
  std::vector<CellSet> chosen_;
};

void check_sizes(const std::vector<CellSet>& sets, int s) {
  if (s < 1) throw InputError("uniformity s must be positive");
  for (const auto& m : sets) {
    if (m.count() > s) {
      throw InputError("member of size " + std::to_string(m.count()) + " exceeds uniformity " + std::to_string(s));
    }
  }
}

std::vector<CellSet> compress_sets(std::vector<CellSet> sets, int s, WorkBudget& budget) {
  canonicalize(sets);
  for (;;) {
    auto found = Detector(sets, s, s + 1, budget).run();
    if (!found) return sets;
    const CellSet c = found->center;
    std::erase_if(sets, [&](const CellSet& m) { return c.subset_of(m); });
    sets.push_back(c);
    canonicalize(sets);
  }
}

BigInt power(int base, int exp) {
  BigInt out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

std::optional<PseudoSunflower> find_pseudo_sunflower(const PartialFamily& h, int s, const Limits& limits) {
  const auto sets = h.cell_sets();
  check_sizes(sets, s);
  WorkBudget budget(limits.work_budget);
  const auto found = Detector(sets, s, s + 1, budget).run();
  if (!found) return std::nullopt;
  const int n = h.degree();
  PseudoSunflower out{PartialPerm::from_cells(n, found->center), PartialPerm::from_cells(n, found->sets[0]), {}};
  for (std::size_t i = 1; i < found->sets.size(); ++i) out.petals.push_back(PartialPerm::from_cells(n, found->sets[i]));
  return out;
}

PartialFamily compress(const PartialFamily& h, int s, const Limits& limits) {
  auto sets = h.cell_sets();
  check_sizes(sets, s);
  WorkBudget budget(limits.work_budget);
  return PartialFamily::from_cell_sets(h.degree(), compress_sets(std::move(sets), s, budget));
}

PartialFamily minimal_members(const PartialFamily& b) {
  std::vector<PartialPerm> out;
  for (const auto& x : b) {
    const bool has_smaller = std::any_of(b.begin(), b.end(), [&](const PartialPerm& y) {
      return y.size() < x.size() && y.subset_of(x);
    });
    if (!has_smaller) out.push_back(x);
  }
  return PartialFamily(b.degree(), std::move(out));
}

std::string to_string(ResidueShape s) {
  switch (s) {
    case ResidueShape::star: return "star";
    case ResidueShape::triangle: return "triangle";
    case ResidueShape::other: return "other";
  }
  return "other";
}

Classification classify_two_uniform(const PartialFamily& a) {
  for (const auto& m : a) {
    if (m.size() > 2) throw InputError("classification needs members of size at most 2");
  }
  Classification out;
  if (a.empty()) {
    out.note = "empty residue";
    return out;
  }
  CellSet common = a[0].cells();
  CellSet all;
  for (const auto& m : a) {
    common &= m.cells();
    all |= m.cells();
  }
  if (!common.empty()) {
    out.shape = ResidueShape::star;
    out.center = cell_at(a.degree(), common.lowest());
    return out;
  }
  const bool sizes_two = std::all_of(a.begin(), a.end(), [](const PartialPerm& m) { return m.size() == 2; });
  if (a.size() == 3 && sizes_two && all.count() == 3 && is_intersecting(a)) {
    out.shape = ResidueShape::triangle;
    all.for_each([&](int i) { out.triangle.push_back(cell_at(a.degree(), i)); });
    return out;
  }
  out.note = is_intersecting(a) ? "intersecting but neither star nor triangle" : "not intersecting";
  return out;
}

CascadeResult basis_cascade(const PartialFamily& b, int q_int, const Limits& limits) {
  if (q_int < 1) throw InputError("cascade uniformity must be positive");
  for (const auto& m : b) {
    if (m.size() < 1 || m.size() > q_int) {
      throw InputError("cascade member size " + std::to_string(m.size()) + " outside [1, " + std::to_string(q_int) + "]");
    }
  }
  const int n = b.degree();
  WorkBudget budget(limits.work_budget);
  CascadeResult out;
  out.q_int = q_int;
  out.minimal = minimal_members(b);

  auto p = compress_sets(out.minimal.cell_sets(), q_int, budget);
  if (q_int < 3) {
    out.residue = PartialFamily::from_cell_sets(n, p);
  } else {
    for (int i = q_int; i >= 3; --i) {
      std::vector<CellSet> layer;
      std::vector<CellSet> rest;
      for (const auto& m : p) (m.count() == i ? layer : rest).push_back(m);
      CascadeLayer cl{i, PartialFamily::from_cell_sets(n, layer), power(i, i)};
      if (BigInt(cl.members.size()) > cl.furedi_bound) {
        throw InvariantViolation("layer " + std::to_string(i) + " exceeds the bound i^i");
      }
      out.layers.push_back(std::move(cl));
      p = i > 3 ? compress_sets(std::move(rest), i - 1, budget) : std::move(rest);
    }
    out.residue = PartialFamily::from_cell_sets(n, p);
  }
  out.classification = classify_two_uniform(out.residue);
  return out;
}

int cascade_uniformity(unsigned n, const Limits& limits) {
  if (n < 1) throw InputError("degree must be positive");
  for (unsigned bits = 64;; bits *= 2) {
    const Enclosure q = q_enclosure(n, bits);
    const BigInt lo = floor_of(q.lo);
    if (lo == floor_of(q.hi)) return static_cast<int>(lo);
    if (bits >= limits.precision_cap) throw InputError("floor(4 log2 n) undecided at the precision cap");
  }
}

FurediCheck furedi_check(const PartialFamily& h, int s, int k, const Limits& limits) {
  if (s < 1 || k < 1) throw InputError("furedi_check needs positive s and k");
  const auto sets = h.cell_sets();
  WorkBudget budget(limits.work_budget);
  FurediCheck out;
  out.size = static_cast<std::size_t>(std::count_if(sets.begin(), sets.end(), [&](const CellSet& m) { return m.count() == k; }));
  out.bound = power(s, k);
  out.sunflower_found = Detector(sets, k, s + 1, budget).run().has_value();
  out.holds = out.sunflower_found || BigInt(out.size) <= out.bound;
  return out;
}

}  // namespace permdiv
