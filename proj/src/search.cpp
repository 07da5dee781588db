#include "permdiv/search.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "permdiv/errors.hpp"

namespace permdiv {

std::string to_string(SearchMode m) { return m == SearchMode::exact ? "exact" : "heuristic"; }

namespace {

std::size_t gamma_of(int n, std::span<const int> codegree, std::size_t size) {
  const int top = *std::max_element(codegree.begin(), codegree.begin() + n * n);
  return size - static_cast<std::size_t>(top);
}

// ---- exact mode --------------------------------------------------------

class CliqueSearch {
 public:
  explicit CliqueSearch(int n) : n_(n) {
    const auto all = enumerate_symmetric_group(n);
    perms_.assign(all.begin(), all.end());
    const std::size_t m = perms_.size();
    adj_.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j && perms_[i].cells().intersects(perms_[j].cells())) adj_[i] |= 1U << j;
      }
    }
  }

  SearchResult run() {
    const std::uint32_t all = perms_.size() == 32 ? ~0U : (1U << perms_.size()) - 1;
    expand(0, all, 0);
    SearchResult out;
    out.mode = SearchMode::exact;
    out.best_gamma = best_gamma_;
    out.iterations = visited_;
    std::vector<Permutation> fam;
    for (std::size_t i = 0; i < perms_.size(); ++i) {
      if ((best_ >> i) & 1U) fam.push_back(perms_[i]);
    }
    out.best_family = PermFamily(n_, std::move(fam));
    return out;
  }

 private:
  void expand(std::uint32_t r, std::uint32_t p, std::uint32_t x) {
    if (p == 0 && x == 0) {
      evaluate(r);
      return;
    }
    // Pivot: the vertex of P | X with most neighbours in P.
    int pivot = -1;
    int most = -1;
    for (std::uint32_t px = p | x; px != 0; px &= px - 1) {
      const int u = std::countr_zero(px);
      const int deg = std::popcount(p & adj_[static_cast<std::size_t>(u)]);
      if (deg > most) {
        most = deg;
        pivot = u;
      }
    }
    for (std::uint32_t cand = p & ~adj_[static_cast<std::size_t>(pivot)]; cand != 0; cand &= cand - 1) {
      const int v = std::countr_zero(cand);
      const std::uint32_t bit = 1U << v;
      expand(r | bit, p & adj_[static_cast<std::size_t>(v)], x & adj_[static_cast<std::size_t>(v)]);
      p &= ~bit;
      x |= bit;
    }
  }

  void evaluate(std::uint32_t r) {
    ++visited_;
    std::array<int, 16> codeg{};
    std::size_t size = 0;
    for (std::uint32_t b = r; b != 0; b &= b - 1) {
      perms_[static_cast<std::size_t>(std::countr_zero(b))].cells().for_each([&](int c) { ++codeg[static_cast<std::size_t>(c)]; });
      ++size;
    }
    const std::size_t g = gamma_of(n_, codeg, size);
    if (visited_ == 1 || g > best_gamma_) {
      best_gamma_ = g;
      best_ = r;
    }
  }

  int n_;
  std::vector<Permutation> perms_;
  std::vector<std::uint32_t> adj_;
  std::uint64_t visited_ = 0;
  std::size_t best_gamma_ = 0;
  std::uint32_t best_ = 0;
};

// ---- heuristic mode ----------------------------------------------------

class Landscape {
 public:
  explicit Landscape(int n) : n_(n) {
    const auto all = enumerate_symmetric_group(n);
    perms_.assign(all.begin(), all.end());
    words_ = (perms_.size() + 63) / 64;
    disjoint_.assign(perms_.size() * words_, 0);
    for (std::size_t i = 0; i < perms_.size(); ++i) {
      for (std::size_t j = 0; j < perms_.size(); ++j) {
        if (!perms_[i].cells().intersects(perms_[j].cells())) disjoint_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  }

  int n() const { return n_; }
  std::size_t size() const { return perms_.size(); }
  std::size_t words() const { return words_; }
  const Permutation& perm(std::size_t i) const { return perms_[i]; }
  std::size_t index_of(const Permutation& p) const {
    return static_cast<std::size_t>(std::lower_bound(perms_.begin(), perms_.end(), p) - perms_.begin());
  }
  const std::uint64_t* disjoint(std::size_t i) const { return &disjoint_[i * words_]; }

 private:
  int n_;
  std::vector<Permutation> perms_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> disjoint_;
};

class State {
 public:
  explicit State(const Landscape& g) : g_(&g), bits_(g.words(), 0), codeg_(static_cast<std::size_t>(g.n() * g.n()), 0) {}

  bool has(std::size_t i) const { return (bits_[i / 64] >> (i % 64)) & 1U; }
  bool addable(std::size_t i) const {
    if (has(i)) return false;
    const auto* d = g_->disjoint(i);
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      if ((d[w] & bits_[w]) != 0) return false;
    }
    return true;
  }
  void add(std::size_t i) {
    bits_[i / 64] |= std::uint64_t{1} << (i % 64);
    g_->perm(i).cells().for_each([&](int c) { ++codeg_[static_cast<std::size_t>(c)]; });
    ++size_;
  }
  void remove(std::size_t i) {
    bits_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    g_->perm(i).cells().for_each([&](int c) { --codeg_[static_cast<std::size_t>(c)]; });
    --size_;
  }
  void close() {
    for (std::size_t i = 0; i < g_->size(); ++i) {
      if (addable(i)) add(i);
    }
  }
  std::size_t gamma() const { return size_ == 0 ? 0 : gamma_of(g_->n(), codeg_, size_); }
  std::size_t size() const { return size_; }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g_->size(); ++i) {
      if (has(i)) out.push_back(i);
    }
    return out;
  }
  std::vector<std::size_t> candidates() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g_->size(); ++i) {
      if (addable(i)) out.push_back(i);
    }
    return out;
  }
  PermFamily family() const {
    std::vector<Permutation> out;
    for (auto i : members()) out.push_back(g_->perm(i));
    return PermFamily(g_->n(), std::move(out));
  }

 private:
  const Landscape* g_;
  std::vector<std::uint64_t> bits_;
  std::vector<int> codeg_;
  std::size_t size_ = 0;
};

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

State start_from(const Landscape& g, const PermFamily& fam) {
  State s(g);
  for (const auto& p : fam) s.add(g.index_of(p));
  s.close();
  return s;
}

State random_star_start(const Landscape& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coord(1, g.n());
  State s = start_from(g, make_star(g.n(), Cell{coord(rng), coord(rng)}));
  const int drops = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int d = 0; d < drops && s.size() > 1; ++d) s.remove(pick(s.members(), rng));
  const int adds = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int a = 0; a < adds; ++a) {
    const auto c = s.candidates();
    if (c.empty()) break;
    s.add(pick(c, rng));
  }
  s.close();
  return s;
}

struct RestartOutcome {
  std::size_t gamma = 0;
  PermFamily family{1};
};

RestartOutcome run_restart(const Landscape& g, const LocalSearchConfig& cfg, unsigned index) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), index};
  std::mt19937_64 rng(seq);
  State cur = index == 0 || std::bernoulli_distribution(cfg.triangle_share)(rng)
                  ? start_from(g, make_triangle_family(g.n()))
                  : random_star_start(g, rng);
  State best = cur;
  unsigned sideways = 0;
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    State next = cur;
    const auto mem = next.members();
    const std::size_t dropped = pick(mem, rng);
    next.remove(dropped);
    auto cand = next.candidates();
    std::erase(cand, dropped);
    if (!cand.empty()) next.add(pick(cand, rng));
    next.close();
    if (next.gamma() > cur.gamma()) {
      cur = std::move(next);
      sideways = 0;
    } else if (next.gamma() == cur.gamma() && sideways < cfg.sideways_cap) {
      cur = std::move(next);
      ++sideways;
    }
    if (cur.gamma() > best.gamma()) best = cur;
  }
  return {best.gamma(), best.family()};
}

}  // namespace

SearchResult exact_max_diversity(int n) {
  if (n < 2 || n > 4) throw InputError("exact search needs 2 <= n <= 4");
  return CliqueSearch(n).run();
}

SearchResult local_search_max_diversity(int n, const LocalSearchConfig& cfg) {
  if (n < 4 || n > 6) throw InputError("local search needs 4 <= n <= 6");
  if (cfg.restarts == 0) throw InputError("at least one restart is needed");
  if (cfg.workers == 0) throw InputError("workers must be positive");
  const Landscape g(n);
  std::vector<RestartOutcome> outcomes(cfg.restarts);
  const unsigned workers = std::min(cfg.workers, cfg.restarts);
  auto body = [&](unsigned w) {
    for (unsigned k = w; k < cfg.restarts; k += workers) outcomes[k] = run_restart(g, cfg, k);
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }

  SearchResult out;
  out.mode = SearchMode::heuristic;
  out.seed = cfg.seed;
  out.iterations = cfg.iterations * cfg.restarts;
  for (unsigned k = 0; k < cfg.restarts; ++k) {
    if (k == 0 || outcomes[k].gamma > out.best_gamma) {
      out.best_gamma = outcomes[k].gamma;
      out.best_family = outcomes[k].family;
    }
    out.trace.push_back(out.best_gamma);
  }
  if (!is_intersecting(out.best_family) || diversity(out.best_family).gamma != out.best_gamma) {
    throw InvariantViolation("local search produced an inconsistent family");
  }
  return out;
}

TriangleAudit verify_triangle_extremal(int n, const Limits& limits) {
  if (n < 4 || n > 8) throw InputError("triangle audit needs 4 <= n <= 8");
  const auto t = make_triangle_family(n, limits);
  TriangleAudit out;
  out.n = n;
  out.size = t.size();
  out.intersecting = is_intersecting(t);
  const auto rep = diversity(t);
  out.gamma = rep.gamma;
  out.expected = static_cast<std::uint64_t>(n - 3);
  for (int k = 2; k <= n - 3; ++k) out.expected *= static_cast<std::uint64_t>(k);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (rep.avoidance(Cell{i, j}) == rep.gamma) out.minimizing_cells.push_back(Cell{i, j});
    }
  }
  if (!out.intersecting) throw InvariantViolation("T(n) is not intersecting");
  if (out.gamma != out.expected) throw InvariantViolation("gamma(T(n)) differs from (n-3)(n-3)!");
  return out;
}

}  // namespace permdiv
