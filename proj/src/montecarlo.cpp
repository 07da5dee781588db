#include "permdiv/montecarlo.hpp"

#include <algorithm>
#include <thread>

#include "permdiv/errors.hpp"
#include "permdiv/spread.hpp"

namespace permdiv {

namespace mp = boost::multiprecision;

namespace {

using u128 = unsigned __int128;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Keep iff u < threshold; threshold = ceil(a 2^64 / b) lies in [0, 2^64].
struct Threshold {
  u128 value;
  explicit Threshold(const Rational& p) {
    if (p < 0 || p > 1) throw InputError("probability must lie in [0, 1]");
    const BigInt t = (BigInt(mp::numerator(p)) << 64) / mp::denominator(p) +
                     ((BigInt(mp::numerator(p)) << 64) % mp::denominator(p) != 0 ? 1 : 0);
    const BigInt hi = t >> 64;
    const BigInt lo = t - (hi << 64);
    value = (static_cast<u128>(static_cast<std::uint64_t>(hi)) << 64) | static_cast<u128>(static_cast<std::uint64_t>(lo));
  }
  bool keep(std::uint64_t u) const { return static_cast<u128>(u) < value; }
};

CellSet sample_cells(int n, const Threshold& th, TrialStream& stream) {
  CellSet w;
  for (int i = 0; i < n * n; ++i) {
    if (th.keep(stream.next())) w.set(i);
  }
  return w;
}

void check_config(const TrialConfig& cfg) {
  if (cfg.trials == 0) throw InputError("trials must be positive");
  if (cfg.workers == 0) throw InputError("workers must be positive");
}

/// Counts trials for which `event(trial stream)` holds, split across workers
/// by trial index.
template <typename Event>
std::uint64_t count_successes(const TrialConfig& cfg, Event event) {
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(cfg.workers, cfg.trials));
  std::vector<std::uint64_t> partial(workers, 0);
  auto body = [&](unsigned w) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = w; t < cfg.trials; t += workers) {
      TrialStream stream(cfg.seed, t);
      hits += event(stream) ? 1 : 0;
    }
    partial[w] = hits;
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  std::uint64_t total = 0;
  for (auto h : partial) total += h;
  return total;
}

EstimateReport make_report(std::uint64_t successes, const TrialConfig& cfg, const Rational& p) {
  EstimateReport out;
  out.successes = successes;
  out.trials = cfg.trials;
  out.estimate = Rational(BigInt(successes), BigInt(cfg.trials));
  out.std_error = sqrt_enclosure(out.estimate * (1 - out.estimate) / Rational(BigInt(cfg.trials)), 64);
  out.p = p;
  out.seed = cfg.seed;
  return out;
}

std::vector<CellSet> member_cells(const PermFamily& f) {
  std::vector<CellSet> out;
  for (const auto& p : f) out.push_back(p.cells());
  return out;
}

bool any_inside(const std::vector<CellSet>& members, const CellSet& w) {
  return std::any_of(members.begin(), members.end(), [&](const CellSet& m) { return m.subset_of(w); });
}

}  // namespace

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t trial) : state_(mix(seed) ^ mix(trial + 0x9E3779B97F4A7C15ULL)) {}

std::uint64_t TrialStream::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix(state_);
}

bool TrialStream::bernoulli(const Rational& p) { return Threshold(p).keep(next()); }

std::vector<int> sample_random_subset(int ground_size, const Rational& p, TrialStream& stream) {
  if (ground_size < 0) throw InputError("ground size must be non-negative");
  const Threshold th(p);
  std::vector<int> out;
  for (int i = 0; i < ground_size; ++i) {
    if (th.keep(stream.next())) out.push_back(i);
  }
  return out;
}

bool covers_member(const PermFamily& family, const CellSet& w) {
  return std::any_of(family.begin(), family.end(), [&](const Permutation& p) { return p.cells().subset_of(w); });
}

EstimateReport estimate_cover_probability(const PermFamily& family, const TrialConfig& cfg) {
  check_config(cfg);
  if (family.empty()) throw InputError("cover probability needs a nonempty family");
  const Threshold th(cfg.p);
  const int n = family.degree();
  const auto members = member_cells(family);
  const auto hits = count_successes(cfg, [&](TrialStream& s) { return any_inside(members, sample_cells(n, th, s)); });
  return make_report(hits, cfg, cfg.p);
}

EstimateReport verify_spread_lemma(const PermFamily& family, const Rational& r, const Rational& delta,
                                   const Rational& m, const TrialConfig& cfg, const Limits& limits) {
  if (delta <= 0 || delta >= 1) throw InputError("delta must lie in (0, 1)");
  if (m <= 0) throw InputError("m must be positive");
  if (family.empty()) throw InputError("cover probability needs a nonempty family");
  const auto chk = is_r_spread(family, r, limits);
  if (!chk.spread) {
    throw HypothesisError("family is not " + to_string(r) + "-spread: pattern of size " +
                          std::to_string(chk.witness->set.size()) + " has co-degree " +
                          std::to_string(chk.witness->lhs) + " > " + to_string(chk.witness->rhs));
  }
  TrialConfig run = cfg;
  run.p = m * delta;
  bool clamped = false;
  if (run.p > 1) {
    run.p = 1;
    clamped = true;
  }
  EstimateReport out = estimate_cover_probability(family, run);
  out.clamped = clamped;
  const auto bound = spread_lemma_bound(r, delta, m, static_cast<unsigned>(family.degree()));
  out.bound = bound.value;
  out.bound_vacuous = bound.vacuous || !bound.value.has_value();
  out.note = bound.note;
  out.consistent = out.bound_vacuous || out.estimate + 3 * out.std_error.hi >= out.bound->lo;
  return out;
}

EstimateReport disjoint_split_experiment(const PermFamily& family, const TrialConfig& cfg) {
  check_config(cfg);
  const Threshold th(cfg.p);
  const int n = family.degree();
  const auto members = member_cells(family);
  CellSet grid;
  for (int i = 0; i < n * n; ++i) grid.set(i);
  const auto hits = count_successes(cfg, [&](TrialStream& s) {
    const CellSet u1 = sample_cells(n, th, s);
    return any_inside(members, u1) && any_inside(members, grid - u1);
  });
  return make_report(hits, cfg, cfg.p);
}

}  // namespace permdiv
