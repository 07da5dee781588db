#pragma once

// Maximum diversity over intersecting families at desk scale.
//
// Adding a member never lowers gamma (it raises every avoidance count outside
// the new member and leaves the rest), so the maximum is attained on maximal
// intersecting families. The exact mode enumerates those as the maximal cliques
// of the intersection graph on S_n; the heuristic mode hill-climbs over them.

#include <cstdint>
#include <string>
#include <vector>

#include "permdiv/config.hpp"
#include "permdiv/core.hpp"

namespace permdiv {

enum class SearchMode { exact, heuristic };
std::string to_string(SearchMode m);

struct SearchResult {
  PermFamily best_family{1};
  std::size_t best_gamma = 0;
  SearchMode mode = SearchMode::exact;
  /// Maximal cliques visited (exact) or moves attempted (heuristic).
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  /// Best gamma after each restart, in restart order (heuristic only).
  std::vector<std::size_t> trace;
};

/// 2 <= n <= 4. Bron-Kerbosch with pivoting over the intersection graph.
SearchResult exact_max_diversity(int n);

struct LocalSearchConfig {
  std::uint64_t iterations = 2000;  // moves per restart
  std::uint64_t seed = 1;
  unsigned restarts = 8;
  unsigned sideways_cap = 50;
  /// Restarts after the first start from T(n) with this probability, otherwise
  /// from a perturbed random star.
  double triangle_share = 0.1;
  unsigned workers = 1;
};

/// 4 <= n <= 6. Restart 0 starts from T(n), so the result is never below
/// gamma(T(n)) = (n-3)(n-3)!. Families are kept maximal by adding compatible
/// permutations in canonical order. A move drops one random member, adds a
/// random compatible permutation and closes again; it is kept on strict
/// improvement, or sideways up to sideways_cap times in a row.
SearchResult local_search_max_diversity(int n, const LocalSearchConfig& cfg);

struct TriangleAudit {
  int n = 0;
  std::size_t size = 0;
  bool intersecting = false;
  std::size_t gamma = 0;
  std::uint64_t expected = 0;  // (n-3)(n-3)!
  std::vector<Cell> minimizing_cells;
};

/// 4 <= n <= 8. Throws InvariantViolation if T(n) is not intersecting or its
/// diversity differs from (n-3)(n-3)!.
TriangleAudit verify_triangle_extremal(int n, const Limits& limits = {});

}  // namespace permdiv
