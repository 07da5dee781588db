// permdiv: command-line front end.
//
// Exit status: 0 ok, 1 unexpected failure, 2 input error, 3 hypothesis not
// met, 4 work budget exceeded, 5 internal invariant failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "permdiv/errors.hpp"
#include "permdiv/io.hpp"
#include "permdiv/report.hpp"

using namespace permdiv;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitInput = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitBudget = 4;
constexpr int kExitInvariant = 5;

struct Globals {
  std::string format = "text";
  std::optional<std::uint64_t> budget;
  std::optional<unsigned> precision_cap;
  unsigned workers = std::max(1U, std::thread::hardware_concurrency());
};

std::uint64_t env_number(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(name);
    return x;
  } catch (const std::exception&) {
    throw InputError(std::string("environment variable ") + name + " is not a non-negative integer");
  }
}

Limits effective_limits(const Globals& g) {
  Limits l;
  l.work_budget = g.budget ? *g.budget : env_number("PERMDIV_BUDGET", l.work_budget);
  l.precision_cap = g.precision_cap ? *g.precision_cap
                                    : static_cast<unsigned>(env_number("PERMDIV_PRECISION_CAP", l.precision_cap));
  l.workers = g.workers;
  if (l.workers == 0) throw InputError("--workers must be positive");
  if (l.precision_cap < 64) throw InputError("precision cap must be at least 64 bits");
  return l;
}

Json limits_json(const Limits& l) {
  return Json{{"work_budget", l.work_budget}, {"precision_cap", l.precision_cap}, {"workers", l.workers},
              {"max_enum_degree", l.max_enum_degree}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

Cell parse_cell(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw InputError("expected a cell row:col, got '" + s + "'");
  try {
    return Cell{std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InputError("expected a cell row:col, got '" + s + "'");
  }
}

// The outcome of one subcommand: the result document, any seeds it used, an
// optional raw family text (printed as-is in text format) and an exit status.
struct Outcome {
  Json config = Json::object();
  Json result = Json::object();
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> raw_family;
  int status = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversity of intersecting permutation families: exact tools, certified bounds and experiments"};
  app.set_version_flag("--version", std::string("permdiv ") + PERMDIV_VERSION);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--format", g.format, "Output format: json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--budget", g.budget, "Work budget (nodes) for exponential searches; env PERMDIV_BUDGET");
  app.add_option("--precision-cap", g.precision_cap, "Largest enclosure precision in bits; env PERMDIV_PRECISION_CAP");
  app.add_option("--workers", g.workers, "Worker threads (results do not depend on this)");

  // diversity
  auto* div = app.add_subcommand("diversity", "Diversity and co-degree table of a permutation family");
  std::string div_in;
  div->add_option("--input", div_in, "Family file")->required();

  // decompose
  auto* dec = app.add_subcommand("decompose", "Spread decomposition of a permutation family");
  std::string dec_in, dec_r, dec_q, dec_roots;
  dec->add_option("--input", dec_in, "Family file")->required();
  dec->add_option("--r", dec_r, "Spread ratio a/b (default n/3)");
  dec->add_option("--q", dec_q, "Branch size cap a/b (default 4 log2 n)");
  dec->add_option("--roots-out", dec_roots, "Write the branch roots as a partial family");

  // compress
  auto* cmp = app.add_subcommand("compress", "Compression A(H, s) of a partial family");
  std::string cmp_in, cmp_out;
  int cmp_s = 0;
  cmp->add_option("--input", cmp_in, "Partial family file")->required();
  cmp->add_option("--s", cmp_s, "Uniformity s")->required();
  cmp->add_option("--output", cmp_out, "Write the compressed family");

  // cascade
  auto* cas = app.add_subcommand("cascade", "Layered basis cascade of a partial family");
  std::string cas_in, cas_out;
  std::optional<int> cas_q;
  cas->add_option("--input", cas_in, "Partial family file")->required();
  cas->add_option("--q", cas_q, "Top layer (default floor(4 log2 n))");
  cas->add_option("--output", cas_out, "Write the residue A_2");

  // verify-bounds
  auto* vb = app.add_subcommand("verify-bounds", "Certify the auxiliary inequalities and the closing chain");
  std::vector<unsigned> vb_n;
  std::optional<unsigned> vb_from, vb_to;
  vb->add_option("--n", vb_n, "Degree(s) to check");
  vb->add_option("--from", vb_from, "First degree of a range");
  vb->add_option("--to", vb_to, "Last degree of a range");

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "Cover-probability and split experiments over p-random cell sets");
  std::string mc_in, mc_p = "1/2", mc_r, mc_delta, mc_m;
  std::optional<int> mc_sym, mc_tri;
  std::uint64_t mc_trials = 10000, mc_seed = 1;
  bool mc_split = false;
  mc->add_option("--input", mc_in, "Family file");
  mc->add_option("--sym", mc_sym, "Use the full symmetric group S_n");
  mc->add_option("--triangle", mc_tri, "Use the triangle family T(n)");
  mc->add_option("--p", mc_p, "Inclusion probability a/b");
  mc->add_option("--trials", mc_trials, "Number of trials");
  mc->add_option("--seed", mc_seed, "Seed");
  mc->add_flag("--split", mc_split, "Run the disjoint split experiment instead");
  mc->add_option("--r", mc_r, "Spread ratio a/b (with --delta and --m: spread lemma run)");
  mc->add_option("--delta", mc_delta, "delta a/b");
  mc->add_option("--m", mc_m, "m a/b");

  // search
  auto* se = app.add_subcommand("search", "Maximum diversity search over intersecting families");
  int se_n = 0;
  std::string se_mode = "heuristic", se_out;
  LocalSearchConfig se_cfg;
  se->add_option("--n", se_n, "Degree")->required();
  se->add_option("--mode", se_mode, "exact, heuristic or triangle (audit of T(n))")
      ->check(CLI::IsMember({"exact", "heuristic", "triangle"}));
  se->add_option("--iterations", se_cfg.iterations, "Moves per restart (heuristic)");
  se->add_option("--restarts", se_cfg.restarts, "Restarts (heuristic)");
  se->add_option("--seed", se_cfg.seed, "Seed (heuristic)");
  se->add_option("--output", se_out, "Write the best family");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a named family");
  int gen_n = 0;
  bool gen_tri = false, gen_sym = false;
  std::string gen_star, gen_out;
  gen->add_option("--n", gen_n, "Degree")->required();
  gen->add_flag("--triangle", gen_tri, "Triangle family T(n)");
  gen->add_flag("--sym", gen_sym, "Symmetric group S_n");
  gen->add_option("--star", gen_star, "Star through cell row:col");
  gen->add_option("--output", gen_out, "Write the family to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  const auto started = std::chrono::steady_clock::now();
  Outcome out;
  try {
    const Limits limits = effective_limits(g);
    const Format format = parse_format(g.format);
    out.config["limits"] = limits_json(limits);

    if (*div) {
      out.config["input"] = div_in;
      out.result = to_json(diversity(parse_perm_family(read_file(div_in))));
    } else if (*dec) {
      const auto fam = parse_perm_family(read_file(dec_in));
      const int n = fam.degree();
      SpreadParams params = SpreadParams::standard(n);
      if (!dec_r.empty()) params.r = parse_rational(dec_r);
      if (!dec_q.empty()) params.q_cap = CertifiedReal::exact(parse_rational(dec_q));
      out.config["input"] = dec_in;
      out.config["r"] = to_string(params.r);
      out.config["q"] = params.q_cap.description();
      const auto d = spread_decompose(fam, params, limits);
      out.result = to_json(d);
      if (!dec_roots.empty()) {
        std::vector<PartialPerm> roots;
        for (const auto& b : d.branches) roots.push_back(b.root);
        write_text(dec_roots, serialize_family(PartialFamily(n, roots)));
      }
    } else if (*cmp) {
      const auto fam = parse_partial_family(read_file(cmp_in));
      out.config["input"] = cmp_in;
      out.config["s"] = cmp_s;
      const auto res = compress(fam, cmp_s, limits);
      out.result = Json{{"input_size", fam.size()},
                        {"output_size", res.size()},
                        {"input_intersecting", is_intersecting(fam)},
                        {"output_intersecting", is_intersecting(res)},
                        {"detection_rule", kDetectionRule},
                        {"family", serialize_family(res)}};
      out.raw_family = serialize_family(res);
      if (!cmp_out.empty()) write_text(cmp_out, *out.raw_family);
    } else if (*cas) {
      const auto fam = parse_partial_family(read_file(cas_in));
      const int q = cas_q ? *cas_q : cascade_uniformity(static_cast<unsigned>(fam.degree()), limits);
      out.config["input"] = cas_in;
      out.config["q"] = q;
      const auto res = basis_cascade(fam, q, limits);
      out.result = to_json(res);
      if (!cas_out.empty()) write_text(cas_out, serialize_family(res.residue));
    } else if (*vb) {
      std::vector<unsigned> ns = vb_n;
      if (vb_from || vb_to) {
        if (!vb_from || !vb_to || *vb_from > *vb_to) throw InputError("--from and --to must both be given, from <= to");
        for (unsigned n = *vb_from; n <= *vb_to; ++n) ns.push_back(n);
      }
      if (ns.empty()) throw InputError("give --n or --from/--to");
      out.config["n"] = ns;
      Json sets = Json::array();
      bool hypothesis_ok = true;
      for (unsigned n : ns) {
        hypothesis_ok = hypothesis_ok && n >= 500;
        sets.push_back(Json{{"n", n},
                            {"fact22", to_json(check_fact22(n, limits))},
                            {"final_chain", to_json(check_final_chain(n, limits))}});
      }
      out.result = Json{{"certificates", sets}};
      if (!hypothesis_ok) out.status = kExitHypothesis;
    } else if (*mc) {
      const int sources = (!mc_in.empty() ? 1 : 0) + (mc_sym ? 1 : 0) + (mc_tri ? 1 : 0);
      if (sources != 1) throw InputError("give exactly one of --input, --sym, --triangle");
      const PermFamily fam = !mc_in.empty() ? parse_perm_family(read_file(mc_in))
                             : mc_sym      ? enumerate_symmetric_group(*mc_sym, limits)
                                           : make_triangle_family(*mc_tri, limits);
      TrialConfig cfg{parse_rational(mc_p), mc_trials, mc_seed, limits.workers};
      out.seeds.push_back(mc_seed);
      out.config["family"] = !mc_in.empty() ? mc_in : mc_sym ? "S_" + std::to_string(*mc_sym) : "T(" + std::to_string(*mc_tri) + ")";
      out.config["trials"] = mc_trials;
      out.config["seed"] = mc_seed;
      const int lemma_args = (!mc_r.empty() ? 1 : 0) + (!mc_delta.empty() ? 1 : 0) + (!mc_m.empty() ? 1 : 0);
      if (lemma_args != 0 && lemma_args != 3) throw InputError("--r, --delta and --m go together");
      if (lemma_args == 3) {
        if (mc_split) throw InputError("--split cannot be combined with --r/--delta/--m");
        out.config["experiment"] = "spread_lemma";
        out.config["r"] = mc_r;
        out.config["delta"] = mc_delta;
        out.config["m"] = mc_m;
        out.result = to_json(verify_spread_lemma(fam, parse_rational(mc_r), parse_rational(mc_delta),
                                                 parse_rational(mc_m), cfg, limits));
      } else {
        out.config["experiment"] = mc_split ? "disjoint_split" : "cover";
        out.config["p"] = to_string(cfg.p);
        out.result = to_json(mc_split ? disjoint_split_experiment(fam, cfg) : estimate_cover_probability(fam, cfg));
      }
    } else if (*se) {
      out.config["n"] = se_n;
      out.config["mode"] = se_mode;
      if (se_mode == "triangle") {
        out.result = to_json(verify_triangle_extremal(se_n, limits));
      } else {
        SearchResult r;
        if (se_mode == "exact") {
          r = exact_max_diversity(se_n);
        } else {
          se_cfg.workers = limits.workers;
          out.config["iterations"] = se_cfg.iterations;
          out.config["restarts"] = se_cfg.restarts;
          out.config["seed"] = se_cfg.seed;
          out.seeds.push_back(se_cfg.seed);
          r = local_search_max_diversity(se_n, se_cfg);
        }
        out.result = to_json(r);
        if (!se_out.empty()) write_text(se_out, serialize_family(r.best_family));
      }
    } else if (*gen) {
      const int kinds = (gen_tri ? 1 : 0) + (gen_sym ? 1 : 0) + (!gen_star.empty() ? 1 : 0);
      if (kinds != 1) throw InputError("give exactly one of --triangle, --sym, --star");
      const PermFamily fam = gen_tri   ? make_triangle_family(gen_n, limits)
                             : gen_sym ? enumerate_symmetric_group(gen_n, limits)
                                       : make_star(gen_n, parse_cell(gen_star), limits);
      out.config["n"] = gen_n;
      out.config["kind"] = gen_tri ? "triangle" : gen_sym ? "sym" : "star " + gen_star;
      out.raw_family = serialize_family(fam);
      out.result = Json{{"size", fam.size()}, {"family", *out.raw_family}};
      if (!gen_out.empty()) write_text(gen_out, *out.raw_family);
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (format == Format::text && out.raw_family) {
      std::cout << *out.raw_family;
    } else {
      std::string echo = "permdiv";
      for (int i = 1; i < argc; ++i) echo += std::string(" ") + argv[i];
      const Json record{{"tool", "permdiv"},
                        {"version", PERMDIV_VERSION},
                        {"command", echo},
                        {"subcommand", app.get_subcommands().front()->get_name()},
                        {"config", out.config},
                        {"seeds", out.seeds},
                        {"wall_time_seconds", wall},
                        {"result", out.result}};
      std::cout << render(record, format);
    }
    return out.status;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis not met: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
