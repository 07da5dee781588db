#include "permdiv/bounds.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include "permdiv/core.hpp"
#include "permdiv/errors.hpp"

namespace permdiv {

namespace mp = boost::multiprecision;

namespace {

BigInt pow2(unsigned k) { return BigInt(1) << k; }

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if (a < 0 && q * b != a) q -= 1;
  return q;
}

BigInt ceil_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if (a > 0 && q * b != a) q += 1;
  return q;
}

Rational ratio(const BigInt& num, const BigInt& den) { return Rational(num) / Rational(den); }

Rational scale_pow2(const Rational& x, long e) {
  if (e >= 0) return x * Rational(pow2(static_cast<unsigned>(e)));
  return x / Rational(pow2(static_cast<unsigned>(-e)));
}

bool is_pow2(const BigInt& v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Rationals

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_int = [&](const std::string& s) {
    if (s.empty()) throw InputError("malformed rational '" + text + "'");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw InputError("malformed rational '" + text + "'");
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') {
        throw InputError("malformed rational '" + text + "' (expected a or a/b with integers)");
      }
    }
    return BigInt(s[0] == '+' ? s.substr(1) : s);
  };
  if (slash == std::string::npos) return Rational(parse_int(text));
  const BigInt num = parse_int(text.substr(0, slash));
  const BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw InputError("rational with zero denominator: '" + text + "'");
  return ratio(num, den);
}

std::string to_string(const Rational& q) {
  const BigInt num = mp::numerator(q);
  const BigInt den = mp::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

BigInt floor_of(const Rational& x) { return floor_div(mp::numerator(x), mp::denominator(x)); }
BigInt ceil_of(const Rational& x) { return ceil_div(mp::numerator(x), mp::denominator(x)); }

Rational floor_to_dyadic(const Rational& x, unsigned bits) {
  return ratio(floor_div(mp::numerator(x) << bits, mp::denominator(x)), pow2(bits));
}

Rational ceil_to_dyadic(const Rational& x, unsigned bits) {
  return ratio(ceil_div(mp::numerator(x) << bits, mp::denominator(x)), pow2(bits));
}

// ---------------------------------------------------------------------------
// Interval arithmetic

Enclosure operator+(const Enclosure& a, const Enclosure& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Enclosure operator-(const Enclosure& a, const Enclosure& b) { return {a.lo - b.hi, a.hi - b.lo}; }
Enclosure operator-(const Enclosure& a) { return {-a.hi, -a.lo}; }

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  if (a.lo >= 0 && b.lo >= 0) return {a.lo * b.lo, a.hi * b.hi};
  const Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Enclosure operator/(const Enclosure& a, const Enclosure& b) {
  if (b.lo <= 0 && b.hi >= 0) throw InputError("interval division by an enclosure containing zero");
  return a * Enclosure{1 / b.hi, 1 / b.lo};
}

Enclosure pow(const Enclosure& a, unsigned k) {
  Enclosure r = Enclosure::exact(1);
  for (unsigned i = 0; i < k; ++i) r = r * a;
  return r;
}

Enclosure widen_to_dyadic(const Enclosure& a, unsigned bits) {
  return {floor_to_dyadic(a.lo, bits), ceil_to_dyadic(a.hi, bits)};
}

// ---------------------------------------------------------------------------
// Transcendental enclosures

Enclosure log2_enclosure(const Rational& x, unsigned precision) {
  if (x <= 0) throw InputError("log2 of a non-positive number");
  const BigInt num = mp::numerator(x);
  const BigInt den = mp::denominator(x);
  long e = static_cast<long>(mp::msb(num)) - static_cast<long>(mp::msb(den));
  if (is_pow2(num) && is_pow2(den)) return Enclosure::exact(Rational(e));

  Rational y = scale_pow2(x, -e);
  if (y < 1) {
    e -= 1;
    y *= 2;
  }
  // y in [1, 2); each squaring exposes the next binary digit of log2 y.
  const unsigned p = precision;
  for (unsigned work = p + 32;; work *= 2) {
    BigInt lo = floor_div(mp::numerator(y) << work, mp::denominator(y));
    BigInt hi = ceil_div(mp::numerator(y) << work, mp::denominator(y));
    const BigInt one = pow2(work);
    const BigInt two = pow2(work + 1);
    BigInt digits = 0;
    unsigned k = 0;
    for (; k < p; ++k) {
      lo = (lo * lo) >> work;
      hi = (hi * hi + one - 1) >> work;
      if (lo >= two) {
        digits = (digits << 1) | 1;
        lo >>= 1;
        hi = (hi + 1) >> 1;
      } else if (hi < two) {
        digits <<= 1;
      } else {
        break;
      }
    }
    if (k == p || work > 16 * (p + 32)) {
      const Rational base = Rational(e) + ratio(digits, pow2(k));
      return {base, base + ratio(BigInt(1), pow2(k))};
    }
  }
}

Enclosure log2_enclosure(const Enclosure& x, unsigned precision) {
  if (x.is_exact()) return log2_enclosure(x.lo, precision);
  return {log2_enclosure(x.lo, precision).lo, log2_enclosure(x.hi, precision).hi};
}

Enclosure entropy_enclosure(const Rational& delta, unsigned precision) {
  if (delta <= 0 || delta >= 1) throw InputError("entropy needs 0 < delta < 1");
  const Enclosure a = log2_enclosure(delta, precision);
  const Enclosure b = log2_enclosure(Rational(1) - delta, precision);
  return -(Enclosure::exact(delta) * a) - (Enclosure::exact(Rational(1) - delta) * b);
}

Enclosure entropy_enclosure(const Enclosure& delta, unsigned precision) {
  if (delta.lo <= 0 || delta.hi >= 1) throw InputError("entropy needs 0 < delta < 1");
  if (delta.is_exact()) return entropy_enclosure(delta.lo, precision);
  const Rational half(1, 2);
  const Enclosure at_lo = entropy_enclosure(delta.lo, precision);
  const Enclosure at_hi = entropy_enclosure(delta.hi, precision);
  // H increases on (0, 1/2], decreases on [1/2, 1), and peaks at H(1/2) = 1.
  if (delta.hi <= half) return {at_lo.lo, at_hi.hi};
  if (delta.lo >= half) return {at_hi.lo, at_lo.hi};
  return {std::min(at_lo.lo, at_hi.lo), Rational(1)};
}

Enclosure euler_enclosure(unsigned precision) {
  const BigInt target = pow2(precision + 2);
  unsigned terms = 1;
  BigInt next_fact = 2;  // (terms + 1)!
  while (next_fact < target) {
    ++terms;
    next_fact *= terms + 1;
  }
  // sum_{k<=N} 1/k! = (sum_k N!/k!) / N!
  BigInt numer = 0;
  BigInt term = 1;  // N!/k! for k = N down to 0
  for (unsigned k = terms;; --k) {
    numer += term;
    if (k == 0) break;
    term *= k;
  }
  const Rational partial = ratio(numer, term);
  const Rational tail = ratio(BigInt(2), next_fact);
  return {floor_to_dyadic(partial, precision + 2), ceil_to_dyadic(partial + tail, precision + 2)};
}

Enclosure ln2_enclosure(unsigned precision) {
  const unsigned terms = precision + 4;
  Rational sum = 0;
  for (unsigned k = 1; k <= terms; ++k) sum += ratio(BigInt(1), BigInt(k) * pow2(k));
  const Rational tail = ratio(BigInt(1), BigInt(terms + 1) * pow2(terms));
  return {floor_to_dyadic(sum, precision + 2), ceil_to_dyadic(sum + tail, precision + 2)};
}

namespace {

// Lower or upper bound on exp(y) for a rational 0 <= y < 1 with relative
// error about 2^-precision.
Rational exp_unit(const Rational& y, unsigned precision, bool upper) {
  const unsigned work = precision + 16;
  const BigInt one = pow2(work);
  const BigInt ys = upper ? ceil_div(mp::numerator(y) << work, mp::denominator(y))
                          : floor_div(mp::numerator(y) << work, mp::denominator(y));
  BigInt term = one;
  BigInt sum = one;
  unsigned j = 0;
  // Stop once the next term drops below 2^-(precision + 8); the remaining tail
  // is at most twice that term because y < 1.
  while (true) {
    ++j;
    term = upper ? ceil_div(term * ys, one * j) : floor_div(term * ys, one * j);
    sum += term;
    if (term * pow2(precision + 8) < one) break;
  }
  if (upper) sum += 2 * term + 1;
  return ratio(sum, one);
}

Enclosure exp2_rational(const Rational& t, unsigned precision) {
  const BigInt k = floor_of(t);
  const Rational frac = t - Rational(k);
  const long shift = static_cast<long>(k);
  if (frac == 0) return Enclosure::exact(scale_pow2(Rational(1), shift));
  const Enclosure y = Enclosure::exact(frac) * ln2_enclosure(precision + 8);
  const Rational lo = exp_unit(y.lo, precision + 4, false);
  const Rational hi = exp_unit(y.hi, precision + 4, true);
  return {scale_pow2(lo, shift), scale_pow2(hi, shift)};
}

}  // namespace

Enclosure exp2_enclosure(const Enclosure& x, unsigned precision) {
  const Enclosure dx = widen_to_dyadic(x, precision + 8);
  return {exp2_rational(dx.lo, precision).lo, exp2_rational(dx.hi, precision).hi};
}

Enclosure sqrt_enclosure(const Rational& x, unsigned precision) {
  if (x < 0) throw InputError("sqrt of a negative number");
  const BigInt num = mp::numerator(x) << (2 * precision);
  const BigInt den = mp::denominator(x);
  const BigInt lo_sq = floor_div(num, den);
  const BigInt hi_sq = ceil_div(num, den);
  const BigInt lo = mp::sqrt(lo_sq);
  BigInt hi = mp::sqrt(hi_sq);
  if (hi * hi < hi_sq) hi += 1;
  return {ratio(lo, pow2(precision)), ratio(hi, pow2(precision))};
}

// ---------------------------------------------------------------------------
// Exact integers

const BigInt& factorial(unsigned n) {
  static std::mutex mutex;
  static std::map<unsigned, BigInt> cache{{0U, BigInt(1)}};
  if (n > 100000) throw InputError("factorial argument above 100000");
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.upper_bound(n);
  --it;
  if (it->first == n) return it->second;
  BigInt f = it->second;
  for (unsigned k = it->first + 1; k <= n; ++k) f *= k;
  return cache.emplace(n, std::move(f)).first->second;
}

BigInt derangement_big(unsigned m) {
  BigInt prev = 1;  // D_0
  if (m == 0) return prev;
  BigInt cur = 0;  // D_1
  for (unsigned k = 2; k <= m; ++k) {
    BigInt next = BigInt(k - 1) * (cur + prev);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::optional<BigInt> derangement_floor_via_e(unsigned m, unsigned precision_cap) {
  const Rational top = Rational(factorial(m) + 1);
  for (unsigned bits = 64;; bits *= 2) {
    const Enclosure e = euler_enclosure(bits);
    const BigInt lo = floor_of(top / e.hi);
    const BigInt hi = floor_of(top / e.lo);
    if (lo == hi) return lo;
    if (bits >= precision_cap) return std::nullopt;
  }
}

Enclosure q_enclosure(unsigned n, unsigned precision) {
  return Enclosure::exact(4) * log2_enclosure(Rational(n), precision);
}

// ---------------------------------------------------------------------------
// Comparisons

CertifiedReal CertifiedReal::exact(const Rational& v) {
  return CertifiedReal(to_string(v), [v](unsigned) { return Enclosure::exact(v); });
}

CertifiedReal CertifiedReal::four_log2(unsigned n) {
  return CertifiedReal("4*log2(" + std::to_string(n) + ")",
                       [n](unsigned bits) { return q_enclosure(n, bits); });
}

Comparison compare(const CertifiedReal& x, const Rational& c, unsigned cap) {
  Comparison out;
  for (unsigned bits = 64;; bits *= 2) {
    out.enclosure = x.at(bits);
    out.bits = bits;
    if (out.enclosure.hi < c) {
      out.order = Order::less;
      return out;
    }
    if (out.enclosure.lo > c) {
      out.order = Order::greater;
      return out;
    }
    if (out.enclosure.is_exact() && out.enclosure.lo == c) {
      out.order = Order::equal;
      return out;
    }
    if (bits >= cap) return out;
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::proved:
      return "proved";
    case Verdict::refuted:
      return "refuted";
    case Verdict::undecided:
      break;
  }
  return "undecided";
}

Verdict CertificateSet::overall() const {
  bool all = !claims.empty();
  for (const auto& c : claims) {
    if (c.verdict == Verdict::refuted) return Verdict::refuted;
    all = all && c.verdict == Verdict::proved;
  }
  return all ? Verdict::proved : Verdict::undecided;
}

const CertificateReport* CertificateSet::find(const std::string& claim) const {
  for (const auto& c : claims) {
    if (c.claim == claim) return &c;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

Verdict exact_verdict(bool holds) { return holds ? Verdict::proved : Verdict::refuted; }

/// Re-runs `attempt` at doubling precision while it stays undecided.
template <class Attempt>
CertificateReport refine(const Limits& limits, Attempt attempt) {
  for (unsigned bits = 64;; bits *= 2) {
    CertificateReport rep = attempt(bits);
    rep.precision = bits;
    if (rep.verdict != Verdict::undecided || bits >= limits.precision_cap) return rep;
  }
}

CertificateReport make_report(std::string claim, unsigned n) {
  CertificateReport r;
  r.claim = std::move(claim);
  r.n = n;
  return r;
}

/// "value <= bound" with strict separation.
Verdict at_most(const Enclosure& value, const Rational& bound) {
  if (value.hi < bound || (value.is_exact() && value.hi == bound)) return Verdict::proved;
  if (value.lo > bound) return Verdict::refuted;
  return Verdict::undecided;
}

/// "value < bound".
Verdict below(const Enclosure& value, const Rational& bound) {
  if (value.hi < bound) return Verdict::proved;
  if (value.lo >= bound) return Verdict::refuted;
  return Verdict::undecided;
}

Enclosure delta_enclosure(unsigned n, unsigned bits) {
  const Enclosure l = log2_enclosure(Rational(2 * n), bits);
  return widen_to_dyadic(Enclosure::exact(1) / (Enclosure::exact(2) * l), bits + 8);
}

/// floor(q) when the enclosure decides it.
std::optional<BigInt> decided_floor(const Enclosure& q) {
  const BigInt a = floor_of(q.lo);
  if (a == floor_of(q.hi)) return a;
  return std::nullopt;
}

/// ceil(q) when the enclosure decides it.
std::optional<BigInt> decided_ceil(const Enclosure& q) {
  const BigInt a = ceil_of(q.lo);
  if (a == ceil_of(q.hi)) return a;
  return std::nullopt;
}

BigInt ipow(unsigned base, unsigned k) { return mp::pow(BigInt(base), k); }

/// f(i) = (n/3)^i (n-i)!
Rational f_value(unsigned n, unsigned i) {
  return ratio(mp::pow(BigInt(n), i) * factorial(n - i), mp::pow(BigInt(3), i));
}

std::vector<CertificateReport> hypothesis_not_met(unsigned n, std::initializer_list<const char*> claims) {
  std::vector<CertificateReport> out;
  for (const char* c : claims) {
    auto r = make_report(c, n);
    r.note = "hypothesis n >= 500 not met (n = " + std::to_string(n) + ")";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

CertificateSet check_fact22(unsigned n, const Limits& limits) {
  CertificateSet set;
  set.n = n;
  if (n < 500) {
    set.claims = hypothesis_not_met(
        n, {"fact22.entropy", "fact22.r_threshold", "fact22.ratio_identity", "fact22.f_at_q", "fact22.f_at_n"});
    return set;
  }
  const Rational r = Rational(n) / 3;

  set.claims.push_back(refine(limits, [&](unsigned bits) {
    auto rep = make_report("fact22.entropy", n);
    const Enclosure delta = delta_enclosure(n, bits);
    const Enclosure h = entropy_enclosure(delta, bits);
    rep.enclosures = {{"delta", delta}, {"H(delta)", h}};
    rep.verdict = at_most(h, Rational(288, 1000));
    return rep;
  }));

  set.claims.push_back(refine(limits, [&](unsigned bits) {
    auto rep = make_report("fact22.r_threshold", n);
    const Enclosure delta = delta_enclosure(n, bits);
    const Enclosure h = entropy_enclosure(delta, bits);
    const Enclosure rhs = exp2_enclosure(Enclosure::exact(2) * (Enclosure::exact(1) + h), bits) / delta;
    rep.enclosures = {{"r", Enclosure::exact(r)}, {"2^(2(1+H))/delta", rhs}};
    if (rhs.hi < r) {
      rep.verdict = Verdict::proved;
    } else if (rhs.lo > r) {
      rep.verdict = Verdict::refuted;
    }
    return rep;
  }));

  {
    auto rep = make_report("fact22.ratio_identity", n);
    // Exact check at the indices the argument uses: around q, around the
    // turning point 2n/3, and at the right end.
    const unsigned qf = static_cast<unsigned>(floor_of(q_enclosure(n, 64).lo));
    const unsigned turn = 2 * n / 3;
    std::vector<unsigned> idx;
    for (unsigned i = 0; i <= std::min(n - 1, qf + 8); ++i) idx.push_back(i);
    for (unsigned i : {turn - 1, turn, turn + 1, n - 2, n - 1}) idx.push_back(i);
    bool ok = true;
    for (unsigned i : idx) {
      const Rational lhs = f_value(n, i + 1) / f_value(n, i);
      const Rational expected = Rational(n) / (3 * Rational(n - i));
      ok = ok && lhs == expected;
      ok = ok && ((lhs < 1) == (3 * i < 2 * n));
    }
    rep.verdict = exact_verdict(ok);
    rep.note = "checked exactly at " + std::to_string(idx.size()) +
               " indices; f decreases exactly while 3i < 2n";
    set.claims.push_back(std::move(rep));
  }

  set.claims.push_back(refine(limits, [&](unsigned bits) {
    auto rep = make_report("fact22.f_at_q", n);
    const Enclosure q = q_enclosure(n, bits);
    rep.enclosures = {{"q", q}};
    const auto x0_big = decided_ceil(q);
    if (!x0_big) return rep;
    const auto x0 = static_cast<unsigned>(*x0_big);
    const BigInt& nf = factorial(n);
    const BigInt& tail = factorial(n - x0);
    const BigInt& n4f = factorial(n - 4);
    const BigInt n4 = ipow(n, 4);
    // f(x0) = 2^-x0 (2n/3)^x0 (n-x0)!
    const bool link1 = f_value(n, x0) == ratio(ipow(2 * n, x0) * tail, ipow(3, x0) * ipow(2, x0));
    // (2n/3)^x0 (n-x0)! <= n!
    const bool link2 = ipow(2 * n, x0) * tail <= ipow(3, x0) * nf;
    // 2^-x0 <= n^-4
    const bool link3 = ipow(2, x0) >= n4;
    // n^-4 n! < (n-4)!
    const bool link4 = nf < n4 * n4f;
    const bool direct = ipow(n, x0) * tail <= ipow(3, x0) * n4f;
    const bool chain = link1 && link2 && link3 && link4;
    if (chain && !direct) throw InvariantViolation("fact22.f_at_q: chain holds but direct comparison fails");
    rep.verdict = exact_verdict(direct);
    rep.enclosures.push_back({"x0 = ceil(q)", Enclosure::exact(Rational(x0))});
    rep.note = std::string("f(x0) <= (n-4)! exact; chain links ") + (link1 ? "1" : "-") + (link2 ? "2" : "-") +
               (link3 ? "3" : "-") + (link4 ? "4" : "-") + " hold";
    return rep;
  }));

  {
    auto rep = make_report("fact22.f_at_n", n);
    // (n/3)^n <= n^-4 n!  and  n^-4 n! <= (n-4)!
    const BigInt n4 = ipow(n, 4);
    const bool first = ipow(n, n) * n4 <= ipow(3, n) * factorial(n);
    const bool second = factorial(n) <= n4 * factorial(n - 4);
    rep.verdict = exact_verdict(first && second);
    rep.note = std::string("exact integers; (n/3)^n <= n^-4 n! ") + (first ? "holds" : "fails") +
               ", n^-4 n! <= (n-4)! " + (second ? "holds" : "fails");
    set.claims.push_back(std::move(rep));
  }
  return set;
}

CertificateReport check_derangement_link(unsigned m, const Limits& limits) {
  if (m <= 20) {
    return refine(limits, [&](unsigned bits) {
      auto rep = make_report("chain.derangement_link", m + 2);
      const Enclosure e = euler_enclosure(bits);
      const BigInt d = derangement_big(m);
      // m! - D_m <= (1 - 1/e) m!  <=>  D_m e >= m!
      const Enclosure lhs = Enclosure::exact(Rational(d)) * e;
      const Rational mf(factorial(m));
      rep.enclosures = {{"e", e}, {"D_m * e", lhs}};
      if (lhs.lo > mf || (lhs.is_exact() && lhs.lo == mf)) {
        rep.verdict = Verdict::proved;
      } else if (lhs.hi < mf) {
        rep.verdict = Verdict::refuted;
      }
      rep.note = "m = " + std::to_string(m) + ", decided through an enclosure of e";
      return rep;
    });
  }
  auto rep = make_report("chain.derangement_link", m + 2);
  // m!/e - D_m = sum_{k>m} (-1)^k m!/k!, an alternating tail with decreasing
  // terms whose first term is (-1)^(m+1)/(m+1); its sign is (-1)^(m+1).
  rep.verdict = (m % 2 == 0) ? Verdict::proved : Verdict::refuted;
  rep.note = "m = " + std::to_string(m) + ", sign of m!/e - D_m is (-1)^(m+1)";
  if (m % 2 == 1) {
    rep.note += "; odd m gives D_m < m!/e, so m! - D_m = ceil((1-1/e) m!) exceeds (1-1/e) m! by less than 1/(m+1)";
  }
  return rep;
}

CertificateSet check_final_chain(unsigned n, const Limits& limits) {
  CertificateSet set;
  set.n = n;
  if (n < 500) {
    set.claims = hypothesis_not_met(n, {"chain.ratio_half", "chain.layer_sum_ratio", "chain.layer_sum_direct",
                                        "chain.star_case", "chain.triangle_case", "chain.linear",
                                        "chain.derangement_link", "chain.triangle_case_exact"});
    return set;
  }
  const BigInt& f2 = factorial(n - 2);
  const BigInt& f3 = factorial(n - 3);
  const BigInt& f4 = factorial(n - 4);
  const BigInt target = BigInt(n - 3) * f3;  // (n-3)(n-3)!
  const BigInt layer_bound = 54 * f3;

  set.claims.push_back(refine(limits, [&](unsigned bits) {
    auto rep = make_report("chain.ratio_half", n);
    const Enclosure q = q_enclosure(n, bits);
    const Enclosure e = euler_enclosure(bits);
    const Enclosure v = e * (q + Enclosure::exact(1)) / (Enclosure::exact(Rational(n)) - q);
    rep.enclosures = {{"q", q}, {"e", e}, {"e(q+1)/(n-q)", v}};
    rep.verdict = at_most(v, Rational(1, 2));
    return rep;
  }));
  const Verdict ratio_half = set.claims.back().verdict;

  // The layer sum runs over integer i in [3, floor(q)].
  std::optional<unsigned> qfloor;
  Enclosure q_used;
  for (unsigned bits = 64; bits <= std::max(64U, limits.precision_cap); bits *= 2) {
    q_used = q_enclosure(n, bits);
    if (auto f = decided_floor(q_used)) {
      qfloor = static_cast<unsigned>(*f);
      break;
    }
  }

  auto ratio_rep = make_report("chain.layer_sum_ratio", n);
  auto direct_rep = make_report("chain.layer_sum_direct", n);
  ratio_rep.enclosures = direct_rep.enclosures = {{"q", q_used}};
  if (qfloor) {
    const unsigned top = *qfloor;
    BigInt sum = 0;
    for (unsigned i = 3; i <= top; ++i) sum += ipow(i, i) * factorial(n - i);
    direct_rep.verdict = exact_verdict(sum <= layer_bound);
    direct_rep.note = "exact sum over i = 3.." + std::to_string(top);

    if (ratio_half == Verdict::proved) {
      // Consecutive terms shrink by (1+1/i)^i (i+1)/(n-i) <= e(q+1)/(n-q) <= 1/2,
      // so the sum is below 27 (n-3)! * 2.
      const Enclosure e = euler_enclosure(128);
      bool steps = true;
      for (unsigned i = 3; i < top; ++i) {
        const Rational growth = ratio(ipow(i + 1, i), ipow(i, i));
        steps = steps && growth < e.lo && Rational(i) < q_used.lo;
      }
      ratio_rep.verdict = steps ? Verdict::proved : Verdict::undecided;
      ratio_rep.note = "each consecutive ratio certified below e(q+1)/(n-q) <= 1/2 for i = 3.." +
                       std::to_string(top - 1) + "; geometric sum below 2 * 27 (n-3)!";
    } else {
      ratio_rep.note = "ratio route needs chain.ratio_half";
    }
    ratio_rep.precision = direct_rep.precision = 128;
    if (ratio_rep.verdict != Verdict::undecided && direct_rep.verdict != Verdict::undecided &&
        ratio_rep.verdict != direct_rep.verdict) {
      throw InvariantViolation("layer-sum bound: ratio and direct routes disagree at n = " + std::to_string(n));
    }
  } else {
    direct_rep.note = ratio_rep.note = "floor(q) undecided at the precision cap";
  }
  set.claims.push_back(std::move(ratio_rep));
  set.claims.push_back(std::move(direct_rep));

  {
    auto rep = make_report("chain.star_case", n);
    rep.verdict = exact_verdict(layer_bound + f4 < target);
    rep.note = "exact integers";
    set.claims.push_back(std::move(rep));
  }

  set.claims.push_back(refine(limits, [&](unsigned bits) {
    auto rep = make_report("chain.triangle_case", n);
    const Enclosure e = euler_enclosure(bits);
    const Enclosure one_minus = Enclosure::exact(1) - Enclosure::exact(1) / e;
    const Enclosure lhs =
        one_minus * Enclosure::exact(Rational(f2)) + Enclosure::exact(Rational(layer_bound + f4));
    rep.enclosures = {{"1-1/e", one_minus}};
    rep.verdict = below(lhs, Rational(target));
    return rep;
  }));

  set.claims.push_back(refine(limits, [&](unsigned bits) {
    auto rep = make_report("chain.linear", n);
    const Enclosure e = euler_enclosure(bits);
    const Enclosure one_minus = Enclosure::exact(1) - Enclosure::exact(1) / e;
    const Enclosure lhs = one_minus * Enclosure::exact(Rational(n - 2)) + Enclosure::exact(55);
    rep.enclosures = {{"1-1/e", one_minus}, {"(1-1/e)(n-2)+55", lhs}};
    rep.verdict = below(lhs, Rational(n - 3));
    return rep;
  }));

  set.claims.push_back(check_derangement_link(n - 2, limits));

  {
    auto rep = make_report("chain.triangle_case_exact", n);
    const BigInt through = f2 - derangement_big(n - 2);
    rep.verdict = exact_verdict(through + layer_bound + f4 < target);
    rep.note = "exact integers with D_{n-2} from the recurrence";
    set.claims.push_back(std::move(rep));
  }
  return set;
}

SpreadLemmaBound spread_lemma_bound(const Rational& r, const Rational& delta, const Rational& m, unsigned k,
                                    unsigned precision) {
  if (delta <= 0 || delta >= 1) throw InputError("spread lemma needs 0 < delta < 1");
  if (r <= 0 || m <= 0) throw InputError("spread lemma needs r > 0 and m > 0");
  SpreadLemmaBound out;
  if (k == 0) {
    out.value = Enclosure::exact(1);
    return out;
  }
  const Rational rd = r * delta;
  if (rd <= 1) {
    out.vacuous = true;
    out.note = "r*delta <= 1: log2(r*delta) is not positive";
    return out;
  }
  const Enclosure h = entropy_enclosure(delta, precision);
  const Enclosure l = log2_enclosure(rd, precision);
  const Enclosure base = (Enclosure::exact(1) + h) / l;
  Enclosure powered;
  if (mp::denominator(m) == 1) {
    powered = widen_to_dyadic(pow(widen_to_dyadic(base, precision + 16), static_cast<unsigned>(mp::numerator(m))),
                              precision + 16);
  } else {
    powered = exp2_enclosure(Enclosure::exact(m) * log2_enclosure(base, precision + 16), precision + 16);
  }
  out.value = Enclosure::exact(1) - Enclosure::exact(Rational(k)) * powered;
  if (rd <= 2) {
    out.vacuous = true;
    out.note = "r*delta <= 2: the base (1+H)/log2(r*delta) is at least 1";
  } else if (out.value->hi <= 0) {
    out.vacuous = true;
    out.note = "bound is not positive";
  }
  return out;
}

}  // namespace permdiv
