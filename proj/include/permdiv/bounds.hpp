#pragma once

// Exact rational enclosures of the real quantities the diversity proof
// relies on, and certificates for each numeric inequality it uses.
//
// Every enclosure [lo, hi] is a pair of exact rationals (mostly dyadic) that
// provably contains the real value. A verdict of proved/refuted is only ever
// issued when the enclosures of the two sides are strictly separated (or both
// sides are exact); otherwise the precision is doubled up to a cap and the
// verdict is undecided.

#include <boost/multiprecision/gmp.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "permdiv/config.hpp"

namespace permdiv {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// "a/b" or "a". Throws InputError on anything else (decimals included).
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

Rational floor_to_dyadic(const Rational& x, unsigned bits);
Rational ceil_to_dyadic(const Rational& x, unsigned bits);
BigInt floor_of(const Rational& x);
BigInt ceil_of(const Rational& x);

struct Enclosure {
  Rational lo;
  Rational hi;

  static Enclosure exact(const Rational& v) { return {v, v}; }

  bool is_exact() const { return lo == hi; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  bool contains(const Enclosure& o) const { return lo <= o.lo && o.hi <= hi; }
  Rational width() const { return hi - lo; }
};

Enclosure operator+(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a);
Enclosure operator*(const Enclosure& a, const Enclosure& b);
/// Throws InputError when b contains zero.
Enclosure operator/(const Enclosure& a, const Enclosure& b);
Enclosure pow(const Enclosure& a, unsigned k);
/// Rounds both endpoints outward to multiples of 2^-bits.
Enclosure widen_to_dyadic(const Enclosure& a, unsigned bits);

/// log2 x by argument reduction to [1, 2) and bit-by-bit squaring, width at
/// most 2^-precision. Powers of two come back exact. Throws InputError for x <= 0.
Enclosure log2_enclosure(const Rational& x, unsigned precision);
/// log2 over an enclosure (monotone): [log2(lo).lo, log2(hi).hi].
Enclosure log2_enclosure(const Enclosure& x, unsigned precision);

/// Binary entropy H(d) = -d log2 d - (1-d) log2 (1-d) for 0 < d < 1, width at
/// most 2^(2-precision).
Enclosure entropy_enclosure(const Rational& delta, unsigned precision);
/// H over an enclosure of d inside (0, 1), using monotonicity on each side of 1/2.
Enclosure entropy_enclosure(const Enclosure& delta, unsigned precision);

/// e from the partial sums of 1/k! with the tail bound 2/(N+1)!, width at
/// most 2^-precision.
Enclosure euler_enclosure(unsigned precision);
/// ln 2 = sum 1/(k 2^k).
Enclosure ln2_enclosure(unsigned precision);
/// 2^x over an enclosure of x.
Enclosure exp2_enclosure(const Enclosure& x, unsigned precision);
/// sqrt of a non-negative rational, width at most 2^-precision.
Enclosure sqrt_enclosure(const Rational& x, unsigned precision);

/// n! exactly, memoized and safe to call concurrently. n <= 100000.
const BigInt& factorial(unsigned n);
/// D_m exactly by the recurrence, for arbitrary m.
BigInt derangement_big(unsigned m);

/// floor((m! + 1)/e) decided through an enclosure of e, refining up to
/// `precision_cap` bits. Empty when still undecided at the cap.
std::optional<BigInt> derangement_floor_via_e(unsigned m, unsigned precision_cap);

/// 4 log2 n as an enclosure at the given precision.
Enclosure q_enclosure(unsigned n, unsigned precision);

/// A real number known through enclosures of any requested precision.
class CertifiedReal {
 public:
  using Evaluator = std::function<Enclosure(unsigned bits)>;

  CertifiedReal(std::string description, Evaluator eval)
      : description_(std::move(description)), eval_(std::move(eval)) {}
  static CertifiedReal exact(const Rational& v);
  /// 4 log2 n, the default branch-size cap of the decomposition.
  static CertifiedReal four_log2(unsigned n);

  Enclosure at(unsigned bits) const { return eval_(bits); }
  const std::string& description() const { return description_; }

 private:
  std::string description_;
  Evaluator eval_;
};

enum class Order { less, equal, greater, undecided };

struct Comparison {
  Order order = Order::undecided;
  Enclosure enclosure;
  unsigned bits = 0;
};

/// Compares x against a rational, doubling precision from 64 bits up to `cap`.
/// `equal` only when the enclosure collapses onto c.
Comparison compare(const CertifiedReal& x, const Rational& c, unsigned cap);

enum class Verdict { proved, refuted, undecided };
std::string to_string(Verdict v);

struct NamedEnclosure {
  std::string name;
  Enclosure value;
};

struct CertificateReport {
  std::string claim;
  unsigned n = 0;
  Verdict verdict = Verdict::undecided;
  std::vector<NamedEnclosure> enclosures;
  unsigned precision = 0;
  std::string note;
};

struct CertificateSet {
  unsigned n = 0;
  std::vector<CertificateReport> claims;

  /// proved iff every claim is proved; refuted if any is refuted.
  Verdict overall() const;
  const CertificateReport* find(const std::string& claim) const;
};

/// The auxiliary inequalities behind the spread approximation, with r = n/3,
/// delta = 1/(2 log2(2n)), q = 4 log2 n, f(x) = r^x (n-x)!:
///   fact22.entropy         H(delta) <= 0.288
///   fact22.r_threshold     r >= 2^(2(1+H(delta)))/delta
///   fact22.ratio_identity  f(i+1)/f(i) = n/(3(n-i)) at integer i
///   fact22.f_at_q          f(ceil q) <= (n-4)! through the chain of links
///   fact22.f_at_n          f(n) <= n^-4 n! <= (n-4)!
/// n < 500 yields undecided reports noting the unmet hypothesis.
CertificateSet check_fact22(unsigned n, const Limits& limits = {});

/// The closing inequality chain of the diversity bound:
///   chain.ratio_half          e(q+1)/(n-q) <= 1/2
///   chain.layer_sum_ratio     sum_{3<=i<=q} i^i (n-i)! <= 54 (n-3)! by ratio telescoping
///   chain.layer_sum_direct    the same sum, exact big-integer summation
///   chain.star_case           54(n-3)! + (n-4)! < (n-3)(n-3)!
///   chain.triangle_case       (1-1/e)(n-2)! + 54(n-3)! + (n-4)! < (n-3)(n-3)!
///   chain.linear              (1-1/e)(n-2) + 55 < n-3
///   chain.derangement_link    (n-2)! - D_{n-2} <= (1-1/e)(n-2)!
///   chain.triangle_case_exact ((n-2)! - D_{n-2}) + 54(n-3)! + (n-4)! < (n-3)(n-3)!
/// Throws InvariantViolation if the two layer-sum routes disagree.
CertificateSet check_final_chain(unsigned n, const Limits& limits = {});

/// m! - D_m <= (1 - 1/e) m!, i.e. D_m >= m!/e. Decided through an enclosure
/// of e for m <= 20 and by the alternating-tail sign of m!/e - D_m beyond.
CertificateReport check_derangement_link(unsigned m, const Limits& limits = {});

struct SpreadLemmaBound {
  /// Enclosure of 1 - ((1+H(delta))/log2(r delta))^m k; empty when r delta <= 1.
  std::optional<Enclosure> value;
  bool vacuous = false;
  std::string note;
};

SpreadLemmaBound spread_lemma_bound(const Rational& r, const Rational& delta, const Rational& m,
                                    unsigned k, unsigned precision = 128);

}  // namespace permdiv
