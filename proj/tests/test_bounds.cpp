#include <boost/multiprecision/mpfr.hpp>
#include <random>

#include "doctest.h"
#include "permdiv/bounds.hpp"
#include "permdiv/core.hpp"
#include "permdiv/errors.hpp"

using namespace permdiv;
namespace mp = boost::multiprecision;

namespace {

// Independent 300-bit MPFR evaluation, used only as an oracle.
using Real = mp::number<mp::mpfr_float_backend<100>>;  // 100 decimal digits ~ 332 bits

Real to_real(const Rational& q) {
  return Real(mp::numerator(q).str()) / Real(mp::denominator(q).str());
}

bool encloses(const Enclosure& enc, const Real& v) { return to_real(enc.lo) <= v && v <= to_real(enc.hi); }

Real oracle_entropy(const Real& d) { return -d * mp::log2(d) - (1 - d) * mp::log2(1 - d); }

Rational random_positive(std::mt19937_64& rng) {
  const auto num = std::uniform_int_distribution<long>(1, 1'000'000'000)(rng);
  const auto den = std::uniform_int_distribution<long>(1, 1'000'000)(rng);
  return Rational(num) / Rational(den);
}

Rational random_unit(std::mt19937_64& rng) {
  const auto den = std::uniform_int_distribution<long>(2, 1'000'000)(rng);
  const auto num = std::uniform_int_distribution<long>(1, den - 1)(rng);
  return Rational(num) / Rational(den);
}

Rational pow2_neg(unsigned k) { return Rational(1) / Rational(BigInt(1) << k); }

}  // namespace

TEST_CASE("parse_rational") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("-2/4") == Rational(-1, 2));
  CHECK_THROWS_AS(parse_rational("0.5"), InputError);
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("a/b"), InputError);
  CHECK(to_string(Rational(10, 4)) == "5/2");
}

TEST_CASE("log2 enclosure") {
  CHECK(log2_enclosure(Rational(8), 40).is_exact());
  CHECK(log2_enclosure(Rational(8), 40).lo == 3);
  CHECK(log2_enclosure(Rational(1), 40).lo == 0);
  CHECK(log2_enclosure(Rational(1, 4), 40).lo == -2);
  CHECK_THROWS_AS(log2_enclosure(Rational(0), 10), InputError);
  CHECK_THROWS_AS(log2_enclosure(Rational(-3), 10), InputError);

  const Enclosure l10 = log2_enclosure(Rational(10), 40);
  CHECK(l10.width() <= pow2_neg(40));
  CHECK(encloses(l10, mp::log2(Real(10))));
  // log2 100 = 2 log2 10: the two enclosures must overlap after scaling.
  const Enclosure l100 = log2_enclosure(Rational(100), 40);
  const Enclosure twice = Enclosure::exact(2) * l10;
  CHECK(l100.lo <= twice.hi);
  CHECK(twice.lo <= l100.hi);
}

TEST_CASE("log2 enclosure against the high-precision oracle, with nested refinement") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const Rational x = random_positive(rng);
    const Real truth = mp::log2(to_real(x));
    Enclosure prev = log2_enclosure(x, 8);
    CHECK(encloses(prev, truth));
    for (unsigned p : {16U, 32U, 64U, 128U}) {
      const Enclosure cur = log2_enclosure(x, p);
      CHECK(encloses(cur, truth));
      CHECK(cur.width() <= pow2_neg(p));
      CHECK(prev.contains(cur));
      prev = cur;
    }
  }
}

TEST_CASE("widths halve per added precision bit") {
  const Rational x(7, 3);
  for (unsigned p = 10; p < 60; ++p) {
    CHECK(log2_enclosure(x, p + 1).width() * 2 <= log2_enclosure(x, p).width());
  }
}

TEST_CASE("entropy enclosure") {
  const Enclosure half = entropy_enclosure(Rational(1, 2), 32);
  CHECK(half.is_exact());
  CHECK(half.lo == 1);
  CHECK_THROWS_AS(entropy_enclosure(Rational(0), 10), InputError);
  CHECK_THROWS_AS(entropy_enclosure(Rational(1), 10), InputError);

  // H(1/4) = 2 - (3/4) log2 3
  const Enclosure h = entropy_enclosure(Rational(1, 4), 60);
  const Enclosure identity = Enclosure::exact(2) - Enclosure::exact(Rational(3, 4)) * log2_enclosure(Rational(3), 60);
  CHECK(h.lo <= identity.hi);
  CHECK(identity.lo <= h.hi);
  CHECK(h.width() <= Rational(4) * pow2_neg(60));

  // delta = 1/(2 log2 1000), itself only known through an enclosure.
  const Enclosure l = log2_enclosure(Rational(1000), 80);
  const Enclosure delta = Enclosure::exact(1) / (Enclosure::exact(2) * l);
  const Enclosure hd = entropy_enclosure(delta, 80);
  CHECK(hd.hi <= Rational(288, 1000));
  CHECK(encloses(hd, oracle_entropy(1 / (2 * mp::log2(Real(1000))))));

  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const Rational d = random_unit(rng);
    const Enclosure enc = entropy_enclosure(d, 64);
    CHECK(encloses(enc, oracle_entropy(to_real(d))));
    CHECK(enc.width() <= Rational(4) * pow2_neg(64));
  }
}

TEST_CASE("euler enclosure") {
  const Enclosure low = euler_enclosure(8);
  CHECK(low.lo >= Rational(27, 10));
  CHECK(low.hi <= Rational(272, 100));
  for (unsigned p : {8U, 32U, 64U, 256U, 512U}) {
    const Enclosure e = euler_enclosure(p);
    CHECK(e.width() <= pow2_neg(p));
    CHECK(encloses(e, mp::exp(Real(1))));
  }
}

TEST_CASE("exp2, ln2 and sqrt enclosures against the oracle") {
  CHECK(encloses(ln2_enclosure(100), mp::log(Real(2))));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Rational x = random_positive(rng) / 100000 - 50;
    const Enclosure e = exp2_enclosure(Enclosure::exact(x), 64);
    CHECK(encloses(e, mp::pow(Real(2), to_real(x))));
    CHECK(e.width() <= (e.hi + 1) * pow2_neg(56));
    const Rational y = random_positive(rng);
    const Enclosure s = sqrt_enclosure(y, 64);
    CHECK(encloses(s, mp::sqrt(to_real(y))));
    CHECK(s.width() <= pow2_neg(64));
  }
  CHECK(exp2_enclosure(Enclosure::exact(5), 10).is_exact());
  CHECK(sqrt_enclosure(Rational(9, 4), 10).is_exact());
}

TEST_CASE("derangement floor identity through e") {
  CHECK(derangement_floor_via_e(4, 512) == BigInt(9));
  CHECK(derangement_floor_via_e(1, 512) == BigInt(0));
  for (unsigned m = 1; m <= 20; ++m) {
    const auto d = derangement_floor_via_e(m, 512);
    REQUIRE(d.has_value());
    CHECK(*d == BigInt(derangement_count(static_cast<int>(m))));
    CHECK(*d == derangement_big(m));
  }
}

TEST_CASE("derangement link follows the parity of m") {
  // Below 20 the verdict comes from the enclosure of e; it must match the
  // alternating-tail sign rule used beyond 20.
  for (unsigned m = 1; m <= 20; ++m) {
    const auto rep = check_derangement_link(m);
    CHECK(rep.verdict == (m % 2 == 0 ? Verdict::proved : Verdict::refuted));
  }
  CHECK(check_derangement_link(498).verdict == Verdict::proved);
  CHECK(check_derangement_link(499).verdict == Verdict::refuted);
}

TEST_CASE("factorial cache") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(10) == 3628800);
  CHECK(factorial(25) == BigInt("15511210043330985984000000"));
  CHECK(factorial(20) * 21 == factorial(21));
  CHECK_THROWS_AS(factorial(100001), InputError);
}

TEST_CASE("compare decides against integers and reports undecided at equality") {
  const auto q = CertifiedReal::four_log2(500);
  CHECK(compare(q, Rational(36), 512).order == Order::less);
  CHECK(compare(q, Rational(35), 512).order == Order::greater);
  CHECK(compare(CertifiedReal::four_log2(16), Rational(16), 512).order == Order::equal);
  CHECK(compare(CertifiedReal::exact(Rational(1, 3)), Rational(1, 3), 512).order == Order::equal);
}

TEST_CASE("check_fact22") {
  for (unsigned n : {500U, 1000U}) {
    const auto set = check_fact22(n);
    for (const auto& c : set.claims) {
      INFO(c.claim << " n=" << n << " " << c.note);
      CHECK(c.verdict == Verdict::proved);
    }
    CHECK(set.overall() == Verdict::proved);
    CHECK(set.claims.size() == 5);
  }
  const auto low = check_fact22(499);
  CHECK(low.overall() == Verdict::undecided);
  for (const auto& c : low.claims) CHECK(c.note.find("hypothesis") != std::string::npos);
}

TEST_CASE("check_final_chain at n = 500") {
  const auto set = check_final_chain(500);
  for (const auto& c : set.claims) {
    INFO(c.claim << " " << c.note);
    CHECK(c.verdict == Verdict::proved);
  }
  REQUIRE(set.find("chain.layer_sum_direct") != nullptr);
  CHECK(set.find("chain.layer_sum_direct")->verdict == set.find("chain.layer_sum_ratio")->verdict);
  CHECK(check_final_chain(499).overall() == Verdict::undecided);
}

TEST_CASE("check_final_chain refutes only the derangement link at odd n") {
  const auto set = check_final_chain(501);
  for (const auto& c : set.claims) {
    INFO(c.claim);
    CHECK(c.verdict == (c.claim == "chain.derangement_link" ? Verdict::refuted : Verdict::proved));
  }
}

TEST_CASE("certificates are monotone in precision") {
  Limits low;
  low.precision_cap = 64;
  Limits high;
  high.precision_cap = 1024;
  const auto a = check_final_chain(510, low);
  const auto b = check_final_chain(510, high);
  REQUIRE(a.claims.size() == b.claims.size());
  for (std::size_t i = 0; i < a.claims.size(); ++i) {
    if (a.claims[i].verdict != Verdict::undecided) CHECK(a.claims[i].verdict == b.claims[i].verdict);
  }
}

TEST_CASE("spread lemma bound") {
  const auto vac = spread_lemma_bound(Rational(4), Rational(1, 2), Rational(3), 5);
  CHECK(vac.vacuous);
  const auto k0 = spread_lemma_bound(Rational(64), Rational(1, 8), Rational(8), 0);
  REQUIRE(k0.value);
  CHECK(k0.value->is_exact());
  CHECK(k0.value->lo == 1);
  const auto neg = spread_lemma_bound(Rational(2), Rational(1, 4), Rational(2), 4);
  CHECK(neg.vacuous);
  CHECK_FALSE(neg.value.has_value());

  const auto good = spread_lemma_bound(Rational(64), Rational(1, 8), Rational(8), 6, 200);
  REQUIRE(good.value);
  CHECK_FALSE(good.vacuous);
  CHECK(good.value->lo > 0);
  const Real d = Real(1) / 8;
  const Real oracle = 1 - mp::pow((1 + oracle_entropy(d)) / mp::log2(Real(64) * d), 8) * 6;
  CHECK(encloses(*good.value, oracle));

  // Non-integer exponent goes through exp2.
  const auto frac = spread_lemma_bound(Rational(64), Rational(1, 8), Rational(15, 2), 6, 100);
  REQUIRE(frac.value);
  const Real oracle2 = 1 - mp::pow((1 + oracle_entropy(d)) / mp::log2(Real(64) * d), Real(15) / 2) * 6;
  CHECK(encloses(*frac.value, oracle2));

  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Rational delta = random_unit(rng);
    const Rational r = (3 + random_positive(rng) / 1000) / delta;
    const Rational m(static_cast<long>(1 + rng() % 12), static_cast<long>(1 + rng() % 3));
    const unsigned k = 1 + static_cast<unsigned>(rng() % 10);
    const auto b = spread_lemma_bound(r, delta, m, k, 96);
    REQUIRE(b.value);
    const Real rd = to_real(r * delta);
    const Real truth = 1 - mp::pow((1 + oracle_entropy(to_real(delta))) / mp::log2(rd), to_real(m)) * k;
    CHECK(encloses(*b.value, truth));
  }
}
