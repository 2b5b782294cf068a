#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ltforge/frobenius_lift.hpp"

using namespace ltforge;

namespace {

const std::vector<std::string> kPresets = {"Q2", "Q3", "Q2_unr2", "Q3_unr2", "Q2_ram2"};

FqSeries monomials(Field F, int K, std::initializer_list<int> exps) {
  FqSeries s = FqSeries::zero(FqElement::zero(F), K);
  for (int e : exps) s[e] += FqElement::one(F);
  return s;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidSpec;
}

int determined_digits(Field F, int K) {
  int r = 1;
  for (std::uint64_t t = F->q(); t < static_cast<std::uint64_t>(K - 1) + 1 && t <= static_cast<std::uint64_t>(K - 1); t *= F->q()) ++r;
  return r;
}

}  // namespace

TEST_CASE("frobenius on lifts") {
  Rng rng(5);
  for (const auto& name : kPresets) {
    Field F = preset(name);
    LTModule M(F, Coordinate::Polynomial, 6);
    const int K = 24;
    LiftSeries Z(0, OFSeries::variable(OFElement::zero(F, 6), K));
    CHECK(lift_phi_q(M, Z).series() == M.pi_series(K));
    const OFElement c = OFElement::random(F, 6, rng);
    CHECK(lift_phi_q(M, LiftSeries(2, OFSeries::constant(c, K))).series() == OFSeries::constant(c, K));
    for (int t = 0; t < 10; ++t) {
      OFSeries s = OFSeries::zero(OFElement::zero(F, 6), K);
      for (int i = 0; i < K; ++i) s[i] = OFElement::random(F, 6, rng);
      LiftSeries x(static_cast<int>(rng.below(3)), s);
      const LiftSeries fx = lift_phi_q(M, x);
      CHECK(fx.reduction() == phi_q(x.reduction()));
      const OFElement b = OFElement::random(F, 6, rng);
      OFSeries s2 = OFSeries::zero(OFElement::zero(F, 6), K);
      for (int i = 0; i < K; ++i) s2[i] = OFElement::random(F, 6, rng);
      OFSeries comb = s2;
      for (int i = 0; i < K; ++i) comb[i] = b * s[i] + s2[i];
      OFSeries lin = lift_phi_q(M, LiftSeries(0, s2)).series();
      const OFSeries fs = lift_phi_q(M, LiftSeries(0, s)).series();
      for (int i = 0; i < K; ++i) lin[i] += b * fs[i];
      CHECK(lift_phi_q(M, LiftSeries(0, comb)).series() == lin);
    }
    CHECK(lift_series_from_json(F, to_json(Z)).series() == Z.series());
  }
}

TEST_CASE("colmez lift of Y") {
  for (const auto& name : kPresets) {
    Field F = preset(name);
    LTModule M(F, Coordinate::Polynomial, 8);
    const LiftSeries x = colmez_lift(M, PerfSeries::variable(F, 0, 64), 8, 64);
    CHECK(x.depth() == 0);
    CHECK(x.series() == OFSeries::variable(OFElement::zero(F, 8), 64));
    CHECK(satisfies_frobenius_equation(M, x));
  }
}

TEST_CASE("colmez lift of [a] at depth") {
  Rng rng(77);
  for (const auto& name : kPresets) {
    for (Coordinate c : {Coordinate::Polynomial, Coordinate::SpecialLog}) {
      Field F = preset(name);
      CAPTURE(name);
      LTModule M(F, c, 8);
      const int N = 8, K = 64;
      const std::uint64_t q = F->q();
      for (int t = 0; t < 6; ++t) {
        const OFElement a = OFElement::random_unit(F, M.input_precision(K), rng);
        const int n = static_cast<int>(rng.below(4));
        const OFSeries A = M.a_series(a, K);
        const PerfSeries u(n, reduce_mod_pi(A));
        const LiftSeries x = colmez_lift(M, u, N, K);
        CHECK(x.depth() == n);
        CHECK(x.reduction() == u);
        CHECK(satisfies_frobenius_equation(M, x));
        CHECK(x.agrees_with(LiftSeries(n, A)));
        int expect = K;
        for (int j = 0; j < N; ++j) {
          CHECK(x.digit_orders()[static_cast<std::size_t>(j)] == expect);
          expect = std::max(1, static_cast<int>((static_cast<std::uint64_t>(expect) + q - 1) / q));
        }
        // another lift of u: random higher digits
        OFSeries init = A;
        for (int i = 1; i < K; ++i) init[i] += OFElement::random(F, N, rng).mul_pi(1);
        const LiftSeries y = colmez_lift(M, u, N, K, init);
        CHECK(y.agrees_with(x));
        // equivariance transport: [g] o x = x o [g]
        const OFElement g = OFElement::random_unit(F, M.input_precision(K), rng);
        const OFSeries G = M.a_series(g, K);
        CHECK(LiftSeries(n, compose(G, x.series()), x.digit_orders()).agrees_with(LiftSeries(n, compose(x.series(), G), x.digit_orders())));
      }
    }
  }
}

TEST_CASE("colmez lift errors") {
  Field F = preset("Q3");
  LTModule M(F, Coordinate::Polynomial, 8);
  CHECK(kind_of([&] { colmez_lift(M, PerfSeries(0, monomials(F, 16, {0, 1})), 8, 16); }) == ErrorKind::ValuationZero);
  CHECK(kind_of([&] { colmez_lift(M, PerfSeries::variable(F, 0, 16), 8, 32); }) == ErrorKind::BudgetExceeded);
  CHECK(kind_of([&] { colmez_lift(M, PerfSeries::variable(F, 60, 16), 8, 16); }) == ErrorKind::BudgetExceeded);
  CHECK(kind_of([&] { colmez_lift(M, PerfSeries::variable(F, 0, 16), 9, 16); }) == ErrorKind::PrecisionExhausted);
}

TEST_CASE("non-equivariant inputs raise the depth") {
  Field F = preset("Q2");
  LTModule M(F, Coordinate::Polynomial, 6);
  const PerfSeries u(0, monomials(F, 32, {1, 2}));
  const LiftSeries x = colmez_lift(M, u, 6, 32);
  CHECK(x.depth() >= 1);
  CHECK(x.depth() <= 6);
  CHECK(x.reduction() == u);
  CHECK(satisfies_frobenius_equation(M, x));
}

TEST_CASE("equivariance") {
  Rng rng(8);
  for (const auto& name : kPresets) {
    Field F = preset(name);
    CAPTURE(name);
    LTModule M(F, Coordinate::Polynomial, 8);
    const int K = 48;
    const auto gens = default_generators(M, 8, K);
    CHECK(gens.size() == 3);
    CHECK(check_equivariance(M, PerfSeries::variable(F, 0, K), gens));
    const OFElement a = OFElement::random_unit(F, 8, rng);
    CHECK(check_equivariance(M, PerfSeries(2, M.reduced_endomorphism(a, K)), gens));
    if (!F->is_qp()) {
      const auto rep = equivariance_report(M, PerfSeries(0, monomials(F, K, {1, 2})), gens);
      CHECK_FALSE(rep.equivariant);
      REQUIRE(rep.failing.has_value());
      CHECK(rep.first_mismatch >= 2);
    }
  }
}

TEST_CASE("separable power") {
  Rng rng(2);
  for (const auto& name : kPresets) {
    Field F = preset(name);
    LTModule M(F, Coordinate::Polynomial, 8);
    auto r0 = pm_normalize(PerfSeries::variable(F, 0, 16));
    CHECK(r0.m == 0);
    CHECK(r0.f == monomials(F, 16, {1}));
    const FqSeries w = M.reduced_endomorphism(OFElement::random_unit(F, 8, rng), 32);
    for (int n = 0; n < 4; ++n) {
      auto r = pm_normalize(PerfSeries(n, w));
      CHECK(r.m == static_cast<std::int64_t>(n) * F->d());
      CHECK(r.f == w);
      CHECK(is_separable(r.f));
    }
    const int p = static_cast<int>(F->p());
    FqSeries s = FqSeries::zero(FqElement::zero(F), 40);
    const FqElement c = FqElement::random(F, rng) + FqElement::one(F);
    s[p] = FqElement::one(F);
    s[2 * p] = c;
    auto r = pm_normalize(PerfSeries(0, s));
    CHECK(r.m == -1);
    CHECK(r.f[1].is_one());
    CHECK(r.f[2] == c.frobenius(-1));
    CHECK(r.f[2].frobenius(1) == c);
    CHECK(is_separable(r.f));
    CHECK(kind_of([&] { pm_normalize(PerfSeries(0, FqSeries::zero(FqElement::zero(F), 8))); }) == ErrorKind::NoSeparablePower);
  }
}

TEST_CASE("recovering a") {
  Rng rng(31);
  for (const auto& name : kPresets) {
    Field F = preset(name);
    CAPTURE(name);
    LTModule M(F, Coordinate::Polynomial, 8);
    const int N = 8, K = 64;
    const Recovery one = recover_a(M, PerfSeries::variable(F, 0, K), N);
    CHECK(one.a.is_one());
    CHECK(one.depth == 0);
    const int r = std::min(N, determined_digits(F, K));
    for (int t = 0; t < 5; ++t) {
      const OFElement a = OFElement::random_unit(F, 8, rng);
      const int n = static_cast<int>(rng.below(4));
      const Recovery rec = recover_a(M, PerfSeries(n, M.reduced_endomorphism(a, K)), N);
      CHECK(rec.depth == n);
      CHECK(rec.a.precision() == r);
      CHECK(rec.a == a.with_precision(r));
      CHECK(rec.verified_order == K);
      CHECK(rec.degree.weierstrass_degree == 1);
      CHECK(rec.generators_checked.size() == 3);
      const auto j = to_json(rec);
      CHECK(j.at("depth") == n);
      CHECK(j.at("precision") == r);
    }
    CHECK(kind_of([&] { recover_a(M, PerfSeries(0, monomials(F, K, {2})), N); }) == ErrorKind::WrongValuation);
    const FqSeries w = M.reduced_endomorphism(OFElement::random_unit(F, 8, rng), K);
    CHECK(kind_of([&] { recover_a(M, PerfSeries(0, w + monomials(F, K, {3})), N); }) == ErrorKind::NotEquivariant);
  }
}

TEST_CASE("recovering a to full precision needs q^N terms") {
  Rng rng(4);
  for (const auto& name : {"Q2", "Q2_ram2"}) {
    Field F = preset(name);
    LTModule M(F, Coordinate::Polynomial, 8);
    const int K = 129;
    const OFElement a = OFElement::random_unit(F, 8, rng);
    const Recovery rec = recover_a(M, PerfSeries(1, M.reduced_endomorphism(a, K)), 8);
    CHECK(rec.a == a);
  }
}
