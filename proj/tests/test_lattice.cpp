#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kamnf/lattice.hpp"
#include "kamnf/lemmas.hpp"

using namespace kamnf;

TEST_CASE("weight convention") {
    CHECK(weight(0) == 1);
    CHECK(weight(1) == 1);
    CHECK(weight(-1) == 1);
    CHECK(weight(-3) == 3);
    CHECK(weight(7) == 7);
}

TEST_CASE("momentum uses the signed mode value") {
    ExponentVector k{{1, 1}};
    CHECK(momentum(k, {}) == 1);

    ExponentVector k2{{1, 1}, {3, 1}, {6, 1}};
    ExponentVector kp2{{2, 1}, {4, 1}, {5, 1}};
    CHECK(momentum(k2, kp2) == -1);  // n1-n2+n3-n4+n5-n6 = -n with n = 1
    CHECK(momentum_star(k2, kp2) == 1);

    ExponentVector k3{{2, 3}};
    ExponentVector kp3{{-1, 2}};
    CHECK(momentum(k3, kp3) == 8);

    ExponentVector k4{{5, 1}};
    ExponentVector kp4{{2, 1}, {3, 1}};
    CHECK(momentum_star(k4, kp4) == 0);

    CHECK(momentum_star(ExponentVector{}, ExponentVector{}) == 0);
}

TEST_CASE("momentum is additive under monomial product") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Monomial m1 = random_monomial(rng, 6, 8);
        const Monomial m2 = random_monomial(rng, 6, 8);
        CHECK(momentum(m1.k + m2.k, m1.kp + m2.kp) == momentum(m1) + momentum(m2));
    }
}

TEST_CASE("rearrangement collects 2a+k+kp copies, weights sorted") {
    Monomial m;
    m.k.add(5, 1);
    m.kp.add(2, 1);
    m.kp.add(3, 1);
    const RearrangementView v = rearrangement(m);
    CHECK(v.nstars == std::vector<int>{5, 3, 2});
    CHECK(v.n1_star == 5);

    Monomial m2;
    m2.a.add(2, 1);
    CHECK(rearrangement(m2).nstars == std::vector<int>{2, 2});

    Monomial m3;
    m3.k.add(0, 1);
    m3.kp.add(0, 1);
    CHECK(rearrangement(m3).nstars == std::vector<int>{1, 1});

    // J-factor modes are not part of the rearrangement
    Monomial m4 = m3;
    m4.jfactors = {7};
    CHECK(rearrangement(m4).nstars == std::vector<int>{1, 1});
}

TEST_CASE("rearrangement length equals the total multiplicity") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Monomial m = random_monomial(rng, 8, 12);
        const RearrangementView v = rearrangement(m);
        CHECK(static_cast<int>(v.nstars.size()) ==
              2 * m.a.degree() + m.k.degree() + m.kp.degree());
        CHECK(std::is_sorted(v.nstars.begin(), v.nstars.end(), std::greater<int>()));
    }
}

TEST_CASE("weighted rearrangement inequality, worked values") {
    Monomial m;
    m.k.add(5, 1);
    m.kp.add(2, 1);
    m.kp.add(3, 1);
    const LemmaH1Sides sides = lemma_h1_sides(m, 0.5);
    CHECK(sides.lhs == doctest::Approx(0.91019).epsilon(2e-4));
    CHECK(sides.rhs == doctest::Approx(0.82843).epsilon(2e-4));
    CHECK(sides.lhs >= sides.rhs);

    Monomial diag;
    diag.k.add(3, 1);
    diag.kp.add(3, 1);
    const LemmaH1Sides d = lemma_h1_sides(diag, 0.5);
    CHECK(d.lhs == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(d.rhs == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("degenerate monomials are rejected") {
    Monomial m;
    m.k.add(1, 1);
    CHECK_THROWS_AS(lemma_h1_sides(m, 0.5), DegenerateMonomial);
}

TEST_CASE("randomized rearrangement inequality sweep") {
    const H1SuiteReport rep = lemma_h1_random_suite(2000, {0.3, 0.5, 0.8}, 8, 12, 20240817);
    CHECK(rep.violations == 0);
    CHECK(rep.min_margin >= -1e-12);
}

TEST_CASE("exponent vector arithmetic is exact and canonical") {
    ExponentVector v;
    v.add(3, 2);
    v.add(-1, 1);
    v.add(3, -2);  // entry disappears
    CHECK(v.get(3) == 0);
    CHECK(v.degree() == 1);
    CHECK(v.support_size() == 1);
    CHECK_THROWS_AS(v.add(5, -1), Error);

    ExponentVector a{{1, 2}, {4, 1}};
    ExponentVector b{{1, 1}, {2, 5}};
    CHECK(min(a, b).get(1) == 1);
    CHECK(min(a, b).get(2) == 0);
    CHECK((a + b).get(1) == 3);
    CHECK((a - ExponentVector{{1, 2}}).get(1) == 0);
    CHECK(!a.disjoint_support(b));
    CHECK(a.disjoint_support(ExponentVector{{7, 1}}));
}
