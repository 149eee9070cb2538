#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kamnf/hamiltonian.hpp"
#include "kamnf/lemmas.hpp"
#include "kamnf/serialize.hpp"

using namespace kamnf;

namespace {

Monomial mono(std::initializer_list<std::pair<Mode, int>> a,
              std::initializer_list<std::pair<Mode, int>> k,
              std::initializer_list<std::pair<Mode, int>> kp, std::vector<Mode> j = {}) {
    Monomial m;
    for (auto [n, e] : a) m.a.add(n, e);
    for (auto [n, e] : k) m.k.add(n, e);
    for (auto [n, e] : kp) m.kp.add(n, e);
    m.jfactors = std::move(j);
    return m;
}

Hamiltonian random_plain(std::mt19937_64& rng, int mode_cap, int degree_cap, int terms) {
    Hamiltonian h(mode_cap, degree_cap + 4);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int i = 0; i < terms; ++i) {
        const Monomial m = random_monomial(rng, mode_cap, degree_cap);
        h.add(m, cplx{static_cast<real_t>(coeff(rng)), static_cast<real_t>(coeff(rng))});
    }
    return h;
}

std::vector<cplx> random_point(std::mt19937_64& rng, int cap, double r, double theta) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<cplx> q(static_cast<std::size_t>(2 * cap + 1));
    for (Mode n = -cap; n <= cap; ++n) {
        const double amp = unit(rng) * std::exp(-r * weight_pow(n, theta));
        const double phi = 2.0 * M_PI * unit(rng);
        q[static_cast<std::size_t>(n + cap)] =
            cplx{static_cast<real_t>(amp * std::cos(phi)),
                 static_cast<real_t>(amp * std::sin(phi))};
    }
    return q;
}

}  // namespace

TEST_CASE("norm: diagonal quadratic has unit weight") {
    Hamiltonian h(4, 10);
    h.add(mono({}, {{2, 1}}, {{2, 1}}), cplx{1, 0});
    CHECK(norm(h, {0.7, 3.1, 0.5}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm(Hamiltonian(4, 10), {0.7, 3.1, 0.5}) == 0.0);
}

TEST_CASE("norm: frozen worked value") {
    Hamiltonian h(4, 10);
    h.add(mono({}, {{1, 1}, {2, 1}, {3, 1}}, {{1, 1}, {2, 1}, {3, 1}}), cplx{1, 0});
    // exponent 0.1*(2(1+sqrt2+sqrt3) - 2 sqrt3) = 0.2(1+sqrt2)
    const double expected = std::exp(-0.2 * (1.0 + std::sqrt(2.0)));
    CHECK(norm(h, {0.1, 5.0, 0.5}) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(norm(h, {0.1, 5.0, 0.5}) == doctest::Approx(0.61701).epsilon(1e-4));
}

TEST_CASE("norm rejects classed input") {
    Hamiltonian h(4, 10);
    h.add(mono({}, {}, {}, {2}), cplx{1, 0});
    CHECK_THROWS_AS(norm(h, {0.1, 1.0, 0.5}), MixedClassInput);
}

TEST_CASE("plus norm: class-1 weight includes the J mode") {
    Hamiltonian h(4, 10);
    h.add(mono({}, {}, {}, {2}), cplx{1, 0});
    const PlusNorm p = plus_norm(h, {0.1, 7.0, 0.5});
    CHECK(p.r0 == 0.0);
    CHECK(p.r2 == 0.0);
    // weight e^{rho(2|2|^{1/2} - 0)}: empty support contributes n1* = 0
    CHECK(p.r1 == doctest::Approx(std::exp(-0.2 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(p.r1 == doctest::Approx(0.753638).epsilon(1e-5));
    CHECK(p.max == p.r1);
}

TEST_CASE("plus norm of a plain Hamiltonian reduces to the norm") {
    std::mt19937_64 rng(3);
    const Hamiltonian h = random_plain(rng, 4, 8, 40);
    const NormWeights w{0.07, 1.3, 0.5};
    const PlusNorm p = plus_norm(h, w);
    CHECK(p.r1 == 0.0);
    CHECK(p.r2 == 0.0);
    CHECK(p.max == doctest::Approx(norm(h, w)).epsilon(1e-14));
}

TEST_CASE("norms are absolutely homogeneous and monotone under removal") {
    std::mt19937_64 rng(5);
    Hamiltonian h = random_plain(rng, 4, 8, 30);
    const NormWeights w{0.05, 2.0, 0.5};
    const double base = norm(h, w);
    Hamiltonian scaled = h;
    scaled *= cplx{0, static_cast<real_t>(-2.5)};  // |c| = 2.5
    CHECK(norm(scaled, w) == doctest::Approx(2.5 * base).epsilon(1e-13));

    Hamiltonian smaller(h.mode_cap(), h.degree_cap());
    std::size_t kept = 0;
    for (const auto& [m, c] : h.terms())
        if (kept++ % 2 == 0) smaller.add(m, c);
    CHECK(norm(smaller, w) <= base + 1e-15);
}

TEST_CASE("split: I1 regroups into a frozen part plus J1") {
    Hamiltonian h(3, 8);
    h.add(mono({}, {{1, 1}}, {{1, 1}}), cplx{1, 0});
    const Hamiltonian s = split(h);
    CHECK(s.n_terms() == 2);
    CHECK(s.coeff(mono({{1, 1}}, {}, {})) == cplx{1, 0});
    CHECK(s.coeff(mono({}, {}, {}, {1})) == cplx{1, 0});
}

TEST_CASE("split: I1^2 regroups with binomial weights") {
    Hamiltonian h(3, 8);
    h.add(mono({}, {{1, 2}}, {{1, 2}}), cplx{1, 0});
    const Hamiltonian s = split(h);
    CHECK(s.n_terms() == 3);
    CHECK(s.coeff(mono({{1, 2}}, {}, {})) == cplx{1, 0});
    CHECK(s.coeff(mono({{1, 1}}, {}, {}, {1})) == cplx{2, 0});
    CHECK(s.coeff(mono({}, {}, {}, {1, 1})) == cplx{1, 0});
}

TEST_CASE("split: I1 I2 cross terms follow the m1 < m2 family") {
    Hamiltonian h(3, 8);
    h.add(mono({}, {{1, 1}, {2, 1}}, {{1, 1}, {2, 1}}), cplx{1, 0});
    const Hamiltonian s = split(h);
    CHECK(s.n_terms() == 4);
    CHECK(s.coeff(mono({{1, 1}, {2, 1}}, {}, {})) == cplx{1, 0});
    CHECK(s.coeff(mono({{2, 1}}, {}, {}, {1})) == cplx{1, 0});
    CHECK(s.coeff(mono({{1, 1}}, {}, {}, {2})) == cplx{1, 0});
    CHECK(s.coeff(mono({}, {}, {}, {1, 2})) == cplx{1, 0});

    // numeric equality on phase space
    std::mt19937_64 rng(17);
    const TorusSpec I0 = TorusSpec::standard(1.0, 0.5, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto q = random_point(rng, 3, 1.0, 0.5);
        const cplx before = eval(h, q, 3, I0);
        const cplx after = eval(s, q, 3, I0);
        CHECK(std::abs(before - after) <=
              1e-12 * std::max<double>(1.0, std::abs(before)));
    }
}

TEST_CASE("split output satisfies the class constraints") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Hamiltonian h = random_plain(rng, 4, 8, 20);
        const Hamiltonian s = split(h);
        for (const auto& [m, c] : s.terms()) {
            CHECK(m.cls() <= 2);
            CHECK(m.class_constraint_ok());
        }
    }
}

TEST_CASE("expand_j: single J and the J1 J2 product") {
    Hamiltonian h(3, 8);
    h.add(mono({}, {}, {}, {1}), cplx{1, 0});
    const Hamiltonian plain = expand_j(h);
    CHECK(plain.n_terms() == 2);
    CHECK(plain.coeff(mono({}, {{1, 1}}, {{1, 1}})) == cplx{1, 0});
    CHECK(plain.coeff(mono({{1, 1}}, {}, {})) == cplx{-1, 0});

    Hamiltonian h2(3, 8);
    h2.add(mono({}, {}, {}, {1, 2}), cplx{1, 0});
    const Hamiltonian p2 = expand_j(h2);
    CHECK(p2.n_terms() == 4);
    CHECK(p2.coeff(mono({}, {{1, 1}, {2, 1}}, {{1, 1}, {2, 1}})) == cplx{1, 0});
    CHECK(p2.coeff(mono({{2, 1}}, {{1, 1}}, {{1, 1}})) == cplx{-1, 0});
    CHECK(p2.coeff(mono({{1, 1}}, {{2, 1}}, {{2, 1}})) == cplx{-1, 0});
    CHECK(p2.coeff(mono({{1, 1}, {2, 1}}, {}, {})) == cplx{1, 0});
}

TEST_CASE("split then expand_j is the identity on coefficient maps") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const Hamiltonian h = random_plain(rng, 4, 6, 25);
        Hamiltonian back = expand_j(split(h));
        // difference of coefficient maps
        back *= cplx{-1, 0};
        back += h;
        double worst = 0;
        for (const auto& [m, c] : back.terms()) worst = std::max(worst, (double)std::abs(c));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("evaluation agrees before and after split at decaying points") {
    std::mt19937_64 rng(31);
    const TorusSpec I0 = TorusSpec::standard(1.0, 0.5, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const Hamiltonian h = random_plain(rng, 4, 8, 30);
        const Hamiltonian s = split(h);
        for (int p = 0; p < 5; ++p) {
            const auto q = random_point(rng, 4, 1.0, 0.5);
            const cplx a = eval(h, q, 4, I0);
            const cplx b = eval(s, q, 4, I0);
            CHECK(std::abs(a - b) <= 1e-12 * std::max<double>(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("resonant projection partitions exactly") {
    Hamiltonian h(3, 8);
    h.add(mono({{1, 2}}, {}, {}), cplx{3, 0});
    ResonantSplit rs = resonant_project(h);
    CHECK(rs.res.n_terms() == 1);
    CHECK(rs.nonres.empty());

    Hamiltonian h2(3, 8);
    h2.add(mono({}, {{1, 1}}, {{2, 1}}), cplx{1, 0});
    rs = resonant_project(h2);
    CHECK(rs.res.empty());
    CHECK(rs.nonres.n_terms() == 1);

    std::mt19937_64 rng(37);
    Hamiltonian mixed = random_plain(rng, 3, 6, 30);
    mixed.add(mono({{2, 1}}, {}, {}), cplx{0.5, 0.1});
    const Hamiltonian class0 = split(mixed).class_part(0);
    rs = resonant_project(class0);
    Hamiltonian sum = rs.res;
    sum += rs.nonres;
    CHECK(sum == class0);

    Hamiltonian bad(3, 8);
    bad.add(mono({}, {}, {}, {1, 2}), cplx{1, 0});
    CHECK_THROWS_AS(resonant_project(bad), MixedClassInput);
}

TEST_CASE("reality survives split and expand_j") {
    std::mt19937_64 rng(41);
    Hamiltonian h(4, 10);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const Monomial m = random_monomial(rng, 4, 6);
        const cplx c{static_cast<real_t>(coeff(rng)), static_cast<real_t>(coeff(rng))};
        h.add(m, c);
        h.add(m.conjugate(), std::conj(c));
    }
    CHECK(h.reality_defect() <= 1e-12);
    CHECK(split(h).reality_defect() <= 1e-12);
    CHECK(expand_j(split(h)).reality_defect() <= 1e-12);
}

TEST_CASE("pruning feeds the tail ledger") {
    Hamiltonian h(3, 8);
    h.add(mono({}, {{1, 1}}, {{2, 1}}), cplx{static_cast<real_t>(1e-40), 0});
    h.add(mono({}, {{1, 1}}, {{1, 1}}), cplx{1, 0});
    const auto dropped = h.prune(1e-30, {0.05, 2.0, 0.5});
    CHECK(h.n_terms() == 1);
    CHECK(dropped[0] > 0);
    CHECK(dropped[1] == 0.0);
}

TEST_CASE("serialization round trip is bit exact") {
    std::mt19937_64 rng(43);
    Hamiltonian h = random_plain(rng, 4, 12, 25);
    h.add(mono({{1, 1}}, {}, {}, {2}), cplx{static_cast<real_t>(0.1234567890123456789),
                                            static_cast<real_t>(-3.9999999999999e-17)});
    const std::string text = hamiltonian_to_json(h);
    const Hamiltonian back = hamiltonian_from_json(text);
    REQUIRE(back.n_terms() == h.n_terms());
    for (const auto& [m, c] : h.terms()) CHECK(back.coeff(m) == c);
    CHECK(hamiltonian_to_json(back) == text);
}

TEST_CASE("caps are hard: out-of-range insertions throw") {
    Hamiltonian h(2, 4);
    CHECK_THROWS_AS(h.add(mono({}, {{3, 1}}, {}), cplx{1, 0}), ModeOutOfRange);
    CHECK_THROWS_AS(h.add(mono({}, {{1, 3}}, {{1, 2}}), cplx{1, 0}), DegreeOverflow);
}
