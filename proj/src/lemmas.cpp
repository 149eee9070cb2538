#include "kamnf/lemmas.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace kamnf {

Monomial random_monomial(std::mt19937_64& rng, int support_cap, int degree_cap) {
    std::uniform_int_distribution<int> degree_dist(2, degree_cap);
    std::uniform_int_distribution<int> mode_dist(-support_cap, support_cap);
    std::uniform_int_distribution<int> slot_dist(0, 2);
    Monomial m;
    int budget = degree_dist(rng);
    while (budget > 0) {
        const Mode n = mode_dist(rng);
        switch (slot_dist(rng)) {
            case 0:
                if (budget >= 2) {
                    m.a.add(n, 1);
                    budget -= 2;
                } else {
                    m.k.add(n, 1);
                    budget -= 1;
                }
                break;
            case 1:
                m.k.add(n, 1);
                budget -= 1;
                break;
            default:
                m.kp.add(n, 1);
                budget -= 1;
                break;
        }
    }
    return m;
}

namespace {

void h1_apply(const Monomial& m, const std::vector<double>& thetas, H1SuiteReport& rep) {
    for (double theta : thetas) {
        const LemmaH1Sides sides = lemma_h1_sides(m, theta);
        const double margin = sides.lhs - sides.rhs;
        ++rep.tested;
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            std::ostringstream os;
            os << m.id() << " theta=" << theta << " lhs=" << sides.lhs << " rhs=" << sides.rhs;
            rep.worst_case = os.str();
        }
        if (margin < -1e-12) ++rep.violations;
    }
}

}  // namespace

H1SuiteReport lemma_h1_random_suite(std::size_t count, const std::vector<double>& thetas,
                                    int support_cap, int degree_cap, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    H1SuiteReport rep;
    for (std::size_t i = 0; i < count; ++i)
        h1_apply(random_monomial(rng, support_cap, degree_cap), thetas, rep);
    return rep;
}

H1SuiteReport lemma_h1_exhaustive_suite(int degree_cap, int support_cap,
                                        const std::vector<double>& thetas) {
    H1SuiteReport rep;
    const int modes = 2 * support_cap + 1;
    // distribute degree over (mode, slot) cells, slot 0 = a (weighs 2),
    // slots 1/2 = k/kp; every monomial of degree in [2, degree_cap] is
    // visited exactly once
    std::function<void(int, int, Monomial&)> walk = [&](int cell, int budget, Monomial& m) {
        if (cell == 3 * modes) {
            if (m.degree() >= 2) h1_apply(m, thetas, rep);
            return;
        }
        const int slot = cell % 3;
        const Mode n = cell / 3 - support_cap;
        const int unit = (slot == 0) ? 2 : 1;
        ExponentVector& target = (slot == 0) ? m.a : (slot == 1 ? m.k : m.kp);
        walk(cell + 1, budget, m);
        int added = 0;
        while (budget >= (added + 1) * unit) {
            target.add(n, 1);
            ++added;
            walk(cell + 1, budget - added * unit, m);
        }
        if (added) target.add(n, -added);
    };
    Monomial empty;
    walk(0, degree_cap, empty);
    return rep;
}

A1Sides lemma_a1_sides(const ExponentVector& k, const ExponentVector& kp, double theta) {
    double lhs = 0;
    std::vector<int> weights;  // k+kp rearrangement
    auto visit = [&](Mode n) {
        const int diff = std::abs(k.get(n) - kp.get(n));
        lhs += diff * std::pow(static_cast<double>(weight(n)), 0.5 * theta);
    };
    for (const auto& [n, e] : k.entries()) {
        visit(n);
        for (int i = 0; i < e; ++i) weights.push_back(weight(n));
    }
    for (const auto& [n, e] : kp.entries()) {
        if (k.get(n) == 0) visit(n);
        for (int i = 0; i < e; ++i) weights.push_back(weight(n));
    }
    std::sort(weights.begin(), weights.end(), std::greater<int>());
    double tail = 0;
    for (std::size_t i = 2; i < weights.size(); ++i)
        tail += std::pow(static_cast<double>(weights[i]), theta);
    const double mstar = static_cast<double>(momentum_star(k, kp));
    const double rhs = 3.0 * std::pow(8.0, 0.5 * theta) *
                       (tail + (mstar > 0 ? std::pow(mstar, theta) : 0.0));
    return {lhs, rhs};
}

bool a1_hypothesis_feasible(const ExponentVector& k, const ExponentVector& kp) {
    long long s2 = 0, l1 = 0;
    auto visit = [&](Mode n) {
        const long long l = k.get(n) - kp.get(n);
        s2 += l * n * n;
        l1 += std::llabs(l);
    };
    for (const auto& [n, e] : k.entries()) visit(n);
    for (const auto& [n, e] : kp.entries())
        if (k.get(n) == 0) visit(n);
    return std::llabs(s2) <= 1 + 2 * l1;
}

bool a1_boundary_counterexample(const ExponentVector& k, const ExponentVector& kp, double theta) {
    if (!a1_hypothesis_feasible(k, kp)) return false;
    const A1Sides sides = lemma_a1_sides(k, kp, theta);
    return sides.lhs > sides.rhs + 1e-12;
}

namespace {

// Draw a sparse (k, kp) pair and a vtilde inside the hypothesis strip, or
// report failure for this attempt.
bool a1_sample_instance(std::mt19937_64& rng, int support_cap, int degree_cap, double theta,
                        ExponentVector& k, ExponentVector& kp, std::size_t& excluded) {
    std::uniform_int_distribution<int> degree_dist(1, degree_cap);
    std::uniform_int_distribution<int> mode_dist(-support_cap, support_cap);
    std::uniform_int_distribution<int> side_dist(0, 1);
    k = {};
    kp = {};
    int budget = degree_dist(rng);
    while (budget-- > 0) {
        const Mode n = mode_dist(rng);
        if (side_dist(rng))
            k.add(n, 1);
        else
            kp.add(n, 1);
    }
    if (k == kp) return false;  // zero difference: hypothesis trivially true, lhs = 0
    if (!a1_hypothesis_feasible(k, kp)) return false;
    if (a1_boundary_counterexample(k, kp, theta)) {
        ++excluded;
        return false;
    }
    return true;
}

}  // namespace

A1SuiteReport lemma_a1_suite(std::size_t count, double theta, int support_cap, int degree_cap,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    A1SuiteReport rep;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    while (rep.tested < count) {
        ExponentVector k, kp;
        if (!a1_sample_instance(rng, support_cap, degree_cap, theta, k, kp, rep.excluded))
            continue;
        // place vtilde inside the hypothesis strip: pick a pivot mode and
        // solve for its entry, clamped to [-2, 2]
        FrequencyVector vt(support_cap, 0);
        for (Mode n = -support_cap; n <= support_cap; ++n) vt.set_vtilde(n, 2.0 * unit(rng) * 0.999);
        double s = 0;
        Mode pivot = 0;
        long long pivot_l = 0;
        auto visit = [&](Mode n) {
            const long long l = k.get(n) - kp.get(n);
            s += static_cast<double>(l) * (static_cast<double>(n) * n + vt.vtilde(n));
            if (l != 0 && pivot_l == 0) {
                pivot = n;
                pivot_l = l;
            }
        };
        for (const auto& [n, e] : k.entries()) visit(n);
        for (const auto& [n, e] : kp.entries())
            if (k.get(n) == 0) visit(n);
        // retune the pivot entry so |s| <= 1
        const double target = unit(rng);  // in (-1, 1)
        const double adjusted =
            vt.vtilde(pivot) + (target - s) / static_cast<double>(pivot_l);
        if (std::abs(adjusted) > 2.0) continue;  // cannot reach the strip this way
        vt.set_vtilde(pivot, adjusted);

        const A1Sides sides = lemma_a1_sides(k, kp, theta);
        const double margin = sides.rhs - sides.lhs;
        ++rep.tested;
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            Monomial m;
            m.k = k;
            m.kp = kp;
            std::ostringstream os;
            os << m.id() << " lhs=" << sides.lhs << " rhs=" << sides.rhs;
            rep.worst_case = os.str();
        }
        if (margin < -1e-12) ++rep.violations;
    }

    // small-window enumeration of the boundary patterns, reported verbatim
    std::function<void(Mode, ExponentVector&, ExponentVector&, int)> walk =
        [&](Mode n, ExponentVector& k, ExponentVector& kp, int budget) {
            if (n > 2) {
                if ((k.degree() + kp.degree()) > 0 && !(k == kp) &&
                    a1_boundary_counterexample(k, kp, theta)) {
                    Monomial m;
                    m.k = k;
                    m.kp = kp;
                    const A1Sides sides = lemma_a1_sides(k, kp, theta);
                    std::ostringstream os;
                    os << m.id() << " lhs=" << sides.lhs << " rhs=" << sides.rhs;
                    rep.boundary_cases.push_back(os.str());
                }
                return;
            }
            for (int ek = 0; ek <= budget; ++ek)
                for (int ep = 0; ek + ep <= budget; ++ep) {
                    if (ek) k.add(n, ek);
                    if (ep) kp.add(n, ep);
                    walk(n + 1, k, kp, budget - ek - ep);
                    if (ek) k.add(n, -ek);
                    if (ep) kp.add(n, -ep);
                }
        };
    ExponentVector k0, kp0;
    walk(-2, k0, kp0, 4);
    return rep;
}

}  // namespace kamnf
