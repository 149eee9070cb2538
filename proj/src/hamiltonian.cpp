#include "kamnf/hamiltonian.hpp"

#include <cmath>

namespace kamnf {

double log_norm_weight(const Monomial& m, const NormWeights& w) {
    double sum = 0;
    int n1 = 0;
    auto absorb = [&](const ExponentVector& v, int factor) {
        for (const auto& [n, e] : v.entries()) {
            sum += factor * e * weight_pow(n, w.theta);
            n1 = std::max(n1, weight(n));
        }
    };
    absorb(m.a, 2);
    absorb(m.k, 1);
    absorb(m.kp, 1);
    double jsum = 0;
    for (Mode j : m.jfactors) jsum += weight_pow(j, w.theta);
    const double mstar = static_cast<double>(momentum_star(m));
    const double mterm = mstar > 0 ? std::pow(mstar, w.theta) : 0.0;
    return w.rho * (sum + 2.0 * jsum - 2.0 * std::pow(static_cast<double>(n1), w.theta)) -
           w.mu * mterm;
}

void Hamiltonian::add(Monomial m, cplx coeff) {
    if (coeff == cplx{0, 0}) return;
    if (m.jfactors.size() > 2)
        throw Error("monomial with " + std::to_string(m.jfactors.size()) + " J factors");
    m.sort_jfactors();
    if (m.max_abs_mode() > mode_cap_)
        throw ModeOutOfRange("mode " + std::to_string(m.max_abs_mode()) + " beyond cap " +
                             std::to_string(mode_cap_) + " in " + m.id());
    if (m.degree() > degree_cap_)
        throw DegreeOverflow("degree " + std::to_string(m.degree()) + " beyond cap " +
                             std::to_string(degree_cap_) + " in " + m.id());
    auto [it, inserted] = terms_.try_emplace(std::move(m), coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == cplx{0, 0}) terms_.erase(it);
    }
}

Hamiltonian& Hamiltonian::operator+=(const Hamiltonian& other) {
    for (const auto& [m, c] : other.terms_) add(m, c);
    return *this;
}

Hamiltonian& Hamiltonian::operator*=(cplx scalar) {
    if (scalar == cplx{0, 0}) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= scalar;
    return *this;
}

Hamiltonian Hamiltonian::class_part(int cls) const {
    Hamiltonian h(mode_cap_, degree_cap_);
    for (const auto& [m, c] : terms_)
        if (m.cls() == cls) h.add(m, c);
    return h;
}

bool Hamiltonian::has_jfactors() const {
    for (const auto& [m, c] : terms_)
        if (m.cls() > 0) return true;
    return false;
}

std::array<double, 3> Hamiltonian::prune(double drop_tol, const NormWeights& w) {
    std::array<double, 3> dropped{0, 0, 0};
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < drop_tol) {
            dropped[static_cast<std::size_t>(it->first.cls())] +=
                static_cast<double>(std::abs(it->second)) *
                std::exp(-log_norm_weight(it->first, w));
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return dropped;
}

double Hamiltonian::reality_defect() const {
    double worst = 0;
    for (const auto& [m, c] : terms_) {
        const cplx mate = coeff(m.conjugate());
        worst = std::max(worst, static_cast<double>(std::abs(c - std::conj(mate))));
    }
    return worst;
}

double Hamiltonian::coeff_mass() const {
    double s = 0;
    for (const auto& [m, c] : terms_) s += static_cast<double>(std::abs(c));
    return s;
}

double norm(const Hamiltonian& h, const NormWeights& w) {
    double sup = 0;
    for (const auto& [m, c] : h.terms()) {
        if (m.cls() != 0)
            throw MixedClassInput("norm needs a plain Hamiltonian, found J factors in " + m.id());
        sup = std::max(sup,
                       static_cast<double>(std::abs(c)) * std::exp(-log_norm_weight(m, w)));
    }
    return sup;
}

PlusNorm plus_norm(const Hamiltonian& h, const NormWeights& w) {
    PlusNorm p;
    for (const auto& [m, c] : h.terms()) {
        const double v = static_cast<double>(std::abs(c)) * std::exp(-log_norm_weight(m, w));
        switch (m.cls()) {
            case 0: p.r0 = std::max(p.r0, v); break;
            case 1: p.r1 = std::max(p.r1, v); break;
            default: p.r2 = std::max(p.r2, v); break;
        }
    }
    p.max = std::max({p.r0, p.r1, p.r2});
    return p;
}

namespace {

// Emits the telescoped expansion of prod_m (I_m(0) + J_m)^{b_m} times the
// residual monomial (a, l, lp), capped at two J factors; live leftovers go
// back into k and kp symmetrically.
void split_term(const Monomial& base, cplx coeff, const ExponentVector& b, Hamiltonian& out) {
    const auto& bm = b.entries();

    {  // family (i): everything frozen
        Monomial m{base.a + b, base.k, base.kp, {}};
        out.add(std::move(m), coeff);
    }

    // family (ii): exactly one J_m, all other shared actions frozen
    for (const auto& [mode, exp] : bm) {
        ExponentVector a = base.a + b;
        a.add(mode, -1);
        Monomial m{std::move(a), base.k, base.kp, {mode}};
        out.add(std::move(m), coeff * static_cast<real_t>(exp));
    }

    // family (iii): J_m^2 at one mode, modes below frozen, above live
    for (std::size_t i = 0; i < bm.size(); ++i) {
        const auto [mode, exp] = bm[i];
        if (exp < 2) continue;
        for (int r = 0; r <= exp - 2; ++r) {
            ExponentVector a = base.a;
            ExponentVector live;
            for (std::size_t t = 0; t < i; ++t) a.add(bm[t].first, bm[t].second);
            a.add(mode, r);
            live.add(mode, exp - r - 2);
            for (std::size_t t = i + 1; t < bm.size(); ++t) live.add(bm[t].first, bm[t].second);
            Monomial m{std::move(a), base.k + live, base.kp + live, {mode, mode}};
            out.add(std::move(m), coeff);
        }
    }

    // family (iv): J_{m1} J_{m2}, m1 < m2; between the two everything frozen,
    // beyond m2 live
    for (std::size_t i = 0; i < bm.size(); ++i) {
        const auto [m1, e1] = bm[i];
        for (std::size_t j = i + 1; j < bm.size(); ++j) {
            const auto [m2, e2] = bm[j];
            for (int r = 0; r <= e2 - 1; ++r) {
                ExponentVector a = base.a;
                ExponentVector live;
                for (std::size_t t = 0; t < i; ++t) a.add(bm[t].first, bm[t].second);
                a.add(m1, e1 - 1);
                for (std::size_t t = i + 1; t < j; ++t) a.add(bm[t].first, bm[t].second);
                a.add(m2, r);
                live.add(m2, e2 - 1 - r);
                for (std::size_t t = j + 1; t < bm.size(); ++t)
                    live.add(bm[t].first, bm[t].second);
                Monomial m{std::move(a), base.k + live, base.kp + live, {m1, m2}};
                out.add(std::move(m), coeff * static_cast<real_t>(e1));
            }
        }
    }
}

}  // namespace

Hamiltonian split(const Hamiltonian& plain) {
    Hamiltonian out(plain.mode_cap(), plain.degree_cap());
    for (const auto& [m, c] : plain.terms()) {
        if (m.cls() != 0)
            throw MixedClassInput("split expects plain input, found J factors in " + m.id());
        ExponentVector b = min(m.k, m.kp);
        if (b.empty()) {
            out.add(m, c);
            continue;
        }
        Monomial base{m.a, m.k - b, m.kp - b, {}};
        split_term(base, c, b, out);
    }
    return out;
}

Hamiltonian expand_j(const Hamiltonian& classed) {
    Hamiltonian out(classed.mode_cap(), classed.degree_cap());
    for (const auto& [m, c] : classed.terms()) {
        // each J_m contributes q_m qbar_m (keep) minus a frozen I_m(0)
        const std::size_t nj = m.jfactors.size();
        for (std::size_t mask = 0; mask < (1u << nj); ++mask) {
            Monomial t{m.a, m.k, m.kp, {}};
            int sign = 1;
            for (std::size_t bit = 0; bit < nj; ++bit) {
                const Mode mode = m.jfactors[bit];
                if (mask & (1u << bit)) {
                    t.a.add(mode, 1);
                    sign = -sign;
                } else {
                    t.k.add(mode, 1);
                    t.kp.add(mode, 1);
                }
            }
            out.add(std::move(t), c * static_cast<real_t>(sign));
        }
    }
    return out;
}

ResonantSplit resonant_project(const Hamiltonian& h) {
    ResonantSplit rs{Hamiltonian(h.mode_cap(), h.degree_cap()),
                     Hamiltonian(h.mode_cap(), h.degree_cap())};
    for (const auto& [m, c] : h.terms()) {
        if (m.cls() > 1)
            throw MixedClassInput("resonant_project expects classes 0/1, got class 2 in " +
                                  m.id());
        if (m.k.empty() && m.kp.empty())
            rs.res.add(m, c);
        else
            rs.nonres.add(m, c);
    }
    return rs;
}

Hamiltonian normal_as_hamiltonian(const NormalForm& nf, int mode_cap, int degree_cap) {
    Hamiltonian h(mode_cap, degree_cap);
    for (Mode n = -mode_cap; n <= mode_cap; ++n) {
        Monomial m;
        m.k.add(n, 1);
        m.kp.add(n, 1);
        h.add(std::move(m), cplx{static_cast<real_t>(nf.freq.omega(n)), 0});
    }
    return h;
}

namespace {

cplx ipow(cplx base, int e) {
    cplx r{1, 0};
    while (e-- > 0) r *= base;
    return r;
}

}  // namespace

cplx eval_holo(const Hamiltonian& h, const std::vector<cplx>& q, const std::vector<cplx>& qbar,
               int point_cap, const TorusSpec& I0) {
    auto at = [point_cap](const std::vector<cplx>& v, Mode n) -> cplx {
        if (std::abs(n) > point_cap) return {0, 0};
        return v[static_cast<std::size_t>(n + point_cap)];
    };
    cplx total{0, 0};
    for (const auto& [m, c] : h.terms()) {
        cplx prod = c;
        for (const auto& [n, e] : m.a.entries())
            prod *= ipow(cplx{static_cast<real_t>(I0.action(n)), 0}, e);
        for (const auto& [n, e] : m.k.entries()) prod *= ipow(at(q, n), e);
        for (const auto& [n, e] : m.kp.entries()) prod *= ipow(at(qbar, n), e);
        for (Mode j : m.jfactors)
            prod *= at(q, j) * at(qbar, j) - cplx{static_cast<real_t>(I0.action(j)), 0};
        total += prod;
    }
    return total;
}

cplx eval(const Hamiltonian& h, const std::vector<cplx>& q, int point_cap, const TorusSpec& I0) {
    std::vector<cplx> qbar(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) qbar[i] = std::conj(q[i]);
    return eval_holo(h, q, qbar, point_cap, I0);
}

}  // namespace kamnf
