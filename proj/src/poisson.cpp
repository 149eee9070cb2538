#include "kamnf/poisson.hpp"

#include <cmath>
#include <tuple>

namespace kamnf {

namespace {

// Per-term data reused across all pairings in one bracket call.
struct TermView {
    const Monomial* m;
    cplx coeff;
    int degree;
    long long mom;
    double theta_sum;  // sum (2a+k+kp) |n|^theta at the ledger theta
    // merged q-support: (mode, k_e, kp_e) with k_e + kp_e > 0
    std::vector<std::tuple<Mode, int, int>> qsupp;
    // full support with rearrangement multiplicity 2a+k+kp, sorted by mode
    std::vector<std::pair<Mode, int>> supp;
};

std::vector<TermView> make_views(const Hamiltonian& h, double theta, const char* who) {
    std::vector<TermView> views;
    views.reserve(h.n_terms());
    for (const auto& [m, c] : h.terms()) {
        if (m.cls() != 0)
            throw MixedClassInput(std::string(who) +
                                  " requires plain input, found J factors in " + m.id());
        TermView v;
        v.m = &m;
        v.coeff = c;
        v.degree = m.degree();
        v.mom = momentum(m);
        v.theta_sum = 0;
        auto bump = [&v](Mode n, int mult) {
            if (!v.supp.empty() && v.supp.back().first == n)
                v.supp.back().second += mult;
            else
                v.supp.push_back({n, mult});
        };
        // a, k, kp are individually sorted; merge in mode order
        auto ai = m.a.entries().begin(), ae = m.a.entries().end();
        auto ki = m.k.entries().begin(), ke = m.k.entries().end();
        auto pi = m.kp.entries().begin(), pe = m.kp.entries().end();
        while (ai != ae || ki != ke || pi != pe) {
            Mode n = std::numeric_limits<Mode>::max();
            if (ai != ae) n = std::min(n, ai->first);
            if (ki != ke) n = std::min(n, ki->first);
            if (pi != pe) n = std::min(n, pi->first);
            int twoa = 0, kk = 0, pp = 0;
            if (ai != ae && ai->first == n) twoa = 2 * (ai++)->second;
            if (ki != ke && ki->first == n) kk = (ki++)->second;
            if (pi != pe && pi->first == n) pp = (pi++)->second;
            bump(n, twoa + kk + pp);
            if (kk + pp > 0) v.qsupp.push_back({n, kk, pp});
            v.theta_sum += (twoa + kk + pp) * weight_pow(n, theta);
        }
        views.push_back(std::move(v));
    }
    return views;
}

// Largest weight in the merged support after removing one q and one qbar
// power at mode j (needed to value capped outputs exactly).
int merged_n1_after(const TermView& t1, const TermView& t2, Mode j) {
    int n1 = 0;
    auto i1 = t1.supp.begin();
    auto i2 = t2.supp.begin();
    while (i1 != t1.supp.end() || i2 != t2.supp.end()) {
        Mode n;
        int mult = 0;
        if (i2 == t2.supp.end() || (i1 != t1.supp.end() && i1->first < i2->first)) {
            n = i1->first;
            mult = (i1++)->second;
        } else if (i1 == t1.supp.end() || i2->first < i1->first) {
            n = i2->first;
            mult = (i2++)->second;
        } else {
            n = i1->first;
            mult = (i1++)->second + (i2++)->second;
        }
        if (n == j) mult -= 2;
        if (mult > 0) n1 = std::max(n1, weight(n));
    }
    return n1;
}

}  // namespace

BracketResult bracket(const Hamiltonian& h1, const Hamiltonian& h2, const BracketOptions& opt) {
    BracketResult result;
    result.value = Hamiltonian(h1.mode_cap(), h1.degree_cap());
    if (h1.empty() || h2.empty()) return result;

    const NormWeights& lw = opt.ledger_weights;
    const auto v1 = make_views(h1, lw.theta, "bracket");
    const auto v2 = make_views(h2, lw.theta, "bracket");
    const int degree_cap = h1.degree_cap();
    const cplx half_over_i{0, static_cast<real_t>(-0.5)};  // 1/(2i)

    for (const TermView& t1 : v1) {
        for (const TermView& t2 : v2) {
            const int out_degree = t1.degree + t2.degree - 2;
            const bool fits = out_degree <= degree_cap;
            auto j1 = t1.qsupp.begin();
            auto j2 = t2.qsupp.begin();
            while (j1 != t1.qsupp.end() && j2 != t2.qsupp.end()) {
                const Mode m1 = std::get<0>(*j1);
                const Mode m2 = std::get<0>(*j2);
                if (m1 < m2) {
                    ++j1;
                    continue;
                }
                if (m2 < m1) {
                    ++j2;
                    continue;
                }
                const Mode j = m1;
                const auto [jm, ke, pe] = *j1;
                const auto [jm2, Ke, Pe] = *j2;
                const long long factor =
                    static_cast<long long>(ke) * Pe - static_cast<long long>(pe) * Ke;
                ++j1;
                ++j2;
                if (factor == 0) continue;
                const cplx coeff =
                    half_over_i * static_cast<real_t>(factor) * t1.coeff * t2.coeff;
                if (fits) {
                    Monomial out;
                    out.a = t1.m->a + t2.m->a;
                    out.k = t1.m->k + t2.m->k;
                    out.k.add(j, -1);
                    out.kp = t1.m->kp + t2.m->kp;
                    out.kp.add(j, -1);
                    if (momentum(out) != t1.mom + t2.mom)
                        throw Error("momentum additivity broken in bracket at " + out.id());
                    result.value.add(std::move(out), coeff);
                } else {
                    // exact norm weight of the dropped monomial, no allocation
                    const double theta_sum =
                        t1.theta_sum + t2.theta_sum - 2.0 * weight_pow(j, lw.theta);
                    const int n1 = merged_n1_after(t1, t2, j);
                    const double mstar = static_cast<double>(std::llabs(t1.mom + t2.mom));
                    const double log_w =
                        lw.rho * (theta_sum -
                                  2.0 * std::pow(static_cast<double>(n1), lw.theta)) -
                        lw.mu * (mstar > 0 ? std::pow(mstar, lw.theta) : 0.0);
                    result.tail_norm_by_class[0] +=
                        static_cast<double>(std::abs(coeff)) * std::exp(-log_w);
                }
            }
        }
    }

    const auto pruned = result.value.prune(opt.drop_tol, lw);
    for (int c = 0; c < 3; ++c) result.tail_norm_by_class[static_cast<std::size_t>(c)] += pruned[static_cast<std::size_t>(c)];
    return result;
}

BracketResult lie_transform(const Hamiltonian& h, const Hamiltonian& f, const BracketOptions& opt,
                            double tol, int order_cap, int* orders_used) {
    BracketResult acc;
    acc.value = h;
    Hamiltonian g = h;  // H^(n), unscaled
    double factorial = 1.0;
    double prev_norm = -1.0;
    double prev_prev_norm = -1.0;
    int growing = 0;
    int orders = 0;

    for (int n = 1; n <= order_cap; ++n) {
        BracketResult br = bracket(g, f, opt);
        g = std::move(br.value);
        factorial *= n;
        for (int c = 0; c < 3; ++c)
            acc.tail_norm_by_class[static_cast<std::size_t>(c)] +=
                br.tail_norm_by_class[static_cast<std::size_t>(c)] / factorial;

        Hamiltonian term = g;
        term *= cplx{static_cast<real_t>(1.0 / factorial), 0};
        acc.value += term;
        const double tn = plus_norm(term, opt.ledger_weights).max;
        orders = n;

        if (tn < tol) {
            // geometric tail estimate from the last two term norms
            double tail = tn;
            if (prev_norm > 0 && tn > 0) {
                const double q = tn / prev_norm;
                if (q < 1.0) tail = tn * q / (1.0 - q);
            }
            acc.tail_norm_by_class[0] += tail;
            break;
        }
        if (prev_norm >= 0 && tn >= prev_norm)
            ++growing;
        else
            growing = 0;
        if (growing >= 3)
            throw NoDecay("Lie series terms grew for 3 consecutive orders (|F| too large "
                          "for the caps); last norms " +
                          std::to_string(prev_prev_norm) + ", " + std::to_string(prev_norm) +
                          ", " + std::to_string(tn));
        if (n == order_cap) {
            double tail = tn;
            if (prev_norm > 0 && tn > 0) {
                const double q = tn / prev_norm;
                if (q < 1.0) tail = tn * q / (1.0 - q);
            }
            acc.tail_norm_by_class[0] += tail;
        }
        prev_prev_norm = prev_norm;
        prev_norm = tn;
    }
    if (orders_used) *orders_used = orders;
    return acc;
}

namespace {

cplx ipow(cplx base, int e) {
    cplx r{1, 0};
    while (e-- > 0) r *= base;
    return r;
}

// Product of the term with one q_j (when bar==false) or qbar_j (bar==true)
// factor removed, times the removed exponent.
cplx term_derivative(const Monomial& m, cplx coeff, const std::vector<cplx>& q,
                     const std::vector<cplx>& qbar, int point_cap, const TorusSpec& I0, Mode j,
                     bool bar) {
    const ExponentVector& target = bar ? m.kp : m.k;
    const int e_j = target.get(j);
    if (e_j == 0) return {0, 0};
    auto at = [point_cap](const std::vector<cplx>& v, Mode n) -> cplx {
        if (std::abs(n) > point_cap) return {0, 0};
        return v[static_cast<std::size_t>(n + point_cap)];
    };
    cplx prod = coeff * static_cast<real_t>(e_j);
    for (const auto& [n, e] : m.a.entries())
        prod *= ipow(cplx{static_cast<real_t>(I0.action(n)), 0}, e);
    for (const auto& [n, e] : m.k.entries())
        prod *= ipow(at(q, n), (!bar && n == j) ? e - 1 : e);
    for (const auto& [n, e] : m.kp.entries())
        prod *= ipow(at(qbar, n), (bar && n == j) ? e - 1 : e);
    return prod;
}

}  // namespace

cplx gradient(const Hamiltonian& h, const std::vector<cplx>& q, int point_cap,
              const TorusSpec& I0, Mode j) {
    std::vector<cplx> qbar(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) qbar[i] = std::conj(q[i]);
    cplx total{0, 0};
    for (const auto& [m, c] : h.terms()) {
        if (m.cls() != 0)
            throw MixedClassInput("gradient requires plain input, found J factors in " + m.id());
        total += term_derivative(m, c, q, qbar, point_cap, I0, j, false);
    }
    return total;
}

cplx gradient_bar(const Hamiltonian& h, const std::vector<cplx>& q, int point_cap,
                  const TorusSpec& I0, Mode j) {
    std::vector<cplx> qbar(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) qbar[i] = std::conj(q[i]);
    cplx total{0, 0};
    for (const auto& [m, c] : h.terms()) {
        if (m.cls() != 0)
            throw MixedClassInput("gradient requires plain input, found J factors in " + m.id());
        total += term_derivative(m, c, q, qbar, point_cap, I0, j, true);
    }
    return total;
}

std::vector<cplx> vector_field(const NormalForm& nf, const Hamiltonian& r,
                               const std::vector<cplx>& q, int point_cap, const TorusSpec& I0) {
    std::vector<cplx> vel(q.size());
    const cplx iu{0, 1};
    for (Mode n = -point_cap; n <= point_cap; ++n) {
        const std::size_t idx = static_cast<std::size_t>(n + point_cap);
        cplx g = cplx{static_cast<real_t>(nf.freq.omega(n)), 0} * q[idx];
        g += gradient_bar(r, q, point_cap, I0, n);
        vel[idx] = iu * g;
    }
    return vel;
}

}  // namespace kamnf
