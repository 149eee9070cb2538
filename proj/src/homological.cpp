#include "kamnf/homological.hpp"

#include <cmath>
#include <sstream>

namespace kamnf {

double divisor(const ExponentVector& k, const ExponentVector& kp, const FrequencyVector& freq) {
    double d = 0;
    for (const auto& [n, e] : k.entries()) d += e * freq.omega(n);
    for (const auto& [n, e] : kp.entries()) d -= e * freq.omega(n);
    return d;
}

double product_lower_bound(const ExponentVector& k, const ExponentVector& kp, int mode_cap) {
    double prod = 1.0;
    auto factor = [&prod, mode_cap](Mode n, int l) {
        if (l == 0) return;
        if (std::abs(n) > mode_cap)
            throw ModeOutOfRange("mode " + std::to_string(n) + " beyond cap in product bound");
        const double w4 = std::pow(static_cast<double>(weight(n)), 4.0);
        prod /= 1.0 + static_cast<double>(l) * l * w4;
    };
    // walk the merged support once; l_n = k_n - kp_n
    auto ki = k.entries().begin(), ke = k.entries().end();
    auto pi = kp.entries().begin(), pe = kp.entries().end();
    while (ki != ke || pi != pe) {
        if (pi == pe || (ki != ke && ki->first < pi->first)) {
            factor(ki->first, ki->second);
            ++ki;
        } else if (ki == ke || pi->first < ki->first) {
            factor(pi->first, -pi->second);
            ++pi;
        } else {
            factor(ki->first, ki->second - pi->second);
            ++ki;
            ++pi;
        }
    }
    return prod;
}

namespace {

double dist_to_int(double x) { return std::abs(x - std::nearbyint(x)); }

void dioph_recurse(const FrequencyVector& vt, double gamma, int coeff_cap, Mode n, Mode support_cap,
                   double partial_sum, double partial_prod, bool any_nonzero,
                   DiophantineResult& res, std::vector<int>& l) {
    if (n > support_cap) {
        if (!any_nonzero) return;
        ++res.vectors_checked;
        const double margin = dist_to_int(partial_sum) - gamma * partial_prod;
        if (margin < res.worst_margin || res.vectors_checked == 1) {
            res.worst_margin = margin;
            std::ostringstream os;
            for (std::size_t i = 0; i < l.size(); ++i) {
                if (l[i] == 0) continue;
                os << (os.tellp() > 0 ? "," : "") << "l[" << (static_cast<int>(i) - support_cap)
                   << "]=" << l[i];
            }
            res.worst_l = os.str();
            if (margin < 0) res.ok = false;
        }
        return;
    }
    const double w4 = std::pow(static_cast<double>(weight(n)), 4.0);
    for (int c = -coeff_cap; c <= coeff_cap; ++c) {
        l[static_cast<std::size_t>(n + support_cap)] = c;
        dioph_recurse(vt, gamma, coeff_cap, n + 1, support_cap, partial_sum + c * vt.vtilde(n),
                      partial_prod / (1.0 + static_cast<double>(c) * c * w4), any_nonzero || c != 0,
                      res, l);
    }
    l[static_cast<std::size_t>(n + support_cap)] = 0;
}

}  // namespace

DiophantineResult diophantine_check(const FrequencyVector& vt, double gamma, int support_cap,
                                    int coeff_cap, std::uint64_t budget) {
    if (support_cap > vt.cap())
        throw ModeOutOfRange("diophantine support_cap " + std::to_string(support_cap) +
                             " beyond frequency cap " + std::to_string(vt.cap()));
    const int modes = 2 * support_cap + 1;
    const double total = std::pow(2.0 * coeff_cap + 1.0, modes);
    if (total > static_cast<double>(budget))
        throw EnumerationTooLarge("diophantine lattice has " + std::to_string(total) +
                                  " points, budget " + std::to_string(budget));
    DiophantineResult res;
    res.degenerate_gamma = (gamma == 0.0);
    std::vector<int> l(static_cast<std::size_t>(modes), 0);
    dioph_recurse(vt, gamma, coeff_cap, -support_cap, support_cap, 0.0, 1.0, false, res, l);
    return res;
}

namespace {

void solve_into(const Hamiltonian& input, const FrequencyVector& freq, double divisor_floor,
                SolveResult& out) {
    const cplx two_i{0, 2};
    for (const auto& [m, c] : input.terms()) {
        if (m.k == m.kp)
            throw ResonantLeak("resonant monomial reached solve: " + m.id());
        const double d = divisor(m.k, m.kp, freq);
        const double floor =
            std::max(divisor_floor, 0.5 * freq.gamma() * product_lower_bound(m.k, m.kp,
                                                                             input.mode_cap()));
        out.reports.push_back({m.id(), d, floor, false});
        if (std::abs(d) < floor) throw SmallDivisorViolation(m.id(), d, floor);

        // Case-1 monomials of the divisor analysis carry no small divisor at
        // all: |sum (k-kp) n^2| > 10 sum |k-kp| forces |d| >= 8.
        long long s2 = 0, l1 = 0;
        auto acc = [&](const ExponentVector& v, int sign) {
            for (const auto& [n, e] : v.entries())
                s2 += static_cast<long long>(sign) * e * n * n;
        };
        acc(m.k, 1);
        acc(m.kp, -1);
        auto accl = [&](Mode n) {
            l1 += std::llabs(m.k.get(n) - m.kp.get(n));
        };
        for (const auto& [n, e] : m.k.entries()) accl(n);
        for (const auto& [n, e] : m.kp.entries())
            if (m.k.get(n) == 0) accl(n);
        if (std::llabs(s2) > 10 * l1 && std::abs(d) < 1.0)
            throw Error("case-1 divisor guard broken at " + m.id() + ": divisor " +
                        std::to_string(d));

        if (out.min_abs_divisor == 0 || std::abs(d) < out.min_abs_divisor)
            out.min_abs_divisor = std::abs(d);
        out.generator.add(m, two_i * c / static_cast<real_t>(d));
    }
}

}  // namespace

SolveResult solve(const Hamiltonian& r0_nr, const Hamiltonian& r1_nr, const FrequencyVector& freq,
                  double divisor_floor) {
    SolveResult out;
    out.generator = Hamiltonian(r0_nr.mode_cap(), r0_nr.degree_cap());
    solve_into(r0_nr, freq, divisor_floor, out);
    solve_into(r1_nr, freq, divisor_floor, out);
    return out;
}

std::string divisor_reports_csv(const std::vector<DivisorReport>& reports, int step) {
    std::ostringstream os;
    char buf[64];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%.17g", r.divisor);
        os << step << ',' << '"' << r.monomial_id << '"' << ',' << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.floor);
        os << buf << ',' << (r.resonant ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace kamnf
