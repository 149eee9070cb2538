#include "kamnf/seed.hpp"

#include <cmath>

namespace kamnf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit01(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

double GevreyProfile::bound_ratio() const {
    double worst = 0;
    for (Mode n = -cap; n <= cap; ++n) {
        const double bound = C * std::exp(-mu_f * weight_pow(n, theta));
        const double v = static_cast<double>(std::abs(fhat(n)));
        if (bound == 0) {
            if (v > 0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, v / bound);
    }
    return worst;
}

double GevreyProfile::conjugate_defect() const {
    double worst = 0;
    for (Mode n = 0; n <= cap; ++n)
        worst = std::max(worst,
                         static_cast<double>(std::abs(fhat(-n) - std::conj(fhat(n)))));
    return worst;
}

GevreyProfile gevrey_sample(double mu_f, double theta, double C, int profile_cap,
                            std::uint64_t rng_seed) {
    if (mu_f <= 0) throw Error("gevrey_sample needs mu_f > 0");
    GevreyProfile f;
    f.mu_f = mu_f;
    f.theta = theta;
    f.C = C;
    f.cap = profile_cap;
    f.coeffs.assign(static_cast<std::size_t>(2 * profile_cap + 1), cplx{0, 0});
    for (Mode n = 0; n <= profile_cap; ++n) {
        // per-mode stream: extending the cap never changes lower modes
        const std::uint64_t h1 = splitmix64(rng_seed ^ (0x517cc1b727220a95ull * (n + 1)));
        const std::uint64_t h2 = splitmix64(h1);
        const double radius = 0.25 + 0.75 * unit01(h1);
        const double decay = C * std::exp(-mu_f * weight_pow(n, theta));
        if (n == 0) {
            const double sign = (h2 & 1) ? -1.0 : 1.0;
            f.set(0, cplx{static_cast<real_t>(sign * radius * decay), 0});
        } else {
            const double angle = 2.0 * M_PI * unit01(h2);
            const cplx u{static_cast<real_t>(radius * std::cos(angle)),
                         static_cast<real_t>(radius * std::sin(angle))};
            f.set(n, u * static_cast<real_t>(decay));
            f.set(-n, std::conj(u) * static_cast<real_t>(decay));
        }
    }
    return f;
}

namespace {

struct Multiset3 {
    Mode n1, n2, n3;  // n1 <= n2 <= n3
    long long sum;
    int arrangements;  // 3! / prod of multiplicity factorials
};

std::vector<Multiset3> triples(int mode_cap) {
    std::vector<Multiset3> out;
    for (Mode x = -mode_cap; x <= mode_cap; ++x)
        for (Mode y = x; y <= mode_cap; ++y)
            for (Mode z = y; z <= mode_cap; ++z) {
                int arr = 6;
                if (x == y && y == z)
                    arr = 1;
                else if (x == y || y == z)
                    arr = 3;
                out.push_back({x, y, z, static_cast<long long>(x) + y + z, arr});
            }
    return out;
}

ExponentVector to_exponents(const Multiset3& t) {
    ExponentVector v;
    v.add(t.n1, 1);
    v.add(t.n2, 1);
    v.add(t.n3, 1);
    return v;
}

}  // namespace

Hamiltonian build_seed_r(const GevreyProfile& f, double eps, int mode_cap, int degree_cap) {
    if (mode_cap < 0) throw CapTooSmall("mode_cap must be >= 0");
    if (degree_cap < 6)
        throw CapTooSmall("degree_cap " + std::to_string(degree_cap) +
                          " cannot hold the sextic seed");
    Hamiltonian r(mode_cap, degree_cap);
    if (eps == 0.0) return r;
    const auto halves = triples(mode_cap);
    for (const auto& odd : halves) {        // q-side (n1, n3, n5)
        for (const auto& even : halves) {   // qbar-side (n2, n4, n6)
            const long long n = even.sum - odd.sum;  // momentum constraint: m(k,kp) = -n
            if (std::llabs(n) > f.cap) continue;
            const cplx fh = f.fhat(static_cast<Mode>(n));
            if (fh == cplx{0, 0}) continue;
            Monomial m;
            m.k = to_exponents(odd);
            m.kp = to_exponents(even);
            const cplx coeff = static_cast<real_t>(eps) * fh *
                               static_cast<real_t>(odd.arrangements * even.arrangements);
            r.add(std::move(m), coeff);
        }
    }
    return r;
}

Seed build_seed(const GevreyProfile& f, const FrequencyVector& V, double eps, int mode_cap,
                int degree_cap) {
    Seed s;
    FrequencyVector freq(mode_cap, V.gamma());
    for (Mode n = -mode_cap; n <= mode_cap; ++n) freq.set_vtilde(n, V.vtilde(n));
    s.normal.freq = std::move(freq);
    s.r = build_seed_r(f, eps, mode_cap, degree_cap);
    return s;
}

SeedCertificate seed_norm_certificate(const Hamiltonian& r, const NormWeights& w,
                                      const GevreyProfile& f, double eps) {
    SeedCertificate cert;
    for (const auto& [m, c] : r.terms()) {
        const double v = static_cast<double>(std::abs(c)) * std::exp(-log_norm_weight(m, w));
        if (v > cert.value) {
            cert.value = v;
            cert.max_monomial = m;
        }
    }
    const int probe_cap = r.mode_cap() + 1;
    if (f.cap < 6 * probe_cap)
        throw Error("profile cap " + std::to_string(f.cap) +
                    " too small for the cap-stability probe (needs " +
                    std::to_string(6 * probe_cap) + ")");
    // the probe needs headroom for the larger modes
    Hamiltonian probe = build_seed_r(f, eps, probe_cap, std::max(r.degree_cap(), 6));
    cert.probe_value = norm(probe, w);
    const double base = std::max(cert.value, 1e-300);
    cert.relative_change = std::abs(cert.probe_value - cert.value) / base;
    if (cert.value == 0 && cert.probe_value == 0) cert.relative_change = 0;
    if (cert.relative_change > 0.05)
        throw NormDiverges("seed norm moved " + std::to_string(100 * cert.relative_change) +
                           "% under a mode-cap increase (mu > mu_f regime): " +
                           std::to_string(cert.value) + " -> " +
                           std::to_string(cert.probe_value));
    return cert;
}

}  // namespace kamnf
