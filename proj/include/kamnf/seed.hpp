#pragma once

#include <cstdint>
#include <vector>

#include "kamnf/hamiltonian.hpp"

namespace kamnf {

// Fourier data of the Gevrey-smooth weight f: coefficients for |n| <= cap
// obeying |fhat(n)| <= C e^{-mu_f |n|^theta}, conjugate-symmetric when f is
// real.
struct GevreyProfile {
    double mu_f = 2.5;
    double theta = 0.5;
    double C = 1.0;
    int cap = 0;
    std::vector<cplx> coeffs;  // indexed n + cap

    cplx fhat(Mode n) const {
        if (std::abs(n) > cap) return {0, 0};
        return coeffs[static_cast<std::size_t>(n + cap)];
    }

    void set(Mode n, cplx v) { coeffs[static_cast<std::size_t>(n + cap)] = v; }

    // max over stored modes of |fhat| / (C e^{-mu_f |n|^theta}); <= 1 when
    // the decay bound holds.
    double bound_ratio() const;
    double conjugate_defect() const;
};

// Draws fhat(n) = C e^{-mu_f |n|^theta} u_n with |u_n| <= 1 from a per-mode
// hash of rng_seed, so extending profile_cap keeps lower modes unchanged.
// Conjugate symmetry is enforced.
GevreyProfile gevrey_sample(double mu_f, double theta, double C, int profile_cap,
                            std::uint64_t rng_seed);

struct Seed {
    NormalForm normal;
    Hamiltonian r;  // plain sextic part
};

// The lattice Hamiltonian: N = sum (n^2+V_n)|q_n|^2 plus one class-0 term
// per admissible 6-tuple n1-n2+n3-n4+n5-n6 = -n inside the mode cap, with
// coefficient eps*fhat(n) and ordered-tuple multiplicities accumulated onto
// canonical monomials. Every term has momentum exactly -n.
Seed build_seed(const GevreyProfile& f, const FrequencyVector& V, double eps, int mode_cap,
                int degree_cap);

// The perturbation part alone (V-independent); used by the cap-stability
// probe.
Hamiltonian build_seed_r(const GevreyProfile& f, double eps, int mode_cap, int degree_cap);

struct SeedCertificate {
    double value = 0;           // ||R||_{rho,mu}
    double probe_value = 0;     // same norm with the mode cap raised by one
    Monomial max_monomial;      // where the sup is attained
    double relative_change = 0;
};

// Computes ||R||_{rho,mu} and probes stability under a cap increase by
// rebuilding the seed one mode larger (with the same fhat draw). Throws
// NormDiverges when the sup moves by more than 5%, the signature of
// mu > mu_f.
SeedCertificate seed_norm_certificate(const Hamiltonian& r, const NormWeights& w,
                                      const GevreyProfile& f, double eps);

}  // namespace kamnf
