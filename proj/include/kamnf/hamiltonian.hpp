#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "kamnf/frequency.hpp"
#include "kamnf/lattice.hpp"

namespace kamnf {

#ifdef KAMNF_EXTENDED_PRECISION
using real_t = long double;
#else
using real_t = double;
#endif
using cplx = std::complex<real_t>;

struct NormWeights {
    double rho;
    double mu;
    double theta;
};

struct Term {
    Monomial mono;
    cplx coeff;
};

// log of the norm weight e^{ρ(Σ(2a+k+kp)|n|^θ + 2Σ_j |m_j|^θ - 2(n1*)^θ) - μ m*^θ}.
// The J-factor sum is empty for class-0 terms, which reduces to the plain
// Hamiltonian norm; a term's norm contribution is |B| e^{-log_norm_weight}.
double log_norm_weight(const Monomial& m, const NormWeights& w);

// Sparse coefficient map keyed by canonical monomials. Mode and degree caps
// are hard: out-of-range insertions throw, they are never silently dropped.
class Hamiltonian {
  public:
    Hamiltonian() = default;
    Hamiltonian(int mode_cap, int degree_cap) : mode_cap_(mode_cap), degree_cap_(degree_cap) {}

    int mode_cap() const { return mode_cap_; }
    int degree_cap() const { return degree_cap_; }

    bool fits(const Monomial& m) const {
        return m.max_abs_mode() <= mode_cap_ && m.degree() <= degree_cap_;
    }

    // Accumulates coeff onto the canonical form of m (jfactors sorted).
    void add(Monomial m, cplx coeff);

    std::size_t n_terms() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const std::map<Monomial, cplx>& terms() const { return terms_; }

    cplx coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? cplx{0, 0} : it->second;
    }

    Hamiltonian& operator+=(const Hamiltonian& other);
    Hamiltonian& operator*=(cplx scalar);

    // Per-class view (class = number of attached J factors).
    Hamiltonian class_part(int cls) const;
    bool has_jfactors() const;

    // Removes terms with |coeff| < drop_tol and returns the removed mass per
    // class, valued with the term's norm weight at `w`.
    std::array<double, 3> prune(double drop_tol, const NormWeights& w);

    // max over terms of |B(a,k,kp,j) - conj(B(a,kp,k,j))|; 0 for a
    // real-valued Hamiltonian function.
    double reality_defect() const;

    // Total |coeff| mass, a bookkeeping aid for the per-step conservation
    // ledger.
    double coeff_mass() const;

    bool operator==(const Hamiltonian&) const = default;

  private:
    int mode_cap_ = 0;
    int degree_cap_ = 0;
    std::map<Monomial, cplx> terms_;
};

// sup-norm of a plain Hamiltonian. Throws MixedClassInput when any term
// carries a J factor; use plus_norm for classed input.
double norm(const Hamiltonian& h, const NormWeights& w);

struct PlusNorm {
    double r0 = 0;
    double r1 = 0;
    double r2 = 0;
    double max = 0;
};

// Class-refined norms: class-1 terms are additionally weighted by
// e^{2ρ|m|^θ}, class-2 by e^{2ρ(|m1|^θ+|m2|^θ)}.
PlusNorm plus_norm(const Hamiltonian& h, const NormWeights& w);

// Regroups a plain Hamiltonian (jfactor-free, k/kp overlaps allowed) into
// the classed form: shared live actions I^b = (I(0)+J)^b are expanded into
//   (i)   all-frozen powers             -> class 0,
//   (ii)  one J, the rest frozen        -> class 1,
//   (iii) J_m^2 with live residuals     -> class 2,
//   (iv)  J_{m1} J_{m2} (m1<m2) + live  -> class 2,
// with frozen powers carried symbolically as a-exponents and residual live
// actions folded back into equal k/kp increments. Coefficient-equal as a
// function on phase space.
Hamiltonian split(const Hamiltonian& plain);

// Substitutes every J_m by q_m qbar_m - I_m(0) (the subtraction symbolic,
// a += e_m), producing plain class-0 terms. Exact inverse of split as a
// coefficient map.
Hamiltonian expand_j(const Hamiltonian& classed);

struct ResonantSplit {
    Hamiltonian res;
    Hamiltonian nonres;
};

// Partition of a class-0/1 Hamiltonian into the resonant part (k = kp = 0)
// and the rest; res + nonres == input exactly.
ResonantSplit resonant_project(const Hamiltonian& h);

// The quadratic normal part as an explicit plain Hamiltonian (one
// q_n qbar_n term per mode), for feeding to the generic bracket.
Hamiltonian normal_as_hamiltonian(const NormalForm& nf, int mode_cap, int degree_cap);

// Evaluation at a phase point. `q` holds q_n for |n| <= point_cap;
// conjugates are taken internally. Frozen actions come from `I0`.
cplx eval(const Hamiltonian& h, const std::vector<cplx>& q, int point_cap, const TorusSpec& I0);

// Wirtinger evaluation treating q and qbar as independent variables (needed
// by the finite-difference bracket oracle).
cplx eval_holo(const Hamiltonian& h, const std::vector<cplx>& q, const std::vector<cplx>& qbar,
               int point_cap, const TorusSpec& I0);

}  // namespace kamnf
